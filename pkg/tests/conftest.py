from __future__ import annotations


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running performance check")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LINES
    except ImportError:
        return
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
