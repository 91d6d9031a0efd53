from __future__ import annotations

from fractions import Fraction

import pytest

from sympinst.cgmaps import build_phi_dual
from sympinst.cohom import (
    CLAIM_IDS,
    VerdictReport,
    chi_s2,
    chi_s2_printed,
    closed_forms,
    compute_h1_N,
    compute_h2,
    compute_record,
    proportionality,
    reports_from_csv,
    reports_to_csv,
    verify_paper_formulas,
)
from sympinst.exactla import SparseMat, rank_exact


def test_h2_examples():
    assert all(compute_h2("sym", 2, n) == 0 for n in range(1, 5))
    assert compute_h2("sym", 5, 3) == 30
    assert compute_h2("tensor", 4, 2) == compute_h2("sym", 4, 2) + compute_h2("alt", 4, 2)


def test_engines_agree():
    for v in ("sym", "alt", "tensor"):
        assert compute_h2(v, 5, 3, engine="exact") == compute_h2(v, 5, 3, engine="multimodular")


def test_h1_N_examples():
    assert compute_h1_N("sym", 2, 1) == 17
    M = build_phi_dual("alt", 2, 1).matrix
    assert M.n_cols == 3
    assert compute_h1_N("alt", 2, 1) == M.n_rows - rank_exact(M)
    # zero source: cokernel is everything
    z = build_phi_dual("sym", 2, 1)
    assert compute_h1_N("sym", 2, 1) == z.matrix.n_rows - rank_exact(z.matrix)


def test_chi_examples():
    assert chi_s2(2, 1) == -13
    assert chi_s2(2, 2) == -35
    assert chi_s2_printed(2, 1) == -1


def test_chi_is_h2_minus_h1():
    for k in range(2, 8):
        for n in range(1, 5):
            cf = closed_forms(k, n)
            assert chi_s2(k, n) == cf["h2_s2_formula"] - cf["h1_s2_formula"]
            assert chi_s2_printed(k, n) - chi_s2(k, n) == k * (5 * n + 1)


def test_closed_form_examples():
    assert closed_forms(2, 2)["h1_s2_formula"] == 35
    assert closed_forms(3, 2)["h1_s2_formula"] == 53 == closed_forms(3, 2)["k3_dim_formula"]
    assert all(closed_forms(k, 1)["h1_s2_formula"] == 8 * k - 3 for k in range(2, 9))


def test_verify_4_2_all_pass():
    rep = verify_paper_formulas(4, 2)
    assert rep.passed, rep.failures()
    assert [c.claim_id for c in rep.claims] == [c for c in CLAIM_IDS if c in {x.claim_id for x in rep.claims}]
    assert rep.claim("h2_s2_closed_form").computed == 3
    assert rep.claim("iso_h2_end").computed == 12
    assert rep.claim("snake_h2_alt2").computed == 9
    assert rep.claim("h1_s2E_closed_form").computed == 71
    assert set(rep.claim("epsilon_pairing").computed.values()) == {"crossed"}


@pytest.mark.parametrize("n", [1, 2, 3])
def test_verify_k2(n):
    rep = verify_paper_formulas(2, n, equivariance=False)
    assert rep.passed, rep.failures()
    assert rep.claim("h2_s2_closed_form").computed == rep.claim("iso_h2_end").computed == 0
    assert rep.claim("h1_s2E_closed_form").computed == 4 * (5 * n - 1) + 4 * n * n - 10 * n + 3


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_verify_n1(k):
    rep = verify_paper_formulas(k, 1, equivariance=False)
    assert rep.passed, rep.failures()
    assert rep.claim("h1_s2E_n1").computed == 8 * k - 3


def test_record_fields():
    r = compute_record(4, 2)
    assert (r.h2_s2, r.h2_alt2, r.h2_end, r.h1_s2E) == (3, 9, 12, 71)


def test_proportionality():
    A = SparseMat.from_dense([[2, 0], [0, 4]])
    B = SparseMat.from_dense([[1, 0], [0, 2]])
    assert proportionality(A, B) == Fraction(2)
    assert proportionality(A, SparseMat.identity(2)) is None
    assert proportionality(A, SparseMat.from_dense([[1, 1], [0, 2]])) is None


def test_report_roundtrips():
    rep = verify_paper_formulas(3, 2, equivariance=False)
    again = VerdictReport.from_dict(rep.to_dict())
    assert again.to_dict() == rep.to_dict()
    back = reports_from_csv(reports_to_csv([rep]))
    assert [c.as_dict() for c in back[0].claims] == [c.as_dict() for c in rep.claims]
    assert "timings" not in rep.to_dict(with_timings=False) or rep.to_dict(with_timings=False)["timings"] == {}
