"""Command-line driver: single points, grids, map export, symplectic solves."""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .cgmaps import (
    CANONICAL_EPSILON,
    build_beta,
    build_connector,
    build_epsilon,
    build_insertion,
    build_mu,
    build_phi_dual,
    write_triplets,
)
from .cohom import VerdictReport, compute_h2, reports_to_csv, verify_paper_formulas
from .exactla import Config, ResourceLimitError
from .monad import NoSolution, bjbt, build_special_B, monad_dims, sample_rank, solve_symplectic, write_J

SCHEMA_VERSION = 1
CACHE_ENV = "SYMPINST_CACHE_DIR"
CACHE_FILE = "runcache.jsonl"
MONAD_TRIALS = 100


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    n_range: tuple[int, int] = (1, 2)
    k_range: tuple[int, int] = (2, 4)
    rank_engine: str = "auto"
    prime_count: int = 3
    seed: int = 0
    out_path: str | None = None
    format: str = "json"
    cache_dir: str | None = None
    jobs: int = 1
    timings: bool = False
    equivariance: bool = True

    def validate(self) -> None:
        (n0, n1), (k0, k1) = self.n_range, self.k_range
        if k0 < 2:
            raise ConfigError(f"k range must start at 2 or more, got {k0}")
        if n0 < 1:
            raise ConfigError(f"n range must start at 1 or more, got {n0}")
        if n1 < n0 or k1 < k0:
            raise ConfigError("empty range")
        if self.rank_engine not in ("exact", "multimodular", "auto"):
            raise ConfigError(f"unknown engine {self.rank_engine!r}")
        if self.rank_engine != "exact" and self.prime_count < 2:
            raise ConfigError("need at least 2 primes for multimodular ranks")
        if self.format not in ("json", "csv", "md"):
            raise ConfigError(f"unknown format {self.format!r}")
        if self.jobs < 1:
            raise ConfigError("jobs must be positive")

    def points(self) -> list[tuple[int, int]]:
        """(n, k) grid points in output order."""
        return [(n, k) for n in range(self.n_range[0], self.n_range[1] + 1)
                for k in range(self.k_range[0], self.k_range[1] + 1)]

    def value_hash(self) -> str:
        """Hash of the settings that can change computed values."""
        key = {"engine": self.rank_engine, "primes": self.prime_count, "seed": self.seed,
               "trials": MONAD_TRIALS, "equivariance": self.equivariance}
        return hashlib.sha256(json.dumps(key, sort_keys=True).encode()).hexdigest()[:16]


# cache ------------------------------------------------------------------


class RunCache:
    """Append-only JSON-lines store of per-claim results keyed by (n, k, claim_id)."""

    INFO = "__info__"

    def __init__(self, directory: str | os.PathLike, config_hash: str, version: str = __version__):
        self.path = Path(directory) / CACHE_FILE
        self.config_hash = config_hash
        self.version = version
        self._entries: dict[tuple[int, int], dict[str, dict]] = {}
        if self.path.exists():
            for line in self.path.read_text().splitlines():
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError:
                    continue
                if rec.get("version") != version or rec.get("config_hash") != config_hash:
                    continue
                self._entries.setdefault((rec["n"], rec["k"]), {})[rec["claim_id"]] = rec["entry"]

    def get(self, n: int, k: int) -> VerdictReport | None:
        got = self._entries.get((n, k))
        if not got or self.INFO not in got:
            return None
        rep = VerdictReport(k, n, info=got[self.INFO]["info"])
        for cid in got[self.INFO]["order"]:
            c = got[cid]
            rep.add(cid, c["computed"], c["expected"])
        return rep

    def put(self, rep: VerdictReport) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        lines = []
        for c in rep.claims:
            lines.append(self._line(rep, c.claim_id, c.as_dict()))
        lines.append(self._line(rep, self.INFO, {"info": rep.info, "order": [c.claim_id for c in rep.claims]}))
        with self.path.open("a") as fh:
            fh.write("".join(lines))
        self._entries[(rep.n, rep.k)] = {json.loads(ln)["claim_id"]: json.loads(ln)["entry"] for ln in lines}

    def _line(self, rep: VerdictReport, claim_id: str, entry: dict) -> str:
        rec = {"version": self.version, "config_hash": self.config_hash, "n": rep.n, "k": rep.k,
               "claim_id": claim_id, "entry": entry}
        return json.dumps(rec, sort_keys=True) + "\n"


# per-point work -----------------------------------------------------------


def monad_checks(rep: VerdictReport, k: int, n: int, seed: int = 0) -> None:
    B = build_special_B(k, n)
    try:
        sol = solve_symplectic(B)
        zero = all(not q for row in bjbt(B, sol.J) for q in row)
        rep.add("monad_symplectic_nondegenerate", sol.nondegenerate, True)
        rep.add("monad_bjbt_zero", zero, True)
        rep.info["symplectic_solution_dim"] = sol.solution_space_dim
    except NoSolution:
        rep.add("monad_symplectic_nondegenerate", False, True)
        rep.info["symplectic_solution_dim"] = 0
    sr = sample_rank(B, MONAD_TRIALS, seed)
    rep.add("monad_sample_min_rank", sr["min_rank"], k)
    rep.add("monad_sample_failures", len(sr["failures"]), 0)
    rep.add("monad_rank_E", monad_dims(k, n)["rank_E"], 2 * n)


def run_point(n: int, k: int, config: RunConfig) -> VerdictReport:
    rep = verify_paper_formulas(k, n, engine=config.rank_engine, prime_count=config.prime_count,
                                seed=config.seed, equivariance=config.equivariance)
    monad_checks(rep, k, n, config.seed)
    return rep


def _run_point_args(args):
    return run_point(*args)


# output -----------------------------------------------------------------

TABLE_FIELDS = [
    "n", "k", "h2_S2E", "h2_S2E_expected", "h2_EndE", "h2_A2E", "h1_S2E", "h1_S2E_expected",
    "chi_corrected", "chi_printed", "symplectic_dim", "all_pass", "failed",
]


def table_rows(reports: list[VerdictReport]) -> list[dict]:
    rows = []
    for r in reports:
        rows.append({
            "n": r.n,
            "k": r.k,
            "h2_S2E": r.claim("h2_s2_closed_form").computed,
            "h2_S2E_expected": r.claim("h2_s2_closed_form").expected,
            "h2_EndE": r.claim("iso_h2_end").computed,
            "h2_A2E": r.claim("snake_h2_alt2").computed,
            "h1_S2E": r.claim("h1_s2E_closed_form").computed,
            "h1_S2E_expected": r.claim("h1_s2E_closed_form").expected,
            "chi_corrected": r.info.get("chi_corrected"),
            "chi_printed": r.info.get("chi_printed"),
            "symplectic_dim": r.info.get("symplectic_solution_dim"),
            "all_pass": r.passed,
            "failed": ";".join(r.failures()),
        })
    return rows


def emit_table(reports: list[VerdictReport], fmt: str = "md") -> str:
    """Summary table, one row per grid point."""
    if not reports:
        raise ValueError("need at least one report")
    rows = table_rows(reports)
    if fmt == "json":
        return json.dumps(rows, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=TABLE_FIELDS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue()
    if fmt == "md":
        lines = ["| " + " | ".join(TABLE_FIELDS) + " |", "|" + "---|" * len(TABLE_FIELDS)]
        for row in rows:
            lines.append("| " + " | ".join(str(row[f]) if row[f] != "" else "-" for f in TABLE_FIELDS) + " |")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def parse_table_csv(text: str) -> list[dict]:
    ints = {"n", "k", "h2_S2E", "h2_S2E_expected", "h2_EndE", "h2_A2E", "h1_S2E", "h1_S2E_expected",
            "chi_corrected", "chi_printed", "symplectic_dim"}
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        rec = {}
        for f in TABLE_FIELDS:
            v = row[f]
            if f in ints:
                rec[f] = int(v) if v != "" else None
            elif f == "all_pass":
                rec[f] = v == "True"
            else:
                rec[f] = v
        out.append(rec)
    return out


def render_reports(reports: list[VerdictReport], config: RunConfig) -> str:
    if config.format == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "artifact_version": __version__,
            "config": {"n_range": list(config.n_range), "k_range": list(config.k_range),
                       "rank_engine": config.rank_engine, "prime_count": config.prime_count,
                       "seed": config.seed},
            "reports": [r.to_dict(with_timings=config.timings) for r in reports],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if config.format == "csv":
        return reports_to_csv(reports)
    return emit_table(reports, "md")


REPORT_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "artifact_version", "config", "reports"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "artifact_version": {"type": "string"},
        "config": {"type": "object"},
        "reports": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["k", "n", "claims", "timings"],
                "properties": {
                    "k": {"type": "integer", "minimum": 2},
                    "n": {"type": "integer", "minimum": 1},
                    "claims": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["claim_id", "computed", "expected", "pass"],
                            "properties": {"claim_id": {"type": "string"}, "pass": {"type": "boolean"}},
                        },
                    },
                    "timings": {"type": "object", "additionalProperties": {"type": "number"}},
                    "info": {"type": "object"},
                },
            },
        },
    },
}


# grid -------------------------------------------------------------------


def run_grid(config: RunConfig, log=None, table_path: str | None = None) -> int:
    """Exit 0 when every claim passes, 1 on any failed claim, 2 on config/resource/I-O errors."""
    log = log or sys.stderr
    try:
        config.validate()
    except ConfigError as exc:
        print(f"config error: {exc}", file=log)
        return 2
    cache_dir = config.cache_dir or os.environ.get(CACHE_ENV)
    cache = RunCache(cache_dir, config.value_hash()) if cache_dir else None

    results: dict[tuple[int, int], VerdictReport] = {}
    todo = []
    for n, k in config.points():
        hit = cache.get(n, k) if cache else None
        if hit is not None:
            results[(n, k)] = hit
        else:
            todo.append((n, k))
    try:
        if config.jobs > 1 and len(todo) > 1:
            with ProcessPoolExecutor(max_workers=config.jobs) as pool:
                fresh = list(pool.map(_run_point_args, [(n, k, config) for n, k in todo]))
        else:
            fresh = [run_point(n, k, config) for n, k in todo]
    except ResourceLimitError as exc:
        print(f"resource error: {exc}", file=log)
        return 2
    for (n, k), rep in zip(todo, fresh):
        results[(n, k)] = rep
        if cache:
            cache.put(rep)

    reports = [results[p] for p in config.points()]
    text = render_reports(reports, config)
    try:
        if config.out_path:
            Path(config.out_path).write_text(text)
        else:
            sys.stdout.write(text)
        if table_path:
            fmt = Path(table_path).suffix.lstrip(".") or "md"
            Path(table_path).write_text(emit_table(reports, fmt if fmt in ("json", "csv") else "md"))
    except OSError as exc:
        print(f"I/O error: {exc}", file=log)
        return 2
    for r in reports:
        if not r.passed:
            print(f"n={r.n} k={r.k}: failed {', '.join(r.failures())}", file=log)
    return 0 if all(r.passed for r in reports) else 1


# export -----------------------------------------------------------------

MAP_NAMES = ["beta", "mu", "phi_sym", "phi_alt", "phi_tensor", "eps_sym", "eps_alt", "eps_tensor",
             "i_sym", "i_alt", "i_tensor", "sigma", "alpha", "pi", "iota"]


def named_map(name: str, k: int, n: int, candidate: str = CANONICAL_EPSILON):
    if name == "beta":
        return build_beta(k, n)
    if name == "mu":
        return build_mu(k, n)
    kind, _, variant = name.partition("_")
    if kind == "phi":
        return build_phi_dual(variant, k, n)
    if kind == "eps":
        return build_epsilon(variant, k, n, candidate)
    if kind == "i":
        return build_insertion(variant, k, n)
    if name in ("sigma", "alpha"):
        return build_connector(name, k=k, n=n, level="source")
    if name in ("pi", "iota"):
        return build_connector(name, k=k, n=n, level="target")
    raise KeyError(name)


# argument parsing -------------------------------------------------------


def _engine_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--engine", choices=["exact", "multimodular", "auto"], default="auto")
    p.add_argument("--primes", type=int, default=3, help="prime count for multimodular ranks")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sympinst", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("grid", help="verify every claim over a (n, k) grid")
    g.add_argument("--n-min", type=int, default=1)
    g.add_argument("--n-max", type=int, default=2)
    g.add_argument("--k-min", type=int, default=2)
    g.add_argument("--k-max", type=int, default=4)
    _engine_args(g)
    g.add_argument("--out", default=None, help="report file (stdout if omitted)")
    g.add_argument("--format", choices=["json", "csv", "md"], default="json")
    g.add_argument("--table", default=None, help="also write the summary table here (format from suffix)")
    g.add_argument("--cache-dir", default=None, help=f"run cache directory (or ${CACHE_ENV})")
    g.add_argument("--jobs", type=int, default=1)
    g.add_argument("--timings", action="store_true", help="record wall-clock timings in the report")
    g.add_argument("--no-equivariance", action="store_true", help="skip the equivariance sweep")

    v = sub.add_parser("verify", help="verify every claim at one (k, n)")
    v.add_argument("-k", type=int, required=True)
    v.add_argument("-n", type=int, required=True)
    _engine_args(v)
    v.add_argument("--format", choices=["json", "csv", "md"], default="json")
    v.add_argument("--out", default=None)
    v.add_argument("--timings", action="store_true")

    e = sub.add_parser("export-map", help="dump a map as sparse triplets")
    e.add_argument("name", choices=MAP_NAMES)
    e.add_argument("-k", type=int, required=True)
    e.add_argument("-n", type=int, required=True)
    e.add_argument("--candidate", default=CANONICAL_EPSILON, help="epsilon pairing (straight, crossed, printed)")
    e.add_argument("--out", default=None)

    s = sub.add_parser("symplectic", help="solve for J with B J B^t = 0")
    s.add_argument("-k", type=int, required=True)
    s.add_argument("-n", type=int, required=True)
    s.add_argument("--trials", type=int, default=MONAD_TRIALS)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default=None, help="write J as triplets here")

    h = sub.add_parser("h2", help="kernel dimension of one Phi-dual map")
    h.add_argument("variant", choices=["sym", "alt", "tensor"])
    h.add_argument("-k", type=int, required=True)
    h.add_argument("-n", type=int, required=True)
    _engine_args(h)
    return ap


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.cmd == "grid":
            cfg = RunConfig(
                n_range=(args.n_min, args.n_max), k_range=(args.k_min, args.k_max), rank_engine=args.engine,
                prime_count=args.primes, seed=args.seed, out_path=args.out, format=args.format,
                cache_dir=args.cache_dir, jobs=args.jobs, timings=args.timings,
                equivariance=not args.no_equivariance,
            )
            return run_grid(cfg, table_path=args.table)
        if args.cmd == "verify":
            cfg = RunConfig(n_range=(args.n, args.n), k_range=(args.k, args.k), rank_engine=args.engine,
                            prime_count=args.primes, seed=args.seed, format=args.format, timings=args.timings,
                            out_path=args.out)
            cfg.validate()
            rep = run_point(args.n, args.k, cfg)
            _write(render_reports([rep], cfg), args.out)
            return 0 if rep.passed else 1
        if args.cmd == "export-map":
            h = named_map(args.name, args.k, args.n, args.candidate)
            if args.out:
                write_triplets(h, args.out)
            else:
                write_triplets(h, sys.stdout)
            return 0
        if args.cmd == "symplectic":
            B = build_special_B(args.k, args.n)
            sol = solve_symplectic(B)
            zero = all(not q for row in bjbt(B, sol.J) for q in row)
            sr = sample_rank(B, args.trials, args.seed)
            summary = {"k": args.k, "n": args.n, "solution_space_dim": sol.solution_space_dim,
                       "nondegenerate": sol.nondegenerate, "bjbt_zero": zero,
                       "sample_min_rank": sr["min_rank"], "sample_failures": sr["failures"]}
            if args.out:
                write_J(sol, args.k, args.n, args.out)
            print(json.dumps(summary, indent=2, sort_keys=True))
            return 0 if sol.nondegenerate and zero and not sr["failures"] else 1
        if args.cmd == "h2":
            print(compute_h2(args.variant, args.k, args.n, args.engine, args.primes, args.seed, Config()))
            return 0
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ResourceLimitError, NoSolution, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
