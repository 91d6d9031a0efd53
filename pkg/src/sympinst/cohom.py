"""Cohomology dimensions from kernel ranks, and the verdict report."""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Any

from .cgmaps import (
    CANONICAL_EPSILON,
    VARIANTS,
    all_maps,
    build_beta,
    build_connector,
    build_epsilon,
    build_mu,
    build_phi_dual,
    select_epsilon_candidate,
)
from .exactla import (
    DEFAULT_CONFIG,
    Config,
    RankResult,
    SparseMat,
    block_rank_result,
    rank_exact,
)
from .repmod import dimension, lie_action, weight_partition, weights

__all__ = [
    "CohomRecord",
    "Claim",
    "VerdictReport",
    "resolve_engine",
    "phi_rank",
    "compute_h2",
    "compute_h1_N",
    "chi_s2",
    "chi_s2_printed",
    "closed_forms",
    "proportionality",
    "equivariance_failures",
    "weight_failures",
    "compute_record",
    "verify_paper_formulas",
    "CLAIM_IDS",
]


def resolve_engine(engine: str, M: SparseMat, config: Config = DEFAULT_CONFIG) -> str:
    if engine == "auto":
        return "exact" if max(M.shape) <= config.dense_bound else "multimodular"
    if engine not in ("exact", "multimodular"):
        raise ValueError(f"unknown rank engine {engine!r}")
    return engine


def weight_blocked_rank(M: SparseMat, source, target, engine: str = "auto", prime_count: int = 3,
                        seed: int = 0, config: Config = DEFAULT_CONFIG) -> RankResult:
    eng = resolve_engine(engine, M, config)
    return block_rank_result(M, weight_partition(target), weight_partition(source), eng,
                             prime_count=prime_count, seed=seed, config=config)


def phi_rank(variant: str, k: int, n: int, engine: str = "auto", prime_count: int = 3, seed: int = 0,
             config: Config = DEFAULT_CONFIG) -> RankResult:
    h = build_phi_dual(variant, k, n)
    return weight_blocked_rank(h.matrix, h.source, h.target, engine, prime_count, seed, config)


def compute_h2(variant: str, k: int, n: int, engine: str = "auto", prime_count: int = 3, seed: int = 0,
               config: Config = DEFAULT_CONFIG) -> int:
    """dim Ker of the Phi-dual map, i.e. h^2 of S^2E, A^2E or End E."""
    M = build_phi_dual(variant, k, n).matrix
    return M.n_cols - phi_rank(variant, k, n, engine, prime_count, seed, config).rank


def compute_h1_N(variant: str, k: int, n: int, engine: str = "auto", prime_count: int = 3, seed: int = 0,
                 config: Config = DEFAULT_CONFIG) -> int:
    """dim Coker of the Phi-dual map (h^1 of the N-sheaf functor); exploratory only."""
    M = build_phi_dual(variant, k, n).matrix
    return M.n_rows - phi_rank(variant, k, n, engine, prime_count, seed, config).rank


def chi_s2(k: int, n: int) -> int:
    """Euler characteristic of S^2E: 2n^2 + n + [k^2 (2n-1)(n-1) - k(10n^2 + 5n + 1)] / 2."""
    twice = k * k * (2 * n - 1) * (n - 1) - k * (10 * n * n + 5 * n + 1)
    return 2 * n * n + n + twice // 2


def chi_s2_printed(k: int, n: int) -> int:
    """The same expression with the k-coefficient 10n^2 - 5n - 1 as typeset."""
    twice = k * k * (2 * n - 1) * (n - 1) - k * (10 * n * n - 5 * n - 1)
    return 2 * n * n + n + twice // 2


def closed_forms(k: int, n: int) -> dict[str, int]:
    return {
        "h2_s2_formula": comb(k - 2, 2) * comb(2 * n - 1, 2),
        "h2_end_formula": (k - 2) ** 2 * (2 * n - 1) * (n - 1),
        "h2_alt2_formula": comb(k - 1, 2) * (2 * n - 1) * (n - 1),
        "h1_s2_formula": 2 * k * (5 * n - 1) + 4 * n * n - 10 * n + 3,
        "h1_end_formula": 4 * (3 * n - 1) * k + (2 * n - 5) * (2 * n - 1),
        "k3_dim_formula": 4 * n * n + 20 * n - 3,
    }


@dataclass
class CohomRecord:
    k: int
    n: int
    h2_s2: int
    h2_alt2: int
    h2_end: int
    h1_s2N: int
    h1_alt2N: int
    h1_NtensorN: int
    h1_s2E: int
    chi: int


def compute_record(k: int, n: int, engine: str = "auto", prime_count: int = 3, seed: int = 0,
                   config: Config = DEFAULT_CONFIG) -> CohomRecord:
    vals = {}
    for v in VARIANTS:
        M = build_phi_dual(v, k, n).matrix
        r = phi_rank(v, k, n, engine, prime_count, seed, config).rank
        vals[v] = (M.n_cols - r, M.n_rows - r)
    chi = chi_s2(k, n)
    return CohomRecord(k, n, vals["sym"][0], vals["alt"][0], vals["tensor"][0],
                       vals["sym"][1], vals["alt"][1], vals["tensor"][1], vals["sym"][0] - chi, chi)


# checks -----------------------------------------------------------------


def proportionality(A: SparseMat, B: SparseMat) -> Fraction | None:
    """The constant c with A = c*B, if one exists and B is nonzero."""
    if A.shape != B.shape:
        return None
    c = None
    for ca, cb in zip(A.columns(), B.columns()):
        if set(ca) != set(cb):
            return None
        for i, b in cb.items():
            r = Fraction(ca[i], b)
            if c is None:
                c = r
            elif r != c:
                return None
    return c


def equivariance_failures(maps) -> list[str]:
    bad = []
    for h in maps:
        for g in ("e", "f", "h"):
            if h.matrix @ lie_action(h.source, g) != lie_action(h.target, g) @ h.matrix:
                bad.append(f"{h.name}:{g}")
    return bad


def weight_failures(maps) -> list[str]:
    bad = []
    for h in maps:
        ws, wt = weights(h.source), weights(h.target)
        if any(ws[j] != wt[i] for i, j, _ in h.matrix.entries()):
            bad.append(h.name)
    return bad


# report -----------------------------------------------------------------


@dataclass
class Claim:
    claim_id: str
    computed: Any
    expected: Any

    @property
    def passed(self) -> bool:
        return self.computed == self.expected

    def as_dict(self) -> dict:
        return {"claim_id": self.claim_id, "computed": self.computed, "expected": self.expected,
                "pass": self.passed}


@dataclass
class VerdictReport:
    k: int
    n: int
    claims: list[Claim] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)
    info: dict[str, Any] = field(default_factory=dict)

    def add(self, claim_id: str, computed, expected) -> None:
        self.claims.append(Claim(claim_id, computed, expected))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.claims)

    def claim(self, claim_id: str) -> Claim:
        for c in self.claims:
            if c.claim_id == claim_id:
                return c
        raise KeyError(claim_id)

    def failures(self) -> list[str]:
        return [c.claim_id for c in self.claims if not c.passed]

    def to_dict(self, with_timings: bool = True) -> dict:
        return {
            "k": self.k,
            "n": self.n,
            "claims": [c.as_dict() for c in self.claims],
            "timings": dict(sorted(self.timings.items())) if with_timings else {},
            "info": self.info,
        }

    def to_json(self, with_timings: bool = True) -> str:
        return json.dumps(self.to_dict(with_timings), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "VerdictReport":
        rep = cls(d["k"], d["n"], timings=dict(d.get("timings", {})), info=dict(d.get("info", {})))
        for c in d["claims"]:
            rep.add(c["claim_id"], c["computed"], c["expected"])
        return rep

    def csv_rows(self) -> list[dict]:
        return [{"k": self.k, "n": self.n, "claim_id": c.claim_id, "computed": json.dumps(c.computed),
                 "expected": json.dumps(c.expected), "pass": int(c.passed)} for c in self.claims]


CSV_FIELDS = ["k", "n", "claim_id", "computed", "expected", "pass"]


def reports_to_csv(reports: list[VerdictReport]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerows(r.csv_rows())
    return buf.getvalue()


def reports_from_csv(text: str) -> list[VerdictReport]:
    out: dict[tuple[int, int], VerdictReport] = {}
    for row in csv.DictReader(io.StringIO(text)):
        key = (int(row["k"]), int(row["n"]))
        rep = out.setdefault(key, VerdictReport(*key))
        rep.add(row["claim_id"], json.loads(row["computed"]), json.loads(row["expected"]))
    return list(out.values())


CLAIM_IDS = (
    "h2_s2_closed_form",
    "iso_h2_end",
    "snake_h2_alt2",
    "snake_additivity",
    "rank_cross_check",
    "phi_eps_sym_zero",
    "phi_eps_alt_zero",
    "phi_eps_tensor_zero",
    "eps_sym_injective",
    "eps_sym_onto_kernel",
    "eps_alt_injective",
    "eps_alt_onto_kernel",
    "eps_tensor_injective",
    "eps_tensor_onto_kernel",
    "epsilon_pairing",
    "diagram_phi_sigma",
    "diagram_phi_alpha",
    "diagram_eps_sigma",
    "diagram_eps_alpha",
    "h1_s2E_closed_form",
    "h1_s2E_n1",
    "chi_printed_fails",
    "k3_h1_dim",
    "k3_smooth",
    "cg_complex",
    "cg_beta_injective",
    "cg_mu_surjective",
    "cg_dim_sum",
    "equivariance",
    "weight_preservation",
)


class _Timer:
    def __init__(self, report: VerdictReport, key: str):
        self.report, self.key = report, key

    def __enter__(self):
        self.t0 = time.perf_counter()

    def __exit__(self, *exc):
        self.report.timings[self.key] = round((time.perf_counter() - self.t0) * 1000.0, 3)


def _ratio(A: SparseMat, B: SparseMat):
    if A.is_zero() and B.is_zero():
        return "both_zero"
    c = proportionality(A, B)
    if c is None:
        return None
    return int(c) if c.denominator == 1 else str(c)


def verify_paper_formulas(k: int, n: int, engine: str = "auto", prime_count: int = 3, seed: int = 0,
                          config: Config = DEFAULT_CONFIG, equivariance: bool = True) -> VerdictReport:
    """Run every check at (k, n); failures become report entries, never exceptions."""
    if k < 2 or n < 1:
        raise ValueError(f"need k >= 2 and n >= 1, got k={k}, n={n}")
    rep = VerdictReport(k, n)
    forms = closed_forms(k, n)

    phi = {v: build_phi_dual(v, k, n) for v in VARIANTS}
    h2: dict[str, int] = {}
    h1N: dict[str, int] = {}
    cross_ok = True
    agreed = True
    with _Timer(rep, "kernels"):
        for v in VARIANTS:
            M = phi[v].matrix
            res = weight_blocked_rank(M, phi[v].source, phi[v].target, engine, prime_count, seed, config)
            agreed = agreed and res.agreed
            h2[v] = M.n_cols - res.rank
            h1N[v] = M.n_rows - res.rank
            # independent second route: the other engine, block-free when it fits
            if res.method == "exact_elimination":
                other = weight_blocked_rank(M, phi[v].source, phi[v].target, "multimodular",
                                            prime_count, seed, config)
                cross_ok = cross_ok and other.rank == res.rank and other.agreed
            elif max(M.shape) <= config.dense_bound:
                cross_ok = cross_ok and rank_exact(M, config) == res.rank
    rep.add("h2_s2_closed_form", h2["sym"], forms["h2_s2_formula"])
    rep.add("iso_h2_end", h2["tensor"], forms["h2_end_formula"])
    rep.add("snake_h2_alt2", h2["alt"], forms["h2_alt2_formula"])
    rep.add("snake_additivity", h2["tensor"], h2["sym"] + h2["alt"])
    rep.add("rank_cross_check", cross_ok and agreed, True)

    with _Timer(rep, "epsilon"):
        eps = {v: build_epsilon(v, k, n) for v in VARIANTS}
        for v in VARIANTS:
            rep.add(f"phi_eps_{v}_zero", (phi[v].matrix @ eps[v].matrix).nnz, 0)
        for v in VARIANTS:
            E = eps[v]
            r = weight_blocked_rank(E.matrix, E.source, E.target, engine, prime_count, seed, config).rank
            rep.add(f"eps_{v}_injective", r, dimension(E.source))
            rep.add(f"eps_{v}_onto_kernel", r, h2[v])
        winners = {}
        for v in VARIANTS:
            winner, flags = select_epsilon_candidate(v, k, n)
            if h2[v]:
                winners[v] = winner
            rep.info[f"epsilon_candidates_{v}"] = flags
        rep.add("epsilon_pairing", winners, {v: CANONICAL_EPSILON for v in winners})

    with _Timer(rep, "diagram"):
        sig_s = build_connector("sigma", k=k, n=n, level="source").matrix
        alp_s = build_connector("alpha", k=k, n=n, level="source").matrix
        pi_t = build_connector("pi", k=k, n=n, level="target").matrix
        iota_t = build_connector("iota", k=k, n=n, level="target").matrix
        sig_k = build_connector("sigma", k=k, n=n, level="kernel").matrix
        alp_k = build_connector("alpha", k=k, n=n, level="kernel").matrix
        c1 = _ratio(phi["tensor"].matrix @ sig_s, iota_t @ phi["alt"].matrix)
        c2 = _ratio(phi["sym"].matrix @ alp_s, pi_t @ phi["tensor"].matrix)
        c3 = _ratio(eps["tensor"].matrix @ sig_k, sig_s @ eps["alt"].matrix)
        c4 = _ratio(alp_s @ eps["tensor"].matrix, eps["sym"].matrix @ alp_k)
        rep.add("diagram_phi_sigma", c1, 1)
        rep.add("diagram_phi_alpha", c2, 1)
        # the kernel-level squares vanish identically when k <= 3 or n = 1
        zero_ok = "both_zero" if h2["tensor"] == 0 else 1
        rep.add("diagram_eps_sigma", c3, zero_ok)
        rep.add("diagram_eps_alpha", c4, "both_zero" if h2["sym"] == 0 else 1)

    chi = chi_s2(k, n)
    chi_p = chi_s2_printed(k, n)
    h1 = h2["sym"] - chi
    rep.add("h1_s2E_closed_form", h1, forms["h1_s2_formula"])
    if n == 1:
        rep.add("h1_s2E_n1", h1, 8 * k - 3)
    rep.add("chi_printed_fails", h2["sym"] - chi_p != forms["h1_s2_formula"], True)
    if k == 3:
        rep.add("k3_h1_dim", h1, forms["k3_dim_formula"])
        rep.add("k3_smooth", h2["sym"], 0)

    with _Timer(rep, "clebsch_gordan"):
        beta, mu = build_beta(k, n), build_mu(k, n)
        rep.add("cg_complex", (mu.matrix @ beta.matrix).nnz, 0)
        rep.add("cg_beta_injective", rank_exact(beta.matrix, config), beta.matrix.n_cols)
        rep.add("cg_mu_surjective", rank_exact(mu.matrix, config), dimension(mu.target))
        rep.add("cg_dim_sum", dimension(beta.source) - dimension(beta.target) + dimension(mu.target), 0)

    if equivariance:
        with _Timer(rep, "equivariance"):
            maps = all_maps(k, n)
            rep.add("equivariance", equivariance_failures(maps), [])
            rep.add("weight_preservation", weight_failures(maps), [])

    rep.info.update({
        "h2_s2": h2["sym"],
        "h2_alt2": h2["alt"],
        "h2_end": h2["tensor"],
        "h1_s2N": h1N["sym"],
        "h1_alt2N": h1N["alt"],
        "h1_NtensorN": h1N["tensor"],
        "h1_s2E": h1,
        "chi_corrected": chi,
        "chi_printed": chi_p,
        "h1_s2N_minus_h1_s2E": h1N["sym"] - h1,
        "h1_end_formula": forms["h1_end_formula"],
        "phi_shapes": {v: list(phi[v].matrix.shape) for v in VARIANTS},
    })
    return rep
