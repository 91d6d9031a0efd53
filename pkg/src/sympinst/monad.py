"""The special monad matrix B and compatible symplectic forms.

B is k x (2n+2k) with entries linear forms in x_0..x_n, y_0..y_n.  A
symplectic structure at monad level is an antisymmetric J with
B J B^t = 0 as a matrix of quadratic forms; A := J B^t then makes
B^t A = 0, the monad condition.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from pathlib import Path
from typing import Sequence, TextIO

from .exactla import DEFAULT_CONFIG, Config, SparseMat, kernel_basis, rank_exact

__all__ = [
    "NoSolution",
    "LinearForm",
    "LinFormMatrix",
    "SymplecticSolution",
    "build_special_B",
    "bjbt",
    "solve_symplectic",
    "sample_rank",
    "monad_dims",
    "write_linform_matrix",
    "write_J",
]


class NoSolution(RuntimeError):
    """No antisymmetric J satisfies B J B^t = 0."""


@dataclass(frozen=True)
class LinearForm:
    """Coefficients over (x_0..x_n, y_0..y_n)."""

    coefficients: tuple[int, ...]

    @classmethod
    def zero(cls, n_vars: int) -> "LinearForm":
        return cls((0,) * n_vars)

    @classmethod
    def var(cls, n_vars: int, i: int) -> "LinearForm":
        return cls(tuple(1 if j == i else 0 for j in range(n_vars)))

    def __add__(self, other: "LinearForm") -> "LinearForm":
        return LinearForm(tuple(a + b for a, b in zip(self.coefficients, other.coefficients)))

    def scale(self, c: int) -> "LinearForm":
        return LinearForm(tuple(c * a for a in self.coefficients))

    def is_zero(self) -> bool:
        return not any(self.coefficients)

    def __call__(self, point: Sequence) -> Fraction:
        return sum((Fraction(a) * p for a, p in zip(self.coefficients, point) if a), Fraction(0))


@dataclass(frozen=True)
class LinFormMatrix:
    k: int
    n: int
    entries: tuple[tuple[LinearForm, ...], ...]

    @property
    def n_rows(self) -> int:
        return len(self.entries)

    @property
    def n_cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    @property
    def n_vars(self) -> int:
        return 2 * self.n + 2

    def evaluate(self, point: Sequence) -> list[list[Fraction]]:
        return [[f(point) for f in row] for row in self.entries]

    def nonzero_per_row(self) -> list[int]:
        return [sum(sum(1 for c in f.coefficients if c) for f in row) for row in self.entries]


def build_special_B(k: int, n: int) -> LinFormMatrix:
    """Row i carries x_0..x_n in columns i..i+n and y_0..y_n from column n+k+i."""
    if k < 1 or n < 1:
        raise ValueError("need k, n >= 1")
    nv = 2 * n + 2
    width = 2 * n + 2 * k
    rows = []
    for i in range(k):
        row = [LinearForm.zero(nv)] * width
        for j in range(n + 1):
            row[i + j] = LinearForm.var(nv, j)
            row[n + k + i + j] = LinearForm.var(nv, n + 1 + j)
        rows.append(tuple(row))
    return LinFormMatrix(k, n, tuple(rows))


def _monomials(nv: int) -> list[tuple[int, int]]:
    return [(p, q) for p in range(nv) for q in range(p, nv)]


def _product(f: LinearForm, g: LinearForm) -> dict[tuple[int, int], int]:
    out: dict[tuple[int, int], int] = {}
    for p, a in enumerate(f.coefficients):
        if not a:
            continue
        for q, b in enumerate(g.coefficients):
            if b:
                key = (p, q) if p <= q else (q, p)
                out[key] = out.get(key, 0) + a * b
    return out


def bjbt(B: LinFormMatrix, J: Sequence[Sequence]) -> list[list[dict[tuple[int, int], int]]]:
    """B J B^t as a k x k grid of quadratic forms {(p, q): coefficient}, zero terms dropped."""
    N = B.n_cols
    out = []
    for i in range(B.n_rows):
        row = []
        for j in range(B.n_rows):
            acc: dict[tuple[int, int], int] = {}
            for a in range(N):
                fa = B.entries[i][a]
                if fa.is_zero():
                    continue
                for b in range(N):
                    if not J[a][b] or B.entries[j][b].is_zero():
                        continue
                    for key, v in _product(fa, B.entries[j][b]).items():
                        acc[key] = acc.get(key, 0) + J[a][b] * v
            row.append({key: v for key, v in acc.items() if v})
        out.append(row)
    return out


@dataclass
class SymplecticSolution:
    J: list[list[int]]
    solution_space_dim: int
    nondegenerate: bool
    attempts: int = 0
    basis: list[list[int]] = field(default_factory=list, repr=False)

    def A(self, B: LinFormMatrix) -> list[list[LinearForm]]:
        """A := J B^t, a (2n+2k) x k matrix of linear forms."""
        N = len(self.J)
        out = []
        for a in range(N):
            row = []
            for i in range(B.n_rows):
                f = LinearForm.zero(B.n_vars)
                for b in range(N):
                    if self.J[a][b]:
                        f = f + B.entries[i][b].scale(self.J[a][b])
                row.append(f)
            out.append(row)
        return out


def _unknowns(N: int) -> list[tuple[int, int]]:
    return [(a, b) for a in range(N) for b in range(a + 1, N)]


def _system(B: LinFormMatrix) -> SparseMat:
    N, nv = B.n_cols, B.n_vars
    mono_idx = {m: i for i, m in enumerate(_monomials(nv))}
    pairs = [(i, j) for i in range(B.n_rows) for j in range(i + 1, B.n_rows)]
    n_mono = len(mono_idx)
    cols = []
    for a, b in _unknowns(N):
        col: dict[int, int] = {}
        for e, (i, j) in enumerate(pairs):
            # J_ab contributes B_ia B_jb - B_ib B_ja
            for key, v in _product(B.entries[i][a], B.entries[j][b]).items():
                r = e * n_mono + mono_idx[key]
                col[r] = col.get(r, 0) + v
            for key, v in _product(B.entries[i][b], B.entries[j][a]).items():
                r = e * n_mono + mono_idx[key]
                col[r] = col.get(r, 0) - v
        cols.append(col)
    return SparseMat(len(pairs) * n_mono, len(cols), cols)


def _to_J(vec: Sequence[int], N: int) -> list[list[int]]:
    J = [[0] * N for _ in range(N)]
    for (a, b), v in zip(_unknowns(N), vec):
        J[a][b] = v
        J[b][a] = -v
    return J


def _nondegenerate(J: list[list[int]], config: Config) -> bool:
    return rank_exact(SparseMat.from_dense(J), config) == len(J)


SWEEP_COEFFS = (0, 1, -1, 2, -2, 3, -3)
SWEEP_LIMIT = 10_000
SWEEP_SEED = 0


def solve_symplectic(B: LinFormMatrix, config: Config = DEFAULT_CONFIG) -> SymplecticSolution:
    """Characterize all antisymmetric J with B J B^t = 0 and look for an invertible one.

    The first sample is the sum of the kernel basis; after that integer
    combinations with coefficients in [-3, 3] are drawn from a fixed-seed
    generator, at most SWEEP_LIMIT of them.
    """
    N = B.n_cols
    basis = kernel_basis(_system(B), config)
    dim = len(basis)
    if dim == 0:
        if B.n_rows >= 2:
            raise NoSolution(f"no symplectic form for k={B.k}, n={B.n}")
        return SymplecticSolution(_to_J([0] * len(_unknowns(N)), N), 0, False)

    def combine(coeffs) -> list[int]:
        out = [0] * len(basis[0])
        for c, v in zip(coeffs, basis):
            if c:
                for t, x in enumerate(v):
                    out[t] += c * x
        return out

    first = _to_J(combine([1] * dim), N)
    if _nondegenerate(first, config):
        return SymplecticSolution(first, dim, True, 1, basis)
    attempts = 1
    rng = random.Random(SWEEP_SEED)
    while attempts < SWEEP_LIMIT:
        coeffs = [rng.choice(SWEEP_COEFFS) for _ in range(dim)]
        if not any(coeffs):
            continue
        attempts += 1
        J = _to_J(combine(coeffs), N)
        if _nondegenerate(J, config):
            return SymplecticSolution(J, dim, True, attempts, basis)
    return SymplecticSolution(first, dim, False, attempts, basis)


def _rank_of_rows(rows: list[list[Fraction]], config: Config) -> int:
    ints = []
    for row in rows:
        L = lcm(*(x.denominator for x in row)) if row else 1
        ints.append([int(x * L) for x in row])
    return rank_exact(SparseMat.from_dense(ints, len(rows[0]) if rows else 0), config)


def sample_rank(B: LinFormMatrix, trials: int = 100, seed: int = 0, config: Config = DEFAULT_CONFIG) -> dict:
    """Rank of B at the coordinate points and at ``trials`` seeded rational points.

    Returns ``{"min_rank": int, "failures": [point strings where rank < k]}``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    nv = B.n_vars
    rng = random.Random(seed)
    points: list[list[Fraction]] = [[Fraction(int(i == j)) for j in range(nv)] for i in range(nv)]
    bound = 10 ** 6
    for _ in range(trials):
        points.append([Fraction(rng.randint(-bound, bound), rng.randint(1, bound)) for _ in range(nv)])
    min_rank = B.n_rows
    failures = []
    for pt in points:
        r = _rank_of_rows(B.evaluate(pt), config)
        min_rank = min(min_rank, r)
        if r < B.n_rows:
            failures.append("(" + ",".join(str(x) for x in pt) + ")")
    return {"min_rank": min_rank, "failures": failures}


def monad_dims(k: int, n: int) -> dict[str, int]:
    """Rank and space dimensions of both monad presentations."""
    if k < 1 or n < 1:
        raise ValueError("need k, n >= 1")
    return {
        "rank_E": (2 * n + 1) * k - 2 * n * (k - 1) - k,
        "A_space": k,
        "B_space": k,
        "C_space": 2 * n * (k - 1),
        "monad_ii_left": k,
        "monad_ii_middle": 2 * n + 2 * k,
        "monad_ii_right": k,
        "monad_ii_rank": (2 * n + 2 * k) - 2 * k,
        # 2nk - (k+1)(2n+2) + 2(k+n+1) across the Clebsch-Gordan sequence
        "cg_alternating_sum": 2 * n * k - (k + 1) * (2 * n + 2) + 2 * (k + n + 1),
    }


def write_linform_matrix(B: LinFormMatrix, out: TextIO | str | Path) -> None:
    """One matrix row per line; entries separated by spaces, each a comma-separated coefficient vector."""
    text = "\n".join(" ".join(",".join(str(c) for c in f.coefficients) for f in row) for row in B.entries) + "\n"
    if isinstance(out, (str, Path)):
        Path(out).write_text(text)
    else:
        out.write(text)


def write_J(sol: SymplecticSolution, k: int, n: int, out: TextIO | str | Path) -> None:
    N = len(sol.J)
    lines = [f"J {k} {n} {N} {N}"]
    lines += [f"{a} {b} {sol.J[a][b]}" for a in range(N) for b in range(N) if sol.J[a][b]]
    text = "\n".join(lines) + "\n"
    if isinstance(out, (str, Path)):
        Path(out).write_text(text)
    else:
        out.write(text)
