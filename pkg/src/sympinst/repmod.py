"""SL(2)-modules built from U = <s, t>.

Leaves are ``SymU(m)`` (S_m, the m-th symmetric power of U) and ``V(m)``
(U tensor S_m); internal nodes are ``Tensor``, ``SymSq`` and ``AltSq``.
Modules of negative degree are the zero module.

Basis labels:

* ``SymU(m)``: the s-exponent ``a`` of s^a t^(m-a), listed from a = m down to 0.
* ``V(m)``: ``(u, a)`` with u = 0 for s and 1 for t; s-block first.
* ``Tensor``: tuple of factor labels, lexicographic in factor indices.
* ``SymSq`` / ``AltSq``: index pairs ``(i, j)`` into the child basis with
  i <= j (resp. i < j), lexicographic.

With these labels multiplication by s raises the s-exponent and
multiplication by t leaves it alone, which is all the map builders need.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Union

from .exactla import SparseMat

__all__ = [
    "SymU",
    "V",
    "Tensor",
    "SymSq",
    "AltSq",
    "ModuleExpr",
    "Basis",
    "dimension",
    "enumerate_basis",
    "weights",
    "weight_partition",
    "lie_action",
    "render_label",
    "sym_index",
    "alt_index",
    "kron",
    "sym2_induced",
    "alt2_induced",
]


@dataclass(frozen=True)
class SymU:
    m: int


@dataclass(frozen=True)
class V:
    m: int


@dataclass(frozen=True)
class Tensor:
    factors: tuple

    def __init__(self, *factors):
        if len(factors) == 1 and isinstance(factors[0], (tuple, list)):
            factors = tuple(factors[0])
        object.__setattr__(self, "factors", tuple(factors))


@dataclass(frozen=True)
class SymSq:
    child: "ModuleExpr"


@dataclass(frozen=True)
class AltSq:
    child: "ModuleExpr"


ModuleExpr = Union[SymU, V, Tensor, SymSq, AltSq]


@lru_cache(maxsize=None)
def dimension(expr: ModuleExpr) -> int:
    if isinstance(expr, SymU):
        return max(expr.m + 1, 0)
    if isinstance(expr, V):
        return max(2 * (expr.m + 1), 0)
    if isinstance(expr, Tensor):
        d = 1
        for f in expr.factors:
            d *= dimension(f)
        return d
    if isinstance(expr, SymSq):
        d = dimension(expr.child)
        return d * (d + 1) // 2
    if isinstance(expr, AltSq):
        d = dimension(expr.child)
        return d * (d - 1) // 2
    raise TypeError(f"not a module expression: {expr!r}")


def sym_index(i: int, j: int, d: int) -> int:
    """Position of the unordered pair {i, j} in the SymSq basis of a d-dim space."""
    if i > j:
        i, j = j, i
    return i * d - i * (i - 1) // 2 + (j - i)


def alt_index(i: int, j: int, d: int) -> tuple[int, int] | None:
    """(position, sign) of e_i ^ e_j in the AltSq basis, or None when i == j."""
    if i == j:
        return None
    sign = 1
    if i > j:
        i, j = j, i
        sign = -1
    return i * d - i * (i + 1) // 2 + (j - i - 1), sign


@dataclass(frozen=True)
class Basis:
    expr: ModuleExpr
    labels: tuple

    @property
    def index_of(self) -> dict:
        return _index_table(self)

    def __len__(self) -> int:
        return len(self.labels)


@lru_cache(maxsize=None)
def _index_table(basis: Basis) -> dict:
    return {lab: i for i, lab in enumerate(basis.labels)}


def _labels(expr: ModuleExpr) -> tuple:
    if isinstance(expr, SymU):
        return tuple(range(expr.m, -1, -1))
    if isinstance(expr, V):
        return tuple((u, a) for u in (0, 1) for a in range(expr.m, -1, -1))
    if isinstance(expr, Tensor):
        out = [()]
        for f in expr.factors:
            labs = enumerate_basis(f).labels
            out = [prev + (lab,) for prev in out for lab in labs]
        return tuple(out)
    d = dimension(expr.child)
    if isinstance(expr, SymSq):
        return tuple((i, j) for i in range(d) for j in range(i, d))
    if isinstance(expr, AltSq):
        return tuple((i, j) for i in range(d) for j in range(i + 1, d))
    raise TypeError(f"not a module expression: {expr!r}")


@lru_cache(maxsize=None)
def enumerate_basis(expr: ModuleExpr) -> Basis:
    return Basis(expr, _labels(expr))


# weights ----------------------------------------------------------------


@lru_cache(maxsize=None)
def weights(expr: ModuleExpr) -> tuple[int, ...]:
    """Eigenvalues of h on the canonical basis (s has weight 1, t weight -1)."""
    if isinstance(expr, SymU):
        return tuple(2 * a - expr.m for a in range(expr.m, -1, -1))
    if isinstance(expr, V):
        inner = weights(SymU(expr.m))
        return tuple(1 + w for w in inner) + tuple(-1 + w for w in inner)
    if isinstance(expr, Tensor):
        out = (0,)
        for f in expr.factors:
            wf = weights(f)
            out = tuple(a + b for a in out for b in wf)
        return out
    w = weights(expr.child)
    return tuple(w[i] + w[j] for i, j in enumerate_basis(expr).labels)


def weight_partition(expr: ModuleExpr) -> dict[int, list[int]]:
    """Basis indices grouped by weight, highest weight first."""
    groups: dict[int, list[int]] = {}
    for i, w in enumerate(weights(expr)):
        groups.setdefault(w, []).append(i)
    return {w: groups[w] for w in sorted(groups, reverse=True)}


# functorial constructions -----------------------------------------------


def kron(A: SparseMat, B: SparseMat) -> SparseMat:
    """Matrix of A tensor B in lexicographic tensor bases."""
    cols = []
    for ca in A.columns():
        for cb in B.columns():
            col = {}
            for i, a in ca.items():
                base = i * B.n_rows
                for j, b in cb.items():
                    col[base + j] = a * b
            cols.append(col)
    return SparseMat(A.n_rows * B.n_rows, A.n_cols * B.n_cols, cols)


def _pair_cols(d_src: int, alt: bool) -> list[tuple[int, int]]:
    if alt:
        return [(i, j) for i in range(d_src) for j in range(i + 1, d_src)]
    return [(i, j) for i in range(d_src) for j in range(i, d_src)]


def _pair_image(ci, cj, d_tgt: int, alt: bool) -> dict[int, int]:
    col: dict[int, int] = {}
    for p, a in ci.items():
        for q, b in cj.items():
            if alt:
                hit = alt_index(p, q, d_tgt)
                if hit is None:
                    continue
                idx, sign = hit
                col[idx] = col.get(idx, 0) + sign * a * b
            else:
                idx = sym_index(p, q, d_tgt)
                col[idx] = col.get(idx, 0) + a * b
    return col


def sym2_induced(A: SparseMat) -> SparseMat:
    """S^2 A : w.w' -> Aw.Aw'."""
    d_src, d_tgt = A.n_cols, A.n_rows
    cols = [_pair_image(A.columns()[i], A.columns()[j], d_tgt, False) for i, j in _pair_cols(d_src, False)]
    return SparseMat(d_tgt * (d_tgt + 1) // 2, len(cols), cols)


def alt2_induced(A: SparseMat) -> SparseMat:
    """Lambda^2 A : w^w' -> Aw^Aw'."""
    d_src, d_tgt = A.n_cols, A.n_rows
    cols = [_pair_image(A.columns()[i], A.columns()[j], d_tgt, True) for i, j in _pair_cols(d_src, True)]
    return SparseMat(d_tgt * (d_tgt - 1) // 2, len(cols), cols)


def _pair_derivation(X: SparseMat, alt: bool) -> SparseMat:
    d = X.n_cols
    unit = [{i: 1} for i in range(d)]
    cols = []
    for i, j in _pair_cols(d, alt):
        a = _pair_image(X.columns()[i], unit[j], d, alt)
        for k, v in _pair_image(unit[i], X.columns()[j], d, alt).items():
            a[k] = a.get(k, 0) + v
        cols.append(a)
    n = d * (d - 1) // 2 if alt else d * (d + 1) // 2
    return SparseMat(n, n, cols)


# Lie algebra action ----------------------------------------------------


def _leaf_action(m: int, gen: str) -> SparseMat:
    # e = s d/dt, f = t d/ds, h = a - b on s^a t^b; index of s^a is m - a
    n = max(m + 1, 0)
    cols = []
    for a in range(m, -1, -1):
        b = m - a
        if gen == "e":
            cols.append({m - (a + 1): b} if b else {})
        elif gen == "f":
            cols.append({m - (a - 1): a} if a else {})
        else:
            cols.append({m - a: a - b} if a != b else {})
    return SparseMat(n, n, cols)


@lru_cache(maxsize=None)
def lie_action(expr: ModuleExpr, gen: str) -> SparseMat:
    """Matrix of the sl(2) generator ``gen`` in {'e', 'f', 'h'} on ``expr``."""
    if gen not in ("e", "f", "h"):
        raise ValueError(f"unknown generator {gen!r}")
    if isinstance(expr, SymU):
        return _leaf_action(expr.m, gen)
    if isinstance(expr, V):
        if expr.m < 0:
            return SparseMat.zeros(0, 0)
        return lie_action(Tensor(SymU(1), SymU(expr.m)), gen)
    if isinstance(expr, Tensor):
        dims = [dimension(f) for f in expr.factors]
        total = SparseMat.zeros(dimension(expr), dimension(expr))
        for pos, f in enumerate(expr.factors):
            term = SparseMat.identity(1)
            for q, g in enumerate(expr.factors):
                term = kron(term, lie_action(g, gen) if q == pos else SparseMat.identity(dims[q]))
            total = total + term
        return total
    if isinstance(expr, SymSq):
        return _pair_derivation(lie_action(expr.child, gen), alt=False)
    if isinstance(expr, AltSq):
        return _pair_derivation(lie_action(expr.child, gen), alt=True)
    raise TypeError(f"not a module expression: {expr!r}")


# rendering --------------------------------------------------------------


def _monomial(a: int, m: int) -> str:
    parts = []
    b = m - a
    if a:
        parts.append("s" if a == 1 else f"s^{a}")
    if b:
        parts.append("t" if b == 1 else f"t^{b}")
    return "*".join(parts) or "1"


def render_label(expr: ModuleExpr, label) -> str:
    """Stable text form of a basis label, e.g. ``s^2*t|s@s*t``."""
    if isinstance(expr, SymU):
        return _monomial(label, expr.m)
    if isinstance(expr, V):
        u, a = label
        return ("s" if u == 0 else "t") + "@" + _monomial(a, expr.m)
    if isinstance(expr, Tensor):
        parts = []
        for f, lab in zip(expr.factors, label):
            txt = render_label(f, lab)
            parts.append(f"({txt})" if isinstance(f, Tensor) else txt)
        return "|".join(parts)
    child = enumerate_basis(expr.child).labels
    i, j = label
    op = "." if isinstance(expr, SymSq) else "^"
    return f"[{render_label(expr.child, child[i])}]{op}[{render_label(expr.child, child[j])}]"


def describe(expr: ModuleExpr) -> str:
    if isinstance(expr, SymU):
        return f"S{expr.m}"
    if isinstance(expr, V):
        return f"V{expr.m}"
    if isinstance(expr, Tensor):
        return "(" + " x ".join(describe(f) for f in expr.factors) + ")"
    if isinstance(expr, SymSq):
        return f"Sym2{describe(expr.child)}"
    return f"Alt2{describe(expr.child)}"
