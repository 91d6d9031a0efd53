"""Explicit SL(2)-equivariant maps as integer sparse matrices.

Every map here is built from one primitive: ``beta``, which sends
g (x) v to sg (x) tv - tg (x) sv.  Applying it to both members of a pair
of S (x) V vectors produces four signed terms; a term is recorded as
``(ds1, dv1, ds2, dv2, sign)`` where each ``d`` is 1 for multiplication by
s and 0 for multiplication by t (s raises the s-exponent of a label, t
leaves it alone).

Two ways of pairing the multipliers occur:

* ``STRAIGHT``: the S-factor of each pair is paired with its own V-factor,
  i.e. beta applied to each pair separately.  The Phi maps use this.
* ``CROSSED``: the S-factor of one pair is paired with the V-factor of the
  other.  This is beta (x) beta conjugated by the swap of the two V-factors.

The kernel maps epsilon compose a symmetrizing insertion with one of these
pairings; which one annihilates against Phi is decided by
``select_epsilon_candidate``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterable, TextIO

from .exactla import SparseMat
from .repmod import (
    AltSq,
    ModuleExpr,
    SymSq,
    SymU,
    Tensor,
    V,
    alt_index,
    dimension,
    enumerate_basis,
    sym_index,
)

__all__ = [
    "MapHandle",
    "STRAIGHT",
    "CROSSED",
    "PRINTED_ALT",
    "EPSILON_CANDIDATES",
    "CANONICAL_EPSILON",
    "build_beta",
    "build_mu",
    "build_beta1",
    "build_phi_dual",
    "build_phi_dual_composed",
    "build_projection",
    "build_insertion",
    "build_epsilon1",
    "build_epsilon",
    "build_connector",
    "build_reorder",
    "select_epsilon_candidate",
    "all_maps",
    "write_triplets",
    "read_triplets",
]

STRAIGHT = ((1, 0, 1, 0, 1), (1, 0, 0, 1, -1), (0, 1, 1, 0, -1), (0, 1, 0, 1, 1))
CROSSED = ((1, 0, 1, 0, 1), (1, 1, 0, 0, -1), (0, 0, 1, 1, -1), (0, 1, 0, 1, 1))
# the displayed expansion of the symmetric epsilon^1, last term as typeset
PRINTED_ALT = ((1, 0, 1, 0, 1), (1, 1, 0, 0, -1), (0, 0, 1, 1, -1), (1, 0, 1, 0, 1))

EPSILON_CANDIDATES = {
    "sym": {"straight": STRAIGHT, "crossed": CROSSED},
    "alt": {"straight": STRAIGHT, "printed": PRINTED_ALT, "crossed": CROSSED},
    "tensor": {"straight": STRAIGHT, "crossed": CROSSED},
}
CANONICAL_EPSILON = "crossed"

VARIANTS = ("sym", "alt", "tensor")


@dataclass(frozen=True)
class MapHandle:
    name: str
    k: int
    n: int
    source: ModuleExpr
    target: ModuleExpr
    matrix: SparseMat

    def __post_init__(self):
        expect = (dimension(self.target), dimension(self.source))
        if self.matrix.shape != expect:
            raise ValueError(f"{self.name}: matrix {self.matrix.shape} != {expect}")

    def compose(self, other: "MapHandle", name: str | None = None) -> "MapHandle":
        """self after other."""
        return MapHandle(name or f"{self.name}*{other.name}", self.k, self.n, other.source, self.target,
                         self.matrix @ other.matrix)


def _W(a: int, b: int) -> Tensor:
    return Tensor(SymU(a), V(b))


def _shift(label, ds: int, dv: int):
    g, (u, c) = label
    return (g + ds, (u, c + dv))


def _from_rule(source: ModuleExpr, target: ModuleExpr, rule: Callable[[object], Iterable[tuple[int, int]]]) -> SparseMat:
    """Matrix whose column for each source label collects ``rule(label)`` (index, coef) pairs."""
    cols = []
    for lab in enumerate_basis(source).labels:
        col: dict[int, int] = {}
        for idx, c in rule(lab):
            col[idx] = col.get(idx, 0) + c
        cols.append(col)
    return SparseMat(dimension(target), dimension(source), cols)


# source views: every pair-type source is read as a list of (x, y, weight)
# pairs of W-labels whose images get summed


def _pairs_of(source: ModuleExpr, label):
    if isinstance(source, (AltSq, SymSq)):
        wl = enumerate_basis(source.child).labels
        i, j = label
        return wl[i], wl[j]
    if isinstance(source, Tensor) and len(source.factors) == 2:
        return label
    if isinstance(source, Tensor) and len(source.factors) == 4:
        g, g1, v, v1 = label
        return (g, v), (g1, v1)
    raise TypeError(f"unsupported pair source {source!r}")


def _place(target: ModuleExpr, x, y) -> tuple[int, int] | None:
    """Index and sign of the image of the pair (x, y) of W'-labels in ``target``."""
    if isinstance(target, (AltSq, SymSq)):
        idx = enumerate_basis(target.child).index_of
        d = dimension(target.child)
        if isinstance(target, AltSq):
            return alt_index(idx[x], idx[y], d)
        return sym_index(idx[x], idx[y], d), 1
    facs = target.factors
    if len(facs) == 2 and isinstance(facs[1], (AltSq, SymSq)):
        # (S2 or A2 of S) (x) A2 V
        s_part, v_part = facs
        s_idx = enumerate_basis(s_part.child).index_of
        v_idx = enumerate_basis(v_part.child).index_of
        ds, dv = dimension(s_part.child), dimension(v_part.child)
        hv = alt_index(v_idx[x[1]], v_idx[y[1]], dv)
        if hv is None:
            return None
        if isinstance(s_part, SymSq):
            hs = (sym_index(s_idx[x[0]], s_idx[y[0]], ds), 1)
        else:
            hs = alt_index(s_idx[x[0]], s_idx[y[0]], ds)
            if hs is None:
                return None
        return hs[0] * dimension(v_part) + hv[0], hs[1] * hv[1]
    if len(facs) == 2:
        idx = enumerate_basis(facs[0]).index_of
        return idx[x] * dimension(facs[1]) + idx[y], 1
    if len(facs) == 3:
        # S (x) S (x) A2 V
        s_idx = enumerate_basis(facs[0]).index_of
        a2 = facs[2]
        v_idx = enumerate_basis(a2.child).index_of
        hv = alt_index(v_idx[x[1]], v_idx[y[1]], dimension(a2.child))
        if hv is None:
            return None
        d_s, d_a = dimension(facs[0]), dimension(a2)
        return (s_idx[x[0]] * d_s + s_idx[y[0]]) * d_a + hv[0], hv[1]
    if len(facs) == 4:
        s_idx = enumerate_basis(facs[0]).index_of
        v_idx = enumerate_basis(facs[2]).index_of
        d_s, d_v = dimension(facs[0]), dimension(facs[2])
        return ((s_idx[x[0]] * d_s + s_idx[y[0]]) * d_v + v_idx[x[1]]) * d_v + v_idx[y[1]], 1
    raise TypeError(f"unsupported pair target {target!r}")


def _pair_map(source: ModuleExpr, target: ModuleExpr, terms) -> SparseMat:
    def rule(label):
        x, y = _pairs_of(source, label)
        for ds1, dv1, ds2, dv2, c in terms:
            hit = _place(target, _shift(x, ds1, dv1), _shift(y, ds2, dv2))
            if hit is not None:
                yield hit[0], c * hit[1]

    return _from_rule(source, target, rule)


# Clebsch-Gordan sequence -----------------------------------------------


def build_beta(k: int, n: int) -> MapHandle:
    """beta : A2 U (x) S_{k-1} (x) V_{n-1} -> S_k (x) V_n."""
    if k < 1 or n < 1:
        raise ValueError("beta needs k, n >= 1")
    source = Tensor(AltSq(SymU(1)), SymU(k - 1), V(n - 1))
    target = _W(k, n)
    idx = enumerate_basis(target).index_of

    def rule(label):
        _, g, v = label
        yield idx[_shift((g, v), 1, 0)], 1
        yield idx[_shift((g, v), 0, 1)], -1

    return MapHandle("beta", k, n, source, target, _from_rule(source, target, rule))


def build_beta1(a: int, b: int, k: int = 0, n: int = 0) -> MapHandle:
    """beta with the one-dimensional A2 U factor dropped: S_a (x) V_b -> S_{a+1} (x) V_{b+1}."""
    source, target = _W(a, b), _W(a + 1, b + 1)
    idx = enumerate_basis(target).index_of

    def rule(label):
        yield idx[_shift(label, 1, 0)], 1
        yield idx[_shift(label, 0, 1)], -1

    return MapHandle("beta1", k, n, source, target, _from_rule(source, target, rule))


def build_mu(k: int, n: int) -> MapHandle:
    """Multiplication S_k (x) V_n -> V_{k+n}, f (x) (u (x) h) -> u (x) fh."""
    if k < 0 or n < 0:
        raise ValueError("mu needs k, n >= 0")
    source, target = _W(k, n), V(k + n)
    idx = enumerate_basis(target).index_of

    def rule(label):
        f, (u, c) = label
        yield idx[(u, f + c)], 1

    return MapHandle("mu", k, n, source, target, _from_rule(source, target, rule))


# Phi maps ---------------------------------------------------------------


def _phi_spaces(variant: str, k: int, n: int) -> tuple[ModuleExpr, ModuleExpr]:
    W = _W(k - 2, n - 1)
    if variant == "sym":
        return AltSq(W), Tensor(SymSq(SymU(k - 1)), AltSq(V(n)))
    if variant == "alt":
        return SymSq(W), Tensor(AltSq(SymU(k - 1)), AltSq(V(n)))
    if variant == "tensor":
        return (Tensor(SymU(k - 2), SymU(k - 2), V(n - 1), V(n - 1)),
                Tensor(SymU(k - 1), SymU(k - 1), AltSq(V(n))))
    raise ValueError(f"unknown variant {variant!r}")


def _check_kn(k: int, n: int) -> None:
    if k < 2 or n < 1:
        raise ValueError(f"need k >= 2 and n >= 1, got k={k}, n={n}")


@lru_cache(maxsize=64)
def build_phi_dual(variant: str, k: int, n: int) -> MapHandle:
    """The Phi-dual map of the given variant from its four-term expansion.

    sym:    A2(S_{k-2} (x) V_{n-1}) -> S2 S_{k-1} (x) A2 V_n
    alt:    S2(S_{k-2} (x) V_{n-1}) -> A2 S_{k-1} (x) A2 V_n
    tensor: S_{k-2}^2 (x) V_{n-1}^2 -> S_{k-1}^2 (x) A2 V_n
    """
    _check_kn(k, n)
    source, target = _phi_spaces(variant, k, n)
    return MapHandle(f"phi_{variant}", k, n, source, target, _pair_map(source, target, STRAIGHT))


def build_projection(variant: str, k: int, n: int) -> MapHandle:
    """p~, p-bar and p: (f (x) u) * (f' (x) u') -> f * f' (x) u ^ u'."""
    W1 = _W(k - 1, n)
    source = {"sym": AltSq(W1), "alt": SymSq(W1), "tensor": Tensor(W1, W1)}[variant]
    _, target = _phi_spaces(variant, k, n)
    return MapHandle(f"p_{variant}", k, n, source, target, _pair_map(source, target, ((0, 0, 0, 0, 1),)))


def _pair_functor(variant: str, A: SparseMat) -> SparseMat:
    from .repmod import alt2_induced, kron, sym2_induced

    return {"sym": alt2_induced, "alt": sym2_induced, "tensor": lambda m: kron(m, m)}[variant](A)


def build_reorder(a: int, b: int, crossed: bool = False, k: int = 0, n: int = 0) -> MapHandle:
    """(S_a (x) V_b)^2 -> S_a (x) S_a (x) V_b (x) V_b; ``crossed`` also swaps the V factors."""
    W = _W(a, b)
    source, target = Tensor(W, W), Tensor(SymU(a), SymU(a), V(b), V(b))
    terms = ((0, 0, 0, 0, 1),)
    if crossed:
        idx = enumerate_basis(target).index_of

        def rule(label):
            (g, v), (g1, v1) = label
            yield idx[(g, g1, v1, v)], 1

        return MapHandle("reorder_crossed", k, n, source, target, _from_rule(source, target, rule))
    return MapHandle("reorder", k, n, source, target, _pair_map(source, target, terms))


def build_phi_dual_composed(variant: str, k: int, n: int) -> MapHandle:
    """Phi-dual as projection after the induced square of beta (independent construction)."""
    _check_kn(k, n)
    b = build_beta1(k - 2, n - 1, k, n).matrix
    M = build_projection(variant, k, n).matrix @ _pair_functor(variant, b)
    if variant == "tensor":
        # stored source is S (x) S (x) V (x) V; undo the factor reorder
        M = M @ build_reorder(k - 2, n - 1, k=k, n=n).matrix.T
    source, target = _phi_spaces(variant, k, n)
    return MapHandle(f"phi_{variant}_composed", k, n, source, target, M)


# epsilon maps -----------------------------------------------------------


def _eps_spaces(variant: str, k: int, n: int) -> tuple[ModuleExpr, ModuleExpr]:
    """(source of epsilon, source of the insertion's target)."""
    W0 = _W(k - 3, n - 2)
    if variant == "sym":
        return Tensor(AltSq(SymU(k - 3)), SymSq(V(n - 2))), AltSq(W0)
    if variant == "alt":
        return Tensor(SymSq(SymU(k - 3)), SymSq(V(n - 2))), SymSq(W0)
    if variant == "tensor":
        return Tensor(SymU(k - 3), SymU(k - 3), SymSq(V(n - 2))), Tensor(W0, W0)
    raise ValueError(f"unknown variant {variant!r}")


def build_insertion(variant: str, k: int, n: int) -> MapHandle:
    """i~, i-bar and the tensor analogue: f * f' (x) u.u' -> (f (x) u)*(f' (x) u') + (f (x) u')*(f' (x) u)."""
    _check_kn(k, n)
    source, target = _eps_spaces(variant, k, n)
    if variant == "tensor":
        s_lab = enumerate_basis(SymU(k - 3)).labels
        # labels are (f, f', (p, q)); reuse the pair placement with f-labels directly
    else:
        s_lab = enumerate_basis(source.factors[0].child).labels
    v_lab = enumerate_basis(V(n - 2)).labels

    def rule(label):
        if variant == "tensor":
            f, f1, (p, q) = label
        else:
            (i, j), (p, q) = label
            f, f1 = s_lab[i], s_lab[j]
        u, u1 = v_lab[p], v_lab[q]
        for x, y in (((f, u), (f1, u1)), ((f, u1), (f1, u))):
            hit = _place(target, x, y)
            if hit is not None:
                yield hit[0], hit[1]

    return MapHandle(f"i_{variant}", k, n, source, target, _from_rule(source, target, rule))


def build_epsilon1(variant: str, k: int, n: int, candidate: str = CANONICAL_EPSILON) -> MapHandle:
    """Pair-level lift of beta1 into the Phi-dual source, with the chosen multiplier pairing."""
    _check_kn(k, n)
    _, source = _eps_spaces(variant, k, n)
    target, _ = _phi_spaces(variant, k, n)
    terms = EPSILON_CANDIDATES[variant][candidate]
    return MapHandle(f"eps1_{variant}_{candidate}", k, n, source, target, _pair_map(source, target, terms))


@lru_cache(maxsize=64)
def build_epsilon(variant: str, k: int, n: int, candidate: str = CANONICAL_EPSILON) -> MapHandle:
    """epsilon = epsilon^1 after the symmetrizing insertion.

    sym:    A2 S_{k-3} (x) S2 V_{n-2} -> A2(S_{k-2} (x) V_{n-1})
    alt:    S2 S_{k-3} (x) S2 V_{n-2} -> S2(S_{k-2} (x) V_{n-1})
    tensor: S_{k-3}^2 (x) S2 V_{n-2} -> S_{k-2}^2 (x) V_{n-1}^2
    """
    e1 = build_epsilon1(variant, k, n, candidate)
    ins = build_insertion(variant, k, n)
    suffix = "" if candidate == CANONICAL_EPSILON else f"_{candidate}"
    return e1.compose(ins, name=f"eps_{variant}{suffix}")


def select_epsilon_candidate(variant: str, k: int, n: int) -> tuple[str, dict[str, bool]]:
    """Try each epsilon pairing against Phi-dual and return the first that annihilates.

    Candidates are tried in declaration order (straight first).  Returns the
    winner (or None) and the pass flag of every candidate.
    """
    phi = build_phi_dual(variant, k, n).matrix
    flags = {}
    for cand in EPSILON_CANDIDATES[variant]:
        flags[cand] = (phi @ build_epsilon(variant, k, n, cand).matrix).is_zero()
    winner = next((c for c, ok in flags.items() if ok), None)
    return winner, flags


# connectors -------------------------------------------------------------


def _sigma(W: ModuleExpr) -> SparseMat:
    d = dimension(W)
    cols = []
    for i, j in enumerate_basis(SymSq(W)).labels:
        col = {i * d + j: 1}
        col[j * d + i] = col.get(j * d + i, 0) + 1
        cols.append(col)
    return SparseMat(d * d, len(cols), cols)


def _alpha(W: ModuleExpr) -> SparseMat:
    d = dimension(W)
    cols = []
    for i in range(d):
        for j in range(d):
            hit = alt_index(i, j, d)
            cols.append({} if hit is None else {hit[0]: hit[1]})
    return SparseMat(d * (d - 1) // 2, d * d, cols)


def _pi(W: ModuleExpr) -> SparseMat:
    d = dimension(W)
    cols = [{sym_index(i, j, d): 1} for i in range(d) for j in range(d)]
    return SparseMat(d * (d + 1) // 2, d * d, cols)


def _iota(W: ModuleExpr) -> SparseMat:
    d = dimension(W)
    cols = []
    for i, j in enumerate_basis(AltSq(W)).labels:
        cols.append({i * d + j: 1, j * d + i: -1})
    return SparseMat(d * d, len(cols), cols)


_CONNECTOR = {"sigma": _sigma, "alpha": _alpha, "pi": _pi, "iota": _iota}


def _connector_spaces(kind: str, W: ModuleExpr) -> tuple[ModuleExpr, ModuleExpr]:
    sq = Tensor(W, W)
    return {
        "sigma": (SymSq(W), sq),
        "alpha": (sq, AltSq(W)),
        "pi": (sq, SymSq(W)),
        "iota": (AltSq(W), sq),
    }[kind]


def build_connector(kind: str, W: ModuleExpr | None = None, k: int = 0, n: int = 0,
                    level: str | None = None) -> MapHandle:
    """S2 / tensor-square / A2 splitting maps.

    With ``W`` given, the plain map on W: sigma w.w' -> w(x)w' + w'(x)w,
    alpha w(x)w' -> w^w', pi w(x)w' -> w.w', iota w^w' -> w(x)w' - w'(x)w.

    With ``level`` the map is cut to the columns of the splitting diagram:

    * ``"source"``: W = S_{k-2} (x) V_{n-1}, tensor square stored as S,S,V,V
      (sigma, alpha);
    * ``"target"``: W = S_{k-1}, tensored with the identity on A2 V_n
      (pi, iota);
    * ``"kernel"``: W = S_{k-3}, tensored with the identity on S2 V_{n-2}
      (sigma, alpha).
    """
    from .repmod import kron

    if kind not in _CONNECTOR:
        raise ValueError(f"unknown connector {kind!r}")
    if level is None:
        if W is None:
            raise ValueError("need W or level")
        src, tgt = _connector_spaces(kind, W)
        return MapHandle(kind, k, n, src, tgt, _CONNECTOR[kind](W))
    _check_kn(k, n)
    if level == "source":
        if kind not in ("sigma", "alpha"):
            raise ValueError(f"{kind} not defined at source level")
        W = _W(k - 2, n - 1)
        R = build_reorder(k - 2, n - 1, k=k, n=n).matrix
        ssvv = Tensor(SymU(k - 2), SymU(k - 2), V(n - 1), V(n - 1))
        if kind == "sigma":
            return MapHandle("sigma_source", k, n, SymSq(W), ssvv, R @ _sigma(W))
        return MapHandle("alpha_source", k, n, ssvv, AltSq(W), _alpha(W) @ R.T)
    if level in ("target", "kernel"):
        S = SymU(k - 1) if level == "target" else SymU(k - 3)
        rest = AltSq(V(n)) if level == "target" else SymSq(V(n - 2))
        src, tgt = _connector_spaces(kind, S)
        I = SparseMat.identity(dimension(rest))

        def flat(e):
            return Tensor(*e.factors, rest) if isinstance(e, Tensor) else Tensor(e, rest)

        return MapHandle(f"{kind}_{level}", k, n, flat(src), flat(tgt), kron(_CONNECTOR[kind](S), I))
    raise ValueError(f"unknown level {level!r}")


# inventory --------------------------------------------------------------


def all_maps(k: int, n: int) -> list[MapHandle]:
    """Every map of the construction at (k, n), for equivariance sweeps."""
    maps = [build_beta(k, n), build_mu(k, n)]
    if k >= 2:
        for v in VARIANTS:
            maps.append(build_phi_dual(v, k, n))
            maps.append(build_projection(v, k, n))
            maps.append(build_insertion(v, k, n))
            maps.append(build_epsilon1(v, k, n))
            maps.append(build_epsilon(v, k, n))
        maps.append(build_beta1(k - 2, n - 1, k, n))
        maps.append(build_reorder(k - 2, n - 1, k=k, n=n))
        maps.append(build_reorder(k - 2, n - 1, crossed=True, k=k, n=n))
        maps.append(build_connector("sigma", k=k, n=n, level="source"))
        maps.append(build_connector("alpha", k=k, n=n, level="source"))
        maps.append(build_connector("pi", k=k, n=n, level="target"))
        maps.append(build_connector("iota", k=k, n=n, level="target"))
        maps.append(build_connector("sigma", k=k, n=n, level="kernel"))
        maps.append(build_connector("alpha", k=k, n=n, level="kernel"))
    return maps


# triplet export ---------------------------------------------------------


def write_triplets(handle: MapHandle, out: TextIO | str | Path) -> None:
    """Header ``name k n rows cols`` then one ``row col value`` line per entry."""
    M = handle.matrix
    lines = [f"{handle.name} {handle.k} {handle.n} {M.n_rows} {M.n_cols}"]
    lines += [f"{i} {j} {v}" for i, j, v in M.entries()]
    text = "\n".join(lines) + "\n"
    if isinstance(out, (str, Path)):
        Path(out).write_text(text)
    else:
        out.write(text)


def read_triplets(src: TextIO | str | Path) -> tuple[dict, SparseMat]:
    text = Path(src).read_text() if isinstance(src, (str, Path)) else src.read()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    name, k, n, rows, cols = lines[0].split()
    trip = [tuple(int(x) for x in ln.split()) for ln in lines[1:]]
    header = {"name": name, "k": int(k), "n": int(n), "rows": int(rows), "cols": int(cols)}
    return header, SparseMat.from_triplets(int(rows), int(cols), trip)
