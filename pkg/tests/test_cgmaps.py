from __future__ import annotations

import io

import pytest

from oracles import phi_oracle_kernel
from sympinst.cgmaps import (
    EPSILON_CANDIDATES,
    VARIANTS,
    all_maps,
    build_beta,
    build_connector,
    build_epsilon,
    build_mu,
    build_phi_dual,
    build_phi_dual_composed,
    read_triplets,
    select_epsilon_candidate,
    write_triplets,
)
from sympinst.cohom import compute_h2, equivariance_failures, weight_failures
from sympinst.exactla import SparseMat, rank_exact
from sympinst.repmod import SymU, Tensor, V, dimension, enumerate_basis, render_label


def image(handle, j):
    tl = enumerate_basis(handle.target).labels
    return sorted((render_label(handle.target, tl[i]), v) for i, v in handle.matrix.column(j).items())


def test_beta_example():
    b = build_beta(1, 1)
    assert b.matrix.shape == (8, 2)
    assert image(b, 0) == [("s|s@t", 1), ("t|s@s", -1)]
    for k, n in ((1, 1), (2, 2), (3, 2)):
        M = build_beta(k, n).matrix
        assert M.n_cols == k * 2 * n and M.n_rows == (k + 1) * 2 * (n + 1)
        assert rank_exact(M) == M.n_cols


def test_mu_example():
    m = build_mu(1, 1)
    j = enumerate_basis(m.source).index_of[(1, (1, 0))]
    assert image(m, j) == [("t@s*t", 1)]
    assert (build_mu(3, 2).matrix @ build_beta(3, 2).matrix).is_zero()
    assert rank_exact(build_mu(2, 2).matrix) == dimension(V(4)) == 10


def test_phi_sym_2_1_example():
    p = build_phi_dual("sym", 2, 1)
    assert p.matrix.shape == (18, 1)
    assert image(p, 0) == [
        ("[s].[s]|[s@t]^[t@t]", 1),
        ("[s].[t]|[s@s]^[t@t]", -1),
        ("[s].[t]|[s@t]^[t@s]", -1),
        ("[t].[t]|[s@s]^[t@s]", 1),
    ]


def test_phi_shapes_and_entries():
    p = build_phi_dual("sym", 4, 2)
    assert p.matrix.shape == (150, 66)
    assert compute_h2("sym", 4, 2) == 3
    assert compute_h2("tensor", 4, 2) == 12
    assert compute_h2("alt", 4, 2) == 9
    for v in ("sym", "tensor"):
        assert set(x for _, _, x in build_phi_dual(v, 5, 3).matrix.entries()) <= {-1, 1}
    # on a diagonal pair w.w the two mixed terms coincide and add
    alt = build_phi_dual("alt", 5, 3)
    labels = enumerate_basis(alt.source).labels
    for i, j, x in alt.matrix.entries():
        assert x in (-1, 1) or (abs(x) == 2 and labels[j][0] == labels[j][1])


@pytest.mark.parametrize("k,n", [(k, n) for k in range(2, 6) for n in range(1, 4)])
def test_phi_kernel_matches_oracle(k, n):
    for v in VARIANTS:
        assert compute_h2(v, k, n, engine="exact") == phi_oracle_kernel(v, k, n)


@pytest.mark.parametrize("k,n", [(2, 1), (3, 2), (4, 2), (5, 3)])
def test_phi_equals_projected_beta_square(k, n):
    for v in VARIANTS:
        assert build_phi_dual(v, k, n).matrix == build_phi_dual_composed(v, k, n).matrix


def test_epsilon_examples():
    assert build_epsilon("sym", 3, 2).matrix.n_cols == 0
    e = build_epsilon("sym", 4, 2).matrix
    assert e.n_cols == 3 and rank_exact(e) == 3
    e = build_epsilon("alt", 4, 2).matrix
    assert e.n_cols == 9 and rank_exact(e) == 9


@pytest.mark.parametrize("k,n", [(4, 2), (5, 3), (6, 2)])
def test_phi_eps_zero_canonical_pairing(k, n):
    for v in VARIANTS:
        eps = build_epsilon(v, k, n).matrix
        phi = build_phi_dual(v, k, n).matrix
        assert (phi @ eps).is_zero()
        assert rank_exact(eps) == eps.n_cols == compute_h2(v, k, n)


def test_candidate_selection():
    for v in VARIANTS:
        winner, flags = select_epsilon_candidate(v, 5, 3)
        assert winner == "crossed"
        assert set(flags) == set(EPSILON_CANDIDATES[v])
        assert [c for c, ok in flags.items() if ok] == ["crossed"]


def test_epsilon_entry_bound():
    # the alt map doubles on diagonal pairs and S^2 squares again
    vals = {x for _, _, x in build_epsilon("alt", 5, 3).matrix.entries()}
    assert vals <= set(range(-4, 5)) and max(map(abs, vals)) == 4
    for v in ("sym", "tensor"):
        assert {abs(x) for _, _, x in build_epsilon(v, 5, 3).matrix.entries()} <= {1, 2}


def test_connector_examples():
    W = Tensor(SymU(1), V(0))
    sigma, alpha, pi = (build_connector(c, W).matrix for c in ("sigma", "alpha", "pi"))
    assert (alpha @ sigma).is_zero()
    assert pi @ sigma == SparseMat.identity(10) * 2
    assert alpha.shape == (6, 16) and rank_exact(alpha) == 6
    iota = build_connector("iota", W).matrix
    assert (pi @ iota).is_zero()


@pytest.mark.parametrize("k,n", [(2, 1), (3, 2), (4, 2), (5, 3)])
def test_all_maps_equivariant(k, n):
    maps = all_maps(k, n)
    assert equivariance_failures(maps) == []
    assert weight_failures(maps) == []


def test_triplet_roundtrip(tmp_path):
    h = build_phi_dual("alt", 4, 2)
    buf = io.StringIO()
    write_triplets(h, buf)
    header, M = read_triplets(io.StringIO(buf.getvalue()))
    assert header == {"name": h.name, "k": 4, "n": 2, "rows": M.n_rows, "cols": M.n_cols}
    assert M == h.matrix
    write_triplets(h, tmp_path / "x.txt")
    assert read_triplets(tmp_path / "x.txt")[1] == h.matrix


def test_degenerate_sizes():
    for v in VARIANTS:
        h = build_phi_dual(v, 2, 1)
        assert h.matrix.shape == (dimension(h.target), dimension(h.source))
    with pytest.raises(ValueError):
        build_phi_dual("sym", 1, 1)
