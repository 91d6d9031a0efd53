from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import rank_flint, rank_fraction
from sympinst.cgmaps import build_phi_dual
from sympinst.exactla import (
    BlockLeakageError,
    Config,
    ResourceLimitError,
    SparseMat,
    block_rank_result,
    block_ranks,
    kernel_basis,
    random_primes,
    rank_exact,
    rank_modular,
)
from sympinst.repmod import weight_partition


def dense_matrices(max_dim=7, lo=-3, hi=3):
    return st.integers(1, max_dim).flatmap(
        lambda r: st.integers(1, max_dim).flatmap(
            lambda c: st.lists(st.lists(st.integers(lo, hi), min_size=c, max_size=c), min_size=r, max_size=r)))


def test_rank_examples():
    assert rank_exact(SparseMat.from_dense([[1, 2], [2, 4]])) == 1
    assert rank_exact(SparseMat.identity(3)) == 3
    assert rank_exact(SparseMat.zeros(4, 5)) == 0
    assert rank_exact(SparseMat.zeros(0, 3)) == 0


def test_rank_phi_sym_4_2_transposed():
    M = build_phi_dual("sym", 4, 2).matrix
    assert M.shape == (150, 66)
    assert rank_exact(M.T) == 63
    assert rank_flint(M.to_dense()) == 63


@settings(max_examples=150, deadline=None)
@given(dense_matrices())
def test_rank_matches_fraction_oracle(rows):
    M = SparseMat.from_dense(rows)
    assert rank_exact(M) == rank_fraction(rows)
    assert rank_exact(M.T) == rank_exact(M)


@settings(max_examples=60, deadline=None)
@given(dense_matrices(max_dim=6, lo=-1, hi=1))
def test_kernel_basis_annihilated_and_complete(rows):
    M = SparseMat.from_dense(rows)
    basis = kernel_basis(M)
    assert len(basis) == M.n_cols - rank_exact(M)
    for v in basis:
        assert not any(M.apply(v).values())
    if basis:
        assert rank_fraction(basis) == len(basis)


def test_kernel_basis_examples():
    assert kernel_basis(SparseMat.from_dense([[1, 1]])) == [[1, -1]]
    assert kernel_basis(build_phi_dual("sym", 3, 2).matrix) == []
    assert len(kernel_basis(build_phi_dual("tensor", 3, 2).matrix)) == 3


def test_resource_limit():
    cfg = Config(dense_bound=3)
    with pytest.raises(ResourceLimitError):
        rank_exact(SparseMat.identity(4), cfg)
    with pytest.raises(ResourceLimitError):
        kernel_basis(SparseMat.identity(4), cfg)


def test_modular_examples():
    r = rank_modular(SparseMat.identity(3), prime_count=3, seed=7)
    assert (r.rank, r.agreed) == (3, True)
    r = rank_modular(SparseMat.from_dense([[2, 0], [0, 2]]), prime_count=2, seed=1)
    assert all(p % 2 for p in r.primes_used) and r.rank == 2 and r.agreed
    M = build_phi_dual("sym", 5, 3).matrix
    r = rank_modular(M)
    assert r.agreed and r.rank == M.n_cols - 30 == rank_exact(M)


def test_modular_needs_two_primes():
    with pytest.raises(ValueError):
        rank_modular(SparseMat.identity(2), prime_count=1)


def test_random_primes_deterministic():
    a = random_primes(4, seed=3)
    assert a == random_primes(4, seed=3)
    assert len(set(a)) == 4 and all(p.bit_length() == 50 for p in a)


@settings(max_examples=60, deadline=None)
@given(dense_matrices(lo=-50, hi=50))
def test_modular_matches_exact(rows):
    M = SparseMat.from_dense(rows)
    assert rank_modular(M, seed=5).rank == rank_exact(M)


def test_block_ranks_examples():
    I4 = SparseMat.identity(4)
    single = [[i] for i in range(4)]
    assert block_ranks(I4, single, single) == 4
    assert block_ranks(SparseMat.zeros(3, 2), [[0, 1, 2]], [[0], [1]]) == 0
    h = build_phi_dual("sym", 4, 2)
    rows = weight_partition(h.target)
    cols = weight_partition(h.source)
    assert block_ranks(h.matrix, rows, cols) == 63 == rank_exact(h.matrix)
    res = block_rank_result(h.matrix, rows, cols, engine="multimodular", prime_count=3)
    assert res.rank == 63 and res.agreed


def test_block_leakage():
    M = SparseMat.from_dense([[1, 1], [0, 1]])
    with pytest.raises(BlockLeakageError):
        block_ranks(M, [[0], [1]], [[0], [1]])


def test_sparse_triplets_validation():
    with pytest.raises(ValueError):
        SparseMat.from_triplets(2, 2, [(0, 0, 1), (0, 0, 2)])
    with pytest.raises(IndexError):
        SparseMat.from_triplets(2, 2, [(2, 0, 1)])
    M = SparseMat.from_triplets(2, 3, [(0, 2, 5), (1, 0, 0)])
    assert M.nnz == 1 and M.get(0, 2) == 5


@settings(max_examples=40, deadline=None)
@given(dense_matrices(max_dim=5), dense_matrices(max_dim=5))
def test_matmul_against_dense(a, b):
    A, B = SparseMat.from_dense(a), SparseMat.from_dense([r[:] for r in b])
    if A.n_cols != B.n_rows:
        B = SparseMat.from_dense([[1] * B.n_cols for _ in range(A.n_cols)])
    Bd = B.to_dense()
    expect = [[sum(a[i][t] * Bd[t][j] for t in range(A.n_cols)) for j in range(B.n_cols)] for i in range(A.n_rows)]
    assert (A @ B).to_dense() == expect
