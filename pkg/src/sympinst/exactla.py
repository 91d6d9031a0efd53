"""Exact linear algebra over the rationals and prime fields.

Matrices are stored column-wise as dicts of nonzero integer entries.  Ranks
over Q come from a sparse fraction-free elimination; ranks modulo large
primes go through FLINT's ``nmod_mat`` on dense blocks.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Mapping, Sequence

import flint

__all__ = [
    "Config",
    "DEFAULT_CONFIG",
    "ResourceLimitError",
    "BlockLeakageError",
    "SparseMat",
    "RankResult",
    "rank_exact",
    "rank_modular",
    "kernel_basis",
    "block_ranks",
    "block_rank_result",
    "random_primes",
]


class ResourceLimitError(RuntimeError):
    """Matrix exceeds the configured workspace bound."""


class BlockLeakageError(ValueError):
    """A column block maps into more than one row block."""


@dataclass(frozen=True)
class Config:
    dense_bound: int = 5000
    prime_bits: int = 50
    # dense modular workspace, in matrix cells
    modular_cell_bound: int = 60_000_000


DEFAULT_CONFIG = Config()


class SparseMat:
    """Immutable integer matrix with column-major dict storage."""

    __slots__ = ("n_rows", "n_cols", "_cols")

    def __init__(self, n_rows: int, n_cols: int, cols: Sequence[Mapping[int, int]] | None = None):
        if n_rows < 0 or n_cols < 0:
            raise ValueError("negative shape")
        self.n_rows = n_rows
        self.n_cols = n_cols
        if cols is None:
            self._cols = tuple({} for _ in range(n_cols))
        else:
            if len(cols) != n_cols:
                raise ValueError(f"expected {n_cols} columns, got {len(cols)}")
            out = []
            for col in cols:
                clean = {}
                for r, v in col.items():
                    if not 0 <= r < n_rows:
                        raise IndexError(f"row {r} out of range for {n_rows} rows")
                    if v:
                        clean[r] = int(v)
                out.append(clean)
            self._cols = tuple(out)

    # construction -------------------------------------------------------

    @classmethod
    def from_triplets(cls, n_rows: int, n_cols: int, triplets: Iterable[tuple[int, int, int]]) -> "SparseMat":
        cols: list[dict[int, int]] = [{} for _ in range(n_cols)]
        for r, c, v in triplets:
            if not (0 <= r < n_rows and 0 <= c < n_cols):
                raise IndexError(f"entry ({r}, {c}) out of bounds for {n_rows}x{n_cols}")
            if r in cols[c]:
                raise ValueError(f"duplicate entry ({r}, {c})")
            cols[c][r] = v
        return cls(n_rows, n_cols, cols)

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence[int]], n_cols: int | None = None) -> "SparseMat":
        n_rows = len(rows)
        if n_cols is None:
            n_cols = len(rows[0]) if rows else 0
        cols: list[dict[int, int]] = [{} for _ in range(n_cols)]
        for i, row in enumerate(rows):
            if len(row) != n_cols:
                raise ValueError("ragged dense matrix")
            for j, v in enumerate(row):
                if v:
                    cols[j][i] = v
        return cls(n_rows, n_cols, cols)

    @classmethod
    def identity(cls, n: int) -> "SparseMat":
        return cls(n, n, [{i: 1} for i in range(n)])

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int) -> "SparseMat":
        return cls(n_rows, n_cols)

    # access -------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    def column(self, j: int) -> dict[int, int]:
        return dict(self._cols[j])

    def columns(self) -> tuple[Mapping[int, int], ...]:
        return self._cols

    def rows(self) -> list[dict[int, int]]:
        out: list[dict[int, int]] = [{} for _ in range(self.n_rows)]
        for j, col in enumerate(self._cols):
            for i, v in col.items():
                out[i][j] = v
        return out

    def entries(self) -> list[tuple[int, int, int]]:
        """Nonzero entries as (row, col, value), sorted by (row, col)."""
        trip = [(i, j, v) for j, col in enumerate(self._cols) for i, v in col.items()]
        trip.sort()
        return trip

    @property
    def nnz(self) -> int:
        return sum(len(c) for c in self._cols)

    def is_zero(self) -> bool:
        return all(not c for c in self._cols)

    def get(self, i: int, j: int) -> int:
        return self._cols[j].get(i, 0)

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.n_cols for _ in range(self.n_rows)]
        for j, col in enumerate(self._cols):
            for i, v in col.items():
                out[i][j] = v
        return out

    def max_abs(self) -> int:
        return max((abs(v) for c in self._cols for v in c.values()), default=0)

    # algebra ------------------------------------------------------------

    @property
    def T(self) -> "SparseMat":
        return SparseMat(self.n_cols, self.n_rows, self.rows())

    def __matmul__(self, other: "SparseMat") -> "SparseMat":
        if self.n_cols != other.n_rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = []
        mine = self._cols
        for col in other._cols:
            acc: dict[int, int] = {}
            for k, b in col.items():
                for i, a in mine[k].items():
                    acc[i] = acc.get(i, 0) + a * b
            cols.append(acc)
        return SparseMat(self.n_rows, other.n_cols, cols)

    def _combine(self, other: "SparseMat", sign: int) -> "SparseMat":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        cols = []
        for a, b in zip(self._cols, other._cols):
            acc = dict(a)
            for i, v in b.items():
                acc[i] = acc.get(i, 0) + sign * v
            cols.append(acc)
        return SparseMat(self.n_rows, self.n_cols, cols)

    def __add__(self, other: "SparseMat") -> "SparseMat":
        return self._combine(other, 1)

    def __sub__(self, other: "SparseMat") -> "SparseMat":
        return self._combine(other, -1)

    def __neg__(self) -> "SparseMat":
        return self.scale(-1)

    def scale(self, c: int) -> "SparseMat":
        return SparseMat(self.n_rows, self.n_cols, [{i: c * v for i, v in col.items()} for col in self._cols])

    def __mul__(self, c: int) -> "SparseMat":
        return self.scale(c)

    __rmul__ = __mul__

    def apply(self, vec: Mapping[int, int] | Sequence[int]) -> dict[int, int]:
        """Matrix-vector product; vectors are dicts or dense sequences."""
        items = vec.items() if isinstance(vec, Mapping) else enumerate(vec)
        acc: dict[int, int] = {}
        for k, b in items:
            if b:
                for i, a in self._cols[k].items():
                    acc[i] = acc.get(i, 0) + a * b
        return {i: v for i, v in acc.items() if v}

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "SparseMat":
        pos = {r: i for i, r in enumerate(rows)}
        out = []
        for j in cols:
            out.append({pos[i]: v for i, v in self._cols[j].items() if i in pos})
        return SparseMat(len(rows), len(cols), out)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseMat):
            return NotImplemented
        return self.shape == other.shape and self._cols == other._cols

    def __hash__(self) -> int:
        return hash((self.n_rows, self.n_cols, tuple(tuple(sorted(c.items())) for c in self._cols)))

    def __repr__(self) -> str:
        return f"SparseMat({self.n_rows}x{self.n_cols}, nnz={self.nnz})"


@dataclass(frozen=True)
class RankResult:
    rank: int
    method: str  # "exact_elimination" | "multimodular"
    primes_used: tuple[int, ...] = field(default_factory=tuple)
    agreed: bool = True


# fraction-free elimination ----------------------------------------------


def _normalize(row: dict[int, int]) -> None:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return
    if g > 1:
        for j in row:
            row[j] //= g


class _Eliminator:
    """Sparse fraction-free elimination with Markowitz-style pivoting.

    Row updates are ``r <- a_p * r - a_r * p`` followed by removal of the row
    content, so every intermediate stays integral and no division by a
    pivot ever happens.  With ``reduce_all`` the pivot column is cleared
    from previously chosen pivot rows too (Gauss-Jordan form).
    """

    # columns inspected per pivot search
    SEARCH_WIDTH = 8

    def __init__(self, rows: list[dict[int, int]], reduce_all: bool = False):
        self.rows = [dict(r) for r in rows]
        self.reduce_all = reduce_all
        self.active: dict[int, set[int]] = {}
        self.done: dict[int, set[int]] = {}
        for i, r in enumerate(self.rows):
            for j in r:
                self.active.setdefault(j, set()).add(i)
        self.heap = [(len(s), j) for j, s in self.active.items()]
        heapq.heapify(self.heap)
        self.pivots: list[tuple[int, int]] = []  # (row, col)

    def _pop_candidates(self) -> list[int]:
        found: list[int] = []
        best = None
        stash = []
        while self.heap and len(found) < self.SEARCH_WIDTH:
            cnt, j = heapq.heappop(self.heap)
            cur = len(self.active.get(j, ()))
            if cur != cnt or cur == 0 or j in found:
                if cur and cur != cnt:
                    heapq.heappush(self.heap, (cur, j))
                continue
            if best is None:
                best = cnt
            elif cnt != best:
                stash.append((cnt, j))
                break
            found.append(j)
        for item in stash:
            heapq.heappush(self.heap, item)
        return found

    def _choose(self) -> tuple[int, int] | None:
        cands = self._pop_candidates()
        if not cands:
            return None
        best_key = None
        best = None
        for j in cands:
            cj = len(self.active[j])
            for i in self.active[j]:
                key = ((len(self.rows[i]) - 1) * (cj - 1), i, j)
                if best_key is None or key < best_key:
                    best_key, best = key, (i, j)
        for j in cands:
            if best is not None and j == best[1]:
                continue
            heapq.heappush(self.heap, (len(self.active[j]), j))
        return best

    def _touch(self, j: int, i: int, present: bool, is_done: bool) -> None:
        table = self.done if is_done else self.active
        s = table.get(j)
        if present:
            if s is None:
                s = table[j] = set()
            s.add(i)
        elif s is not None:
            s.discard(i)
        if not is_done and s is not None:
            heapq.heappush(self.heap, (len(s), j))

    def _update(self, i: int, p: int, c: int, is_done: bool) -> None:
        row = self.rows[i]
        prow = self.rows[p]
        a_p = prow[c]
        a_i = row[c]
        g = gcd(a_p, a_i)
        mp, mi = a_p // g, a_i // g
        before = set(row)
        new = {j: mp * v for j, v in row.items()} if mp != 1 else dict(row)
        for j, v in prow.items():
            nv = new.get(j, 0) - mi * v
            if nv:
                new[j] = nv
            else:
                new.pop(j, None)
        _normalize(new)
        self.rows[i] = new
        after = set(new)
        for j in before - after:
            self._touch(j, i, False, is_done)
        for j in after - before:
            self._touch(j, i, True, is_done)

    def run(self, limit: int | None = None) -> list[tuple[int, int]]:
        while limit is None or len(self.pivots) < limit:
            choice = self._choose()
            if choice is None:
                break
            p, c = choice
            for i in sorted(self.active[c] - {p}):
                self._update(i, p, c, False)
            if self.reduce_all:
                for i in sorted(self.done.get(c, set())):
                    self._update(i, p, c, True)
            # retire pivot row from the active set
            for j in self.rows[p]:
                self.active[j].discard(p)
                heapq.heappush(self.heap, (len(self.active[j]), j))
                if self.reduce_all:
                    self.done.setdefault(j, set()).add(p)
            self.pivots.append((p, c))
        return self.pivots


def _check_bound(M: SparseMat, config: Config) -> None:
    if M.n_rows > config.dense_bound or M.n_cols > config.dense_bound:
        raise ResourceLimitError(
            f"{M.n_rows}x{M.n_cols} exceeds exact workspace bound {config.dense_bound}"
        )


def _elim_rows(M: SparseMat) -> list[dict[int, int]]:
    # eliminate along the smaller dimension
    return M.rows() if M.n_rows <= M.n_cols else [dict(c) for c in M.columns()]


def rank_exact(M: SparseMat, config: Config = DEFAULT_CONFIG) -> int:
    """Rank over Q by fraction-free sparse elimination."""
    _check_bound(M, config)
    if M.n_rows == 0 or M.n_cols == 0:
        return 0
    return len(_Eliminator(_elim_rows(M)).run())


def kernel_basis(M: SparseMat, config: Config = DEFAULT_CONFIG) -> list[list[int]]:
    """Primitive integer basis of the right kernel, one vector per free column."""
    _check_bound(M, config)
    n = M.n_cols
    if M.n_rows == 0:
        return [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    el = _Eliminator(M.rows(), reduce_all=True)
    pivots = el.run()
    pivot_cols = {c: p for p, c in pivots}
    basis = []
    for f in range(n):
        if f in pivot_cols:
            continue
        involved = [(c, el.rows[p]) for c, p in pivot_cols.items() if f in el.rows[p]]
        scale = 1
        for c, row in involved:
            d = row[c]
            scale = scale * abs(d) // gcd(scale, abs(d))
        vec = [0] * n
        vec[f] = scale
        for c, row in involved:
            vec[c] = -scale * row[f] // row[c]
        g = 0
        for v in vec:
            g = gcd(g, v)
        lead = next(v for v in vec if v)
        if lead < 0:
            g = -g
        basis.append([v // g for v in vec])
    return basis


# modular ranks ----------------------------------------------------------


def random_primes(count: int, seed: int, bits: int = DEFAULT_CONFIG.prime_bits) -> list[int]:
    """``count`` distinct primes of bit length ``bits``, reproducible from ``seed``."""
    if bits > 62:
        raise ValueError("primes must fit a machine word")
    rng = random.Random(seed)
    out: list[int] = []
    while len(out) < count:
        x = rng.randrange(1 << (bits - 1), 1 << bits) | 1
        while not flint.fmpz(x).is_prime():
            x += 2
        if x >= 1 << bits:
            continue
        if x not in out:
            out.append(x)
    return out


def _rank_mod_p(M: SparseMat, p: int) -> int:
    if M.n_rows == 0 or M.n_cols == 0:
        return 0
    # FLINT wants rows; transpose when that is smaller
    if M.n_rows <= M.n_cols:
        dense = [[0] * M.n_cols for _ in range(M.n_rows)]
        for j, col in enumerate(M.columns()):
            for i, v in col.items():
                dense[i][j] = v % p
    else:
        dense = [[0] * M.n_rows for _ in range(M.n_cols)]
        for j, col in enumerate(M.columns()):
            row = dense[j]
            for i, v in col.items():
                row[i] = v % p
    return flint.nmod_mat(dense, p).rank()


def _modular_from_primes(M: SparseMat, primes: Sequence[int], config: Config) -> RankResult:
    if M.n_rows * M.n_cols > config.modular_cell_bound:
        raise ResourceLimitError(
            f"{M.n_rows}x{M.n_cols} exceeds modular workspace bound {config.modular_cell_bound} cells"
        )
    ranks = [_rank_mod_p(M, p) for p in primes]
    return RankResult(max(ranks), "multimodular", tuple(primes), len(set(ranks)) == 1)


def rank_modular(M: SparseMat, prime_count: int = 3, seed: int = 0, config: Config = DEFAULT_CONFIG) -> RankResult:
    """Rank modulo several random word-size primes.

    Rank mod p never exceeds the rank over Q, so the maximum is a certified
    lower bound; ``agreed`` reports whether every prime gave the same value.
    """
    if prime_count < 2:
        raise ValueError("prime_count must be at least 2")
    return _modular_from_primes(M, random_primes(prime_count, seed, config.prime_bits), config)


# weight blocks ----------------------------------------------------------


def _as_blocks(partition) -> list[list[int]]:
    if isinstance(partition, Mapping):
        return [list(v) for v in partition.values()]
    return [list(b) for b in partition]


def _pair_blocks(M: SparseMat, row_partition, col_partition) -> list[tuple[list[int], list[int]]]:
    row_blocks = _as_blocks(row_partition)
    col_blocks = _as_blocks(col_partition)
    owner = {}
    for b, rows in enumerate(row_blocks):
        for r in rows:
            if r in owner:
                raise ValueError(f"row {r} in two blocks")
            owner[r] = b
    if len(owner) != M.n_rows:
        raise ValueError("row partition does not cover all rows")
    seen = set()
    for cols in col_blocks:
        for c in cols:
            if c in seen:
                raise ValueError(f"column {c} in two blocks")
            seen.add(c)
    if len(seen) != M.n_cols:
        raise ValueError("column partition does not cover all columns")

    merged: dict[int, list[int]] = {}
    for cols in col_blocks:
        targets = {owner[r] for c in cols for r in M.columns()[c]}
        if len(targets) > 1:
            raise BlockLeakageError(f"column block {cols[:4]}... hits row blocks {sorted(targets)}")
        if targets:
            merged.setdefault(targets.pop(), []).extend(cols)
    return [(row_blocks[b], sorted(cols)) for b, cols in sorted(merged.items())]


def block_rank_result(
    M: SparseMat,
    row_partition,
    col_partition,
    engine: str = "exact",
    prime_count: int = 3,
    seed: int = 0,
    config: Config = DEFAULT_CONFIG,
) -> RankResult:
    """Sum of per-block ranks; blocks are submatrices cut out by the partitions."""
    pairs = _pair_blocks(M, row_partition, col_partition)
    if engine == "exact":
        total = sum(rank_exact(M.submatrix(r, c), config) for r, c in pairs)
        return RankResult(total, "exact_elimination")
    if engine != "multimodular":
        raise ValueError(f"unknown engine {engine!r}")
    primes = random_primes(prime_count, seed, config.prime_bits)
    total = 0
    agreed = True
    for r, c in pairs:
        res = _modular_from_primes(M.submatrix(r, c), primes, config)
        total += res.rank
        agreed = agreed and res.agreed
    return RankResult(total, "multimodular", tuple(primes), agreed)


def block_ranks(M: SparseMat, row_partition, col_partition, engine: str = "exact", **kw) -> int:
    return block_rank_result(M, row_partition, col_partition, engine, **kw).rank
