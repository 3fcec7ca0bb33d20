"""Exact integer linear algebra: Smith normal form and homology of a pair of maps.

Everything is done with Python ``int`` so there is no overflow anywhere on the
pivot path; matrices here are small and dense.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import CompositionNonzero, DimensionMismatch


@dataclass(frozen=True)
class IntMatrix:
    """Dense row-major matrix of arbitrary-precision integers."""

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise DimensionMismatch(f"negative shape {self.rows}x{self.cols}")
        if len(self.entries) != self.rows * self.cols:
            raise DimensionMismatch(
                f"{len(self.entries)} entries for a {self.rows}x{self.cols} matrix"
            )
        for x in self.entries:
            if not isinstance(x, int) or isinstance(x, bool):
                raise TypeError(f"entries must be int, got {type(x).__name__}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> IntMatrix:
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise DimensionMismatch("ragged rows")
        return cls(len(rows), cols, tuple(int(x) for r in rows for x in r))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(ij)
        return self.entries[i * self.cols + j]

    def to_rows(self) -> list[list[int]]:
        c = self.cols
        return [list(self.entries[i * c:(i + 1) * c]) for i in range(self.rows)]

    def column(self, j: int) -> list[int]:
        return [self[i, j] for i in range(self.rows)]

    def transpose(self) -> IntMatrix:
        return IntMatrix(
            self.cols, self.rows,
            tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)),
        )

    def is_zero(self) -> bool:
        return not any(self.entries)

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        a = self.to_rows()
        bt = other.transpose().to_rows()
        return IntMatrix(
            self.rows, other.cols,
            tuple(sum(x * y for x, y in zip(r, c)) for r in a for c in bt),
        )

    def __neg__(self) -> IntMatrix:
        return IntMatrix(self.rows, self.cols, tuple(-x for x in self.entries))

    def determinant(self) -> int:
        """Exact determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise DimensionMismatch("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        m = self.to_rows()
        sign, prev = 1, 1
        for k in range(n - 1):
            if m[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
                if swap is None:
                    return 0
                m[k], m[swap] = m[swap], m[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            prev = m[k][k]
        return sign * m[n - 1][n - 1]

    def __str__(self) -> str:
        if self.rows == 0 or self.cols == 0:
            return f"<{self.rows}x{self.cols} empty>"
        rows = self.to_rows()
        w = max(len(str(x)) for x in self.entries)
        return "\n".join("[" + " ".join(str(x).rjust(w) for x in r) + "]" for r in rows)


@dataclass(frozen=True)
class SmithDecomposition:
    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    diag: tuple[int, ...]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diag if d != 0)

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return tuple(d for d in self.diag if d != 0)


def _smallest_pivot(a, t, m, n):
    best = None
    for i in range(t, m):
        row = a[i]
        for j in range(t, n):
            x = row[j]
            if x != 0 and (best is None or abs(x) < best[0]):
                best = (abs(x), i, j)
    return best


def smith_normal_form(A: IntMatrix) -> SmithDecomposition:
    """Return U, D, V with ``U @ A @ V == D``, U and V unimodular.

    The pivot at each stage is the smallest nonzero |entry| of the remaining
    block, ties broken by (row, col). Diagonal entries come out nonnegative
    and each divides the next.
    """
    m, n = A.rows, A.cols
    a = A.to_rows()
    u = IntMatrix.identity(m).to_rows()
    # V is kept transposed so column operations become row operations
    vt = IntMatrix.identity(n).to_rows()

    def add_row(dst, src, q):
        if q:
            ra, rs = a[dst], a[src]
            for j in range(n):
                ra[j] -= q * rs[j]
            ua, us = u[dst], u[src]
            for j in range(m):
                ua[j] -= q * us[j]

    def add_col(dst, src, q):
        if q:
            for row in a:
                row[dst] -= q * row[src]
            va, vs = vt[dst], vt[src]
            for j in range(n):
                va[j] -= q * vs[j]

    for t in range(min(m, n)):
        while True:
            piv = _smallest_pivot(a, t, m, n)
            if piv is None:
                break
            _, pi, pj = piv
            if pi != t:
                a[t], a[pi] = a[pi], a[t]
                u[t], u[pi] = u[pi], u[t]
            if pj != t:
                for row in a:
                    row[t], row[pj] = row[pj], row[t]
                vt[t], vt[pj] = vt[pj], vt[t]
            p = a[t][t]
            for i in range(t + 1, m):
                add_row(i, t, a[i][t] // p)
            for j in range(t + 1, n):
                add_col(j, t, a[t][j] // p)
            if any(a[i][t] for i in range(t + 1, m)) or any(a[t][j] for j in range(t + 1, n)):
                continue
            bad = next(
                (i for i in range(t + 1, m) if any(a[i][j] % p for j in range(t + 1, n))),
                None,
            )
            if bad is None:
                break
            # pull the offending row into row t; the next pass finds a smaller pivot
            add_row(t, bad, -1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]

    D = IntMatrix.from_rows(a, n)
    U = IntMatrix.from_rows(u, m)
    V = IntMatrix.from_rows(vt, n).transpose()
    diag = tuple(a[i][i] for i in range(min(m, n)))
    return SmithDecomposition(U=U, D=D, V=V, diag=diag)


def rank(A: IntMatrix) -> int:
    return smith_normal_form(A).rank


@dataclass(frozen=True)
class HomologyGroup:
    """Finitely generated abelian group Z^free_rank + sum of Z/t."""

    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        t = tuple(int(x) for x in self.torsion)
        if any(x < 2 for x in t):
            raise ValueError(f"torsion coefficients must be >= 2: {t}")
        if any(t[i + 1] % t[i] for i in range(len(t) - 1)):
            raise ValueError(f"torsion coefficients must form a divisibility chain: {t}")
        object.__setattr__(self, "torsion", t)

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def is_free(self) -> bool:
        return not self.torsion

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{t}" for t in self.torsion)
        return " + ".join(parts) if parts else "0"


def homology_at(d_k: IntMatrix, d_k_plus_1: IntMatrix) -> HomologyGroup:
    """ker(d_k) / im(d_{k+1}) for ``d_k: Z^n -> Z^a`` and ``d_{k+1}: Z^b -> Z^n``."""
    if d_k.cols != d_k_plus_1.rows:
        raise DimensionMismatch(
            f"d_k has {d_k.cols} columns but d_k+1 has {d_k_plus_1.rows} rows"
        )
    if not (d_k @ d_k_plus_1).is_zero():
        raise CompositionNonzero("d_k . d_k+1 != 0")
    n = d_k.cols
    snf_out = smith_normal_form(d_k_plus_1)
    # ker(d_k) is saturated in Z^n, so the torsion of ker/im is that of Z^n/im
    free = n - rank(d_k) - snf_out.rank
    torsion = tuple(d for d in snf_out.invariant_factors if d > 1)
    return HomologyGroup(free, torsion)

