"""Orientation algebra on ordered frames, and the broken-trajectory check.

A frame is an ordered list of linearly independent vectors; two frames with
the same span are compared by the sign of the determinant of the change of
basis between them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import subspace_angles

from .chain_complex import MorseComplex
from .errors import DependentFrames, SpanMismatch

GRAM_TOL = 1e-12
SPAN_ANGLE_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class OrientedFrame:
    vectors: np.ndarray  # shape (k, d), one vector per row
    space_dim: int

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=float)
        if v.size == 0:
            v = v.reshape(0, self.space_dim)
        if v.ndim != 2 or v.shape[1] != self.space_dim:
            raise ValueError(f"frame of shape {v.shape} in dimension {self.space_dim}")
        if v.shape[0] > 0:
            scale = np.prod(np.sum(v * v, axis=1))
            if scale == 0 or np.linalg.det(v @ v.T) / scale < GRAM_TOL:
                raise DependentFrames("frame vectors are linearly dependent")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @classmethod
    def of(cls, *vectors) -> OrientedFrame:
        v = np.array(vectors, dtype=float)
        return cls(v, v.shape[1])

    @classmethod
    def empty(cls, space_dim: int) -> OrientedFrame:
        return cls(np.zeros((0, space_dim)), space_dim)

    def __len__(self):
        return self.vectors.shape[0]

    def negated(self, i: int = 0) -> OrientedFrame:
        v = self.vectors.copy()
        v[i] = -v[i]
        return OrientedFrame(v, self.space_dim)


def concat(a: OrientedFrame, b: OrientedFrame) -> OrientedFrame:
    """Direct-sum orientation: a's vectors followed by b's."""
    if a.space_dim != b.space_dim:
        raise ValueError("frames live in different spaces")
    return OrientedFrame(np.vstack([a.vectors, b.vectors]), a.space_dim)


def compare_sign(a: OrientedFrame, b: OrientedFrame) -> int:
    """+1 if a and b induce the same orientation on their common span, else -1."""
    if len(a) != len(b) or a.space_dim != b.space_dim:
        raise SpanMismatch(f"frames of sizes {len(a)} and {len(b)} cannot be compared")
    if len(a) == 0:
        return 1
    if np.max(subspace_angles(a.vectors.T, b.vectors.T)) > SPAN_ANGLE_TOL:
        raise SpanMismatch("frames span different subspaces")
    # a = C b, solved in the least-squares sense on the common span
    c, *_ = np.linalg.lstsq(b.vectors.T, a.vectors.T, rcond=None)
    det = np.linalg.det(c)
    return 1 if det > 0 else -1


@dataclass(frozen=True)
class BrokenPair:
    source: str
    target: str
    contributions: tuple[tuple[str, int], ...]  # (intermediate, N(s,m) * N(m,t))

    @property
    def total(self) -> int:
        return sum(v for _, v in self.contributions)


@dataclass(frozen=True)
class CancellationReport:
    pairs: tuple[BrokenPair, ...]

    @property
    def violations(self) -> tuple[BrokenPair, ...]:
        return tuple(p for p in self.pairs if p.total != 0)

    @property
    def passed(self) -> bool:
        return not self.violations

    def lines(self) -> list[str]:
        out = []
        for p in self.pairs:
            terms = " + ".join(f"{v}[{m}]" for m, v in p.contributions) or "0"
            flag = "ok" if p.total == 0 else "FAIL"
            out.append(f"{p.source} -> {p.target}: {terms} = {p.total}  {flag}")
        return out


def broken_pair_cancellation(c: MorseComplex) -> CancellationReport:
    """For each (xi, zeta) with index gap 2, list N(xi,g) N(g,zeta) over
    intermediate g; the ends of the 1-dimensional moduli space cancel in pairs
    exactly when these sum to zero.

    Counts are looked up entry by entry, independent of the matrix product
    used when the complex was built.
    """
    pairs = []
    for k in range(2, c.dimension + 1):
        for xi in c.generators[k]:
            for zeta in c.generators[k - 2]:
                contrib = []
                for g in c.generators[k - 1]:
                    a = c.coefficient(xi.label, g.label)
                    b = c.coefficient(g.label, zeta.label)
                    contrib.append((g.label, a * b))
                pairs.append(BrokenPair(xi.label, zeta.label, tuple(contrib)))
    return CancellationReport(tuple(pairs))


def cancellation_from_counts(generators, counts) -> CancellationReport:
    """Same check on raw (unvalidated) generator/count lists, for data that
    cannot be turned into a complex because d^2 != 0."""
    n = {}
    for s in counts:
        n[(s.source, s.target)] = n.get((s.source, s.target), 0) + s.value
    by_index: dict[int, list[str]] = {}
    for g in generators:
        by_index.setdefault(g.index, []).append(g.label)
    pairs = []
    for k in sorted(by_index):
        for xi in by_index[k]:
            for zeta in by_index.get(k - 2, []):
                contrib = []
                for g in by_index.get(k - 1, []):
                    contrib.append((g, n.get((xi, g), 0) * n.get((g, zeta), 0)))
                pairs.append(BrokenPair(xi, zeta, tuple(contrib)))
    return CancellationReport(tuple(pairs))
