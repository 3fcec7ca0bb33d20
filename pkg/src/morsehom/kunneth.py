"""Products of Morse complexes and the Kunneth cross-check.

Critical points of f1 + f2 on M1 x M2 are the pairs of critical points, with
index the sum of the indices. A flow line between pairs of consecutive index
moves in exactly one factor, so the product boundary is

    d(x (x) y) = dx (x) y + (-1)^|x| x (x) dy.
"""

from __future__ import annotations

from dataclasses import dataclass

from .chain_complex import CriticalPointId, MorseComplex, SignedCount, build_complex, homology
from .errors import BoundarySquareNonzero, MorseHomologyError, TorsionNotSupported
from .int_linalg import HomologyGroup


@dataclass(frozen=True)
class ProductGenerator:
    first: CriticalPointId
    second: CriticalPointId

    @property
    def index(self) -> int:
        return self.first.index + self.second.index

    @property
    def label(self) -> str:
        return f"({self.first.label},{self.second.label})"

    def as_id(self) -> CriticalPointId:
        return CriticalPointId(self.label, self.index)


@dataclass(frozen=True)
class TensorSummand:
    degree_pair: tuple[int, int]
    group: HomologyGroup


def product_generators(c1: MorseComplex, c2: MorseComplex) -> list[ProductGenerator]:
    """All pairs, grouped by total degree, then lexicographic in
    (degree of first, position of first, position of second)."""
    out = []
    for k in range(c1.dimension + c2.dimension + 1):
        for i in range(max(0, k - c2.dimension), min(c1.dimension, k) + 1):
            for x in c1.generators[i]:
                for y in c2.generators[k - i]:
                    out.append(ProductGenerator(x, y))
    return out


def product_complex(c1: MorseComplex, c2: MorseComplex) -> MorseComplex:
    gens = product_generators(c1, c2)
    counts = []
    for g in gens:
        x, y = g.first, g.second
        i1, p1 = c1.position(x.label)
        i2, p2 = c2.position(y.label)
        if i1 > 0:
            col = c1.boundaries[i1].column(p1)
            for x2, v in zip(c1.generators[i1 - 1], col):
                if v:
                    counts.append(SignedCount(g.label, ProductGenerator(x2, y).label, v))
        if i2 > 0:
            sign = -1 if i1 % 2 else 1
            col = c2.boundaries[i2].column(p2)
            for y2, v in zip(c2.generators[i2 - 1], col):
                if v:
                    counts.append(SignedCount(g.label, ProductGenerator(x, y2).label, sign * v))
    try:
        return build_complex(c1.dimension + c2.dimension, [g.as_id() for g in gens], counts)
    except BoundarySquareNonzero as e:
        raise MorseHomologyError(f"internal error: product of valid complexes failed d^2 = 0 ({e})") from e


def kunneth_groups(h1: list[HomologyGroup], h2: list[HomologyGroup], k: int) -> list[TensorSummand]:
    """Summands H_i (x) H_j with i + j = k, both nonzero; free factors only."""
    out = []
    for i in range(max(0, k - len(h2) + 1), min(len(h1) - 1, k) + 1):
        a, b = h1[i], h2[k - i]
        if a.torsion or b.torsion:
            raise TorsionNotSupported(
                f"H_{i} = {a} and H_{k - i} = {b}: tensor products with torsion are not handled"
            )
        if a.free_rank and b.free_rank:
            out.append(TensorSummand((i, k - i), HomologyGroup(a.free_rank * b.free_rank)))
    return out


@dataclass(frozen=True)
class KunnethReport:
    direct_ranks: tuple[int, ...]
    predicted_ranks: tuple[int, ...] | None
    skipped_reason: str | None = None

    @property
    def agreement(self) -> tuple[bool, ...]:
        if self.predicted_ranks is None:
            return ()
        return tuple(a == b for a, b in zip(self.direct_ranks, self.predicted_ranks))

    @property
    def consistent(self) -> bool:
        return self.predicted_ranks is not None and all(self.agreement)


def verify_kunneth(c1: MorseComplex, c2: MorseComplex) -> KunnethReport:
    prod = product_complex(c1, c2)
    direct = tuple(g.free_rank for g in homology(prod))
    h1, h2 = homology(c1), homology(c2)
    try:
        predicted = tuple(
            sum(s.group.free_rank for s in kunneth_groups(h1, h2, k))
            for k in range(prod.dimension + 1)
        )
    except TorsionNotSupported as e:
        return KunnethReport(direct, None, f"skipped (torsion): {e}")
    return KunnethReport(direct, predicted)
