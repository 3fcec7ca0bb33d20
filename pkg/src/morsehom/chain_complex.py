"""The Morse complex over Z: generators are critical points graded by index, the
boundary is given by signed counts of flow lines between consecutive indices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import (
    BoundarySquareNonzero,
    ComplexError,
    DuplicateLabel,
    NonConsecutiveIndices,
    SerializationError,
    UnknownGenerator,
)
from .int_linalg import HomologyGroup, IntMatrix, homology_at


@dataclass(frozen=True)
class CriticalPointId:
    label: str
    index: int

    def __post_init__(self):
        if not isinstance(self.label, str) or not self.label:
            raise ComplexError(f"generator label must be a nonempty string: {self.label!r}")
        if not isinstance(self.index, int) or isinstance(self.index, bool) or self.index < 0:
            raise ComplexError(f"Morse index must be a nonnegative int: {self.index!r}")


@dataclass(frozen=True)
class SignedCount:
    """N(source, target), the signed number of flow lines source -> target."""

    source: str
    target: str
    value: int


@dataclass(frozen=True)
class MorseComplex:
    """Graded free abelian group on critical points with boundary matrices.

    ``generators[k]`` lists the degree-k generators in their fixed order;
    ``boundaries[k]`` is the matrix of d_k with columns indexed by degree k and
    rows by degree k-1 (``boundaries[0]`` is the 0 x n_0 zero map).
    ``counts`` keeps the input counts in their original order so the complex
    serializes back exactly.
    """

    dimension: int
    generators: tuple[tuple[CriticalPointId, ...], ...]
    boundaries: tuple[IntMatrix, ...]
    counts: tuple[SignedCount, ...] = field(default=(), compare=False)
    input_order: tuple[str, ...] = field(default=(), compare=False)

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(len(g) for g in self.generators)

    def boundary(self, k: int) -> IntMatrix:
        """d_k, with zero maps outside 0..dimension."""
        if 0 <= k <= self.dimension:
            return self.boundaries[k]
        if k == self.dimension + 1:
            return IntMatrix.zeros(self.ranks[self.dimension] if self.dimension >= 0 else 0, 0)
        raise IndexError(k)

    def all_generators(self) -> list[CriticalPointId]:
        return [g for gens in self.generators for g in gens]

    def listed_generators(self) -> list[CriticalPointId]:
        """Generators in the order they were supplied (degree order if unknown)."""
        gens = self.all_generators()
        if sorted(self.input_order) != sorted(g.label for g in gens):
            return gens
        by_label = {g.label: g for g in gens}
        return [by_label[lab] for lab in self.input_order]

    def position(self, label: str) -> tuple[int, int]:
        """(degree, position within degree) of a generator."""
        for k, gens in enumerate(self.generators):
            for i, g in enumerate(gens):
                if g.label == label:
                    return k, i
        raise UnknownGenerator(label)

    def coefficient(self, source: str, target: str) -> int:
        k, i = self.position(source)
        kt, j = self.position(target)
        if kt != k - 1:
            return 0
        return self.boundaries[k][j, i]


def _boundary_square_violation(c: MorseComplex):
    for k in range(2, c.dimension + 1):
        sq = c.boundaries[k - 1] @ c.boundaries[k]
        for i, src in enumerate(c.generators[k]):
            for j, tgt in enumerate(c.generators[k - 2]):
                v = sq[j, i]
                if v:
                    return src.label, tgt.label, v, k
    return None


def build_complex(
    dimension: int,
    generators: Iterable[CriticalPointId],
    counts: Iterable[SignedCount],
) -> MorseComplex:
    """Assemble boundary matrices from signed counts and check d^2 = 0.

    Pairs without a count get coefficient 0 (an empty sum).
    """
    if dimension < 0:
        raise ComplexError(f"negative dimension {dimension}")
    generators = list(generators)
    counts = tuple(counts)
    by_label: dict[str, CriticalPointId] = {}
    graded: list[list[CriticalPointId]] = [[] for _ in range(dimension + 1)]
    for g in generators:
        if g.label in by_label:
            raise DuplicateLabel(g.label)
        if g.index > dimension:
            raise ComplexError(f"{g.label} has index {g.index} > dimension {dimension}")
        by_label[g.label] = g
        graded[g.index].append(g)
    pos = {g.label: i for gens in graded for i, g in enumerate(gens)}

    mats = [[[0] * len(graded[k]) for _ in range(len(graded[k - 1]) if k else 0)]
            for k in range(dimension + 1)]
    seen = set()
    for c in counts:
        for lab in (c.source, c.target):
            if lab not in by_label:
                raise UnknownGenerator(lab)
        src, tgt = by_label[c.source], by_label[c.target]
        if src.index != tgt.index + 1:
            raise NonConsecutiveIndices(
                f"count {c.source} (index {src.index}) -> {c.target} (index {tgt.index})"
            )
        if (c.source, c.target) in seen:
            raise ComplexError(f"duplicate count for pair ({c.source}, {c.target})")
        seen.add((c.source, c.target))
        mats[src.index][pos[c.target]][pos[c.source]] = int(c.value)

    boundaries = tuple(
        IntMatrix.from_rows(mats[k], len(graded[k])) for k in range(dimension + 1)
    )
    cx = MorseComplex(
        dimension=dimension,
        generators=tuple(tuple(g) for g in graded),
        boundaries=boundaries,
        counts=counts,
        input_order=tuple(g.label for g in generators),
    )
    bad = _boundary_square_violation(cx)
    if bad is not None:
        raise BoundarySquareNonzero(*bad)
    return cx


def homology(c: MorseComplex) -> list[HomologyGroup]:
    return [homology_at(c.boundary(k), c.boundary(k + 1)) for k in range(c.dimension + 1)]


def poincare_polynomial(h: Sequence[HomologyGroup]) -> list[int]:
    """Coefficients of sum_k rank(H_k) t^k, trailing zeros dropped."""
    coeffs = [g.free_rank for g in h]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def euler_characteristic(p: Sequence[int]) -> int:
    return sum((-1) ** k * a for k, a in enumerate(p))


def format_polynomial(p: Sequence[int], var: str = "t") -> str:
    terms = []
    for k, a in enumerate(p):
        if a == 0:
            continue
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        coef = str(a) if (a != 1 or k == 0) else ""
        terms.append(f"{coef}{mono}" if mono else coef)
    return " + ".join(terms) if terms else "0"


# -- serialization ----------------------------------------------------------

def complex_to_dict(c: MorseComplex) -> dict:
    return {
        "dimension": c.dimension,
        "generators": [{"label": g.label, "index": g.index} for g in c.listed_generators()],
        "counts": [{"source": s.source, "target": s.target, "value": s.value} for s in c.counts],
    }


def dump_document(doc: dict) -> str:
    """Canonical text form: one top-level field per line, one array item per line."""
    lines = ["{"]
    items = list(doc.items())
    for n, (key, val) in enumerate(items):
        tail = "," if n < len(items) - 1 else ""
        if isinstance(val, list) and val:
            lines.append(f"  {json.dumps(key)}: [")
            for m, item in enumerate(val):
                sep = "," if m < len(val) - 1 else ""
                lines.append("    " + json.dumps(item, ensure_ascii=False) + sep)
            lines.append("  ]" + tail)
        else:
            lines.append(f"  {json.dumps(key)}: {json.dumps(val, ensure_ascii=False)}{tail}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def dumps(c: MorseComplex) -> str:
    return dump_document(complex_to_dict(c))


def _require(obj, key, kind):
    if key not in obj:
        raise SerializationError(f"missing field {key!r}")
    val = obj[key]
    if kind is int and (not isinstance(val, int) or isinstance(val, bool)):
        raise SerializationError(f"field {key!r} must be an integer")
    if kind is str and not isinstance(val, str):
        raise SerializationError(f"field {key!r} must be a string")
    if kind is list and not isinstance(val, list):
        raise SerializationError(f"field {key!r} must be an array")
    return val


def parse_generators(doc: dict) -> list[CriticalPointId]:
    out = []
    for g in _require(doc, "generators", list):
        if not isinstance(g, dict):
            raise SerializationError("generator entries must be objects")
        try:
            out.append(CriticalPointId(_require(g, "label", str), _require(g, "index", int)))
        except ComplexError as e:
            raise SerializationError(str(e)) from e
    return out


def complex_from_dict(doc: dict) -> MorseComplex:
    """Build from the JSON document structure; only structural problems raise
    SerializationError, d^2 != 0 propagates as BoundarySquareNonzero."""
    if not isinstance(doc, dict):
        raise SerializationError("complex document must be a JSON object")
    extra = set(doc) - {"dimension", "generators", "counts"}
    if extra:
        raise SerializationError(f"unexpected fields {sorted(extra)}")
    dim = _require(doc, "dimension", int)
    gens = parse_generators(doc)
    counts = []
    for c in _require(doc, "counts", list):
        if not isinstance(c, dict):
            raise SerializationError("count entries must be objects")
        counts.append(SignedCount(_require(c, "source", str), _require(c, "target", str),
                                  _require(c, "value", int)))
    try:
        return build_complex(dim, gens, counts)
    except BoundarySquareNonzero:
        raise
    except ComplexError as e:
        raise SerializationError(str(e)) from e


def loads(text: str) -> MorseComplex:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SerializationError(f"invalid JSON: {e}") from e
    return complex_from_dict(doc)


def load(path) -> MorseComplex:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def dump(c: MorseComplex, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(c))
