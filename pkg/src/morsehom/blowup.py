"""Broken-trajectory strata of compactified moduli spaces and the blow-up of
an unstable manifold.

Everything here is combinatorial. A flow graph records critical points with
their indices and, for consecutive indices, how many flow lines join them.
Moduli spaces between non-consecutive points have dimension gap - 1 and are
assumed nonempty unless the graph lists the pair with 0 components. The
Morse function is taken to be ordered, f(q) = index(q).

Two cell counts are reported for the blow-up E(p):

``cells``
    every stratum of closure(M(p, z)) of dimension d, times the level
    interval, is a family of (d+1)-cells, one per component where the count
    is known.
``quotient_cells``
    a CW structure on the quotient by the level relation, one cell per
    family: a cone point, and for each chain p = p_0 > ... > p_r that can be
    continued down to z, the cell of trajectories whose first r legs are
    fixed, both at the level of p_r (dimension D = |p| - |p_r| - r) and
    strictly between the levels of p_{r-1} and p_r (dimension D + 1).
    This is a closed disk: one top cell, alternating sum 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

from .chain_complex import CriticalPointId, dump_document, parse_generators
from .errors import (
    FlowGraphError,
    NoUniqueMinimum,
    SerializationError,
    UnknownLabel,
    UnorderedIndices,
)


@dataclass(frozen=True)
class FlowEdge:
    source: str
    target: str
    components: int


@dataclass(frozen=True)
class FlowGraph:
    nodes: tuple[CriticalPointId, ...]
    edges: tuple[FlowEdge, ...] = ()
    dimension: int | None = None

    def __post_init__(self):
        idx = {}
        for n in self.nodes:
            if n.label in idx:
                raise FlowGraphError(f"duplicate node {n.label!r}")
            idx[n.label] = n.index
        seen = set()
        for e in self.edges:
            for lab in (e.source, e.target):
                if lab not in idx:
                    raise UnknownLabel(lab)
            if idx[e.source] <= idx[e.target]:
                raise UnorderedIndices(
                    f"edge {e.source} (index {idx[e.source]}) -> {e.target} "
                    f"(index {idx[e.target]}): indices must decrease along flow lines"
                )
            if e.components < 0:
                raise FlowGraphError(f"negative component count on {e.source} -> {e.target}")
            if (e.source, e.target) in seen:
                raise FlowGraphError(f"duplicate edge {e.source} -> {e.target}")
            seen.add((e.source, e.target))

    def node(self, label: str) -> CriticalPointId:
        for n in self.nodes:
            if n.label == label:
                return n
        raise UnknownLabel(label)

    def index(self, label: str) -> int:
        return self.node(label).index

    @property
    def minimum(self) -> CriticalPointId:
        mins = [n for n in self.nodes if n.index == 0]
        if len(mins) != 1:
            raise NoUniqueMinimum(
                f"expected exactly one index-0 point, found {[n.label for n in mins]}"
            )
        return mins[0]

    def components(self, source: str, target: str) -> int | None:
        """Number of flow lines for a listed pair, None if not listed."""
        for e in self.edges:
            if e.source == source and e.target == target:
                return e.components
        return None

    def leg_exists(self, source: str, target: str) -> bool:
        gap = self.index(source) - self.index(target)
        if gap <= 0:
            return False
        n = self.components(source, target)
        if gap == 1:
            return bool(n)
        return n is None or n > 0


@dataclass(frozen=True)
class Stratum:
    chain: tuple[str, ...]
    factor_dims: tuple[int, ...]
    multiplicity: int | None  # product of counts when every leg is consecutive

    @property
    def total_dim(self) -> int:
        return sum(self.factor_dims)

    @property
    def breaks(self) -> int:
        return len(self.chain) - 2

    def __str__(self) -> str:
        return " > ".join(self.chain)


def _chains(g: FlowGraph, start: str, stop: str) -> list[tuple[str, ...]]:
    """All strictly index-decreasing chains start -> ... -> stop along
    existing legs."""
    low = g.index(stop)
    out = []

    def walk(path):
        head = path[-1]
        if head == stop:
            out.append(tuple(path))
            return
        for n in g.nodes:
            if low <= n.index < g.index(head) and g.leg_exists(head, n.label):
                if n.index == low and n.label != stop:
                    continue
                walk(path + [n.label])

    walk([start])
    return out


def enumerate_strata(g: FlowGraph, from_pt: str, to_pt: str) -> list[Stratum]:
    """Strata of closure(M(from_pt, to_pt)), sorted by chain labels."""
    top, bottom = g.index(from_pt), g.index(to_pt)
    if top <= bottom:
        raise FlowGraphError(f"index({from_pt}) = {top} must exceed index({to_pt}) = {bottom}")
    out = []
    for chain in _chains(g, from_pt, to_pt):
        dims, mult = [], 1
        for a, b in zip(chain, chain[1:]):
            gap = g.index(a) - g.index(b)
            dims.append(gap - 1)
            if mult is not None:
                mult = mult * g.components(a, b) if gap == 1 else None
        out.append(Stratum(chain, tuple(dims), mult))
    out.sort(key=lambda s: s.chain)
    return out


@dataclass(frozen=True)
class BoundaryEntry:
    """closure(M(p, q)) x E(q), one piece of the boundary of E(p)."""
    point: CriticalPointId
    strata: tuple[Stratum, ...]
    closure_dim: int
    blowup_dim: int


@dataclass(frozen=True)
class BlowupComplex:
    point: CriticalPointId
    minimum: CriticalPointId
    strata: tuple[Stratum, ...]
    cells: dict
    quotient_cells: dict
    boundary_strata: tuple[BoundaryEntry, ...]

    @property
    def top_dimension(self) -> int:
        return self.point.index

    @property
    def euler(self) -> int:
        return sum((-1) ** d * n for d, n in self.quotient_cells.items())

    @property
    def lifted_euler(self) -> int:
        return sum((-1) ** d * n for d, n in self.cells.items())


def _histogram(dims: Iterable[tuple[int, int]]) -> dict:
    h: dict[int, int] = {}
    for d, n in dims:
        h[d] = h.get(d, 0) + n
    return dict(sorted(h.items()))


def _quotient_cells(g: FlowGraph, p: str, z: str) -> dict:
    reaches_z = {n.label: n.label == z or bool(_chains(g, n.label, z)) for n in g.nodes}
    top = g.index(p)
    cells = [(0, 1)]  # cone point: every trajectory at the level of p

    def walk(path):
        head = path[-1]
        for n in g.nodes:
            if n.index < g.index(head) and reaches_z[n.label] and g.leg_exists(head, n.label):
                r = len(path)
                D = top - n.index - r
                cells.append((D, 1))
                cells.append((D + 1, 1))
                if n.label != z:
                    walk(path + [n.label])

    walk([p])
    return _histogram(cells)


def blowup_complex(g: FlowGraph, p: str) -> BlowupComplex:
    z = g.minimum
    pt = g.node(p)
    if pt.index == 0:
        if pt.label != z.label:
            raise NoUniqueMinimum(f"{p} has index 0 but the minimum is {z.label}")
        return BlowupComplex(pt, z, (), {0: 1}, {0: 1}, ())
    strata = tuple(enumerate_strata(g, p, z.label))
    cells = _histogram(
        (s.total_dim + 1, s.multiplicity if s.multiplicity is not None else 1) for s in strata
    )
    boundary = []
    for q in sorted(g.nodes, key=lambda n: (-n.index, n.label)):
        if q.index >= pt.index:
            continue
        pq = tuple(enumerate_strata(g, p, q.label))
        if pq:
            boundary.append(BoundaryEntry(q, pq, pt.index - q.index - 1, q.index))
    return BlowupComplex(pt, z, strata, cells, _quotient_cells(g, p, z.label), tuple(boundary))


def boundary_of_blowup(b: BlowupComplex) -> list[BoundaryEntry]:
    return list(b.boundary_strata)


def format_blowup(b: BlowupComplex) -> str:
    def hist(h):
        return "{" + ", ".join(f"{d}: {n}" for d, n in h.items()) + "}"

    lines = [f"blow-up of {b.point.label} (index {b.point.index}), minimum {b.minimum.label}", ""]
    lines.append("strata of the compactified moduli space to the minimum:")
    if not b.strata:
        lines.append("  (none)")
    for s in b.strata:
        mult = "?" if s.multiplicity is None else str(s.multiplicity)
        dims = "+".join(str(d) for d in s.factor_dims)
        lines.append(f"  {str(s):<28} dim {s.total_dim} ({dims})  x{mult}")
    lines.append("")
    lines.append(f"cells (strata x level interval): {hist(b.cells)}")
    lines.append(f"quotient cells (disk structure): {hist(b.quotient_cells)}  euler {b.euler}")
    lines.append("")
    lines.append("boundary pairings:")
    if not b.boundary_strata:
        lines.append("  (empty)")
    for e in b.boundary_strata:
        ok = "ok" if e.closure_dim + e.blowup_dim == b.point.index - 1 else "FAIL"
        lines.append(
            f"  {e.point.label:<8} closure dim {e.closure_dim} + blow-up dim {e.blowup_dim}"
            f" = {e.closure_dim + e.blowup_dim}  ({len(e.strata)} strata)  {ok}"
        )
    return "\n".join(lines) + "\n"


def blowup_to_dict(b: BlowupComplex) -> dict:
    return {
        "point": b.point.label,
        "index": b.point.index,
        "minimum": b.minimum.label,
        "strata": [
            {"chain": list(s.chain), "factor_dims": list(s.factor_dims), "multiplicity": s.multiplicity}
            for s in b.strata
        ],
        "cells": {str(d): n for d, n in b.cells.items()},
        "quotient_cells": {str(d): n for d, n in b.quotient_cells.items()},
        "euler": b.euler,
        "boundary": [
            {"point": e.point.label, "closure_dim": e.closure_dim, "blowup_dim": e.blowup_dim,
             "strata": [list(s.chain) for s in e.strata]}
            for e in b.boundary_strata
        ],
    }


# -- serialization -------------------------------------------------------------

def graph_to_dict(g: FlowGraph) -> dict:
    doc = {}
    if g.dimension is not None:
        doc["dimension"] = g.dimension
    doc["generators"] = [{"label": n.label, "index": n.index} for n in g.nodes]
    doc["edges"] = [{"source": e.source, "target": e.target, "components": e.components} for e in g.edges]
    return doc


def graph_from_dict(doc: dict) -> FlowGraph:
    if not isinstance(doc, dict):
        raise SerializationError("flow graph document must be a JSON object")
    extra = set(doc) - {"dimension", "generators", "edges"}
    if extra:
        raise SerializationError(f"unexpected fields {sorted(extra)}")
    dim = doc.get("dimension")
    if dim is not None and (not isinstance(dim, int) or isinstance(dim, bool)):
        raise SerializationError("field 'dimension' must be an integer")
    nodes = parse_generators(doc)
    raw = doc.get("edges", [])
    if not isinstance(raw, list):
        raise SerializationError("field 'edges' must be an array")
    edges = []
    for e in raw:
        if not isinstance(e, dict) or set(e) != {"source", "target", "components"}:
            raise SerializationError("edges must be objects with source, target, components")
        if not isinstance(e["source"], str) or not isinstance(e["target"], str):
            raise SerializationError("edge endpoints must be strings")
        if not isinstance(e["components"], int) or isinstance(e["components"], bool):
            raise SerializationError("edge components must be an integer")
        edges.append(FlowEdge(e["source"], e["target"], e["components"]))
    try:
        return FlowGraph(tuple(nodes), tuple(edges), dim)
    except UnknownLabel as e:
        raise SerializationError(f"edge refers to unknown node {e}") from e


def dumps_graph(g: FlowGraph) -> str:
    return dump_document(graph_to_dict(g))


def loads_graph(text: str) -> FlowGraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SerializationError(f"invalid JSON: {e}") from e
    return graph_from_dict(doc)


def load_graph(path) -> FlowGraph:
    with open(path, encoding="utf-8") as fh:
        return loads_graph(fh.read())
