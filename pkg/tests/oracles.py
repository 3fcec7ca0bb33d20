"""Independent reference computations and random-instance builders for tests.

Nothing here calls into the package's Smith normal form, homology, or chain
enumeration; those are what the oracles check.
"""

from __future__ import annotations

import itertools
import math
import random

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors

from morsehom import CriticalPointId, SignedCount, build_complex
from morsehom.blowup import FlowEdge, FlowGraph


# -- integer matrices ---------------------------------------------------------

def bareiss_det(rows) -> int:
    """Fraction-free Gaussian elimination."""
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def gcd_of_minors(rows, k: int) -> int:
    m, n = len(rows), len(rows[0]) if rows else 0
    g = 0
    for ri in itertools.combinations(range(m), k):
        for ci in itertools.combinations(range(n), k):
            g = math.gcd(g, bareiss_det([[rows[i][j] for j in ci] for i in ri]))
    return g


def sympy_invariants(rows, shape) -> tuple[int, ...]:
    """Nonzero invariant factors from sympy's own Smith form."""
    if 0 in shape:
        return ()
    return tuple(int(abs(d)) for d in invariant_factors(Matrix(rows), domain=ZZ) if d != 0)


def rational_rank(rows, shape) -> int:
    if 0 in shape:
        return 0
    return Matrix(rows).rank()


def homology_oracle(dk_rows, dk_shape, dk1_rows, dk1_shape):
    """(free rank, torsion) of ker d_k / im d_{k+1}: ranks over Q, torsion from
    sympy invariant factors of d_{k+1} (ker d_k is a saturated sublattice)."""
    n = dk_shape[1]
    free = n - rational_rank(dk_rows, dk_shape) - rational_rank(dk1_rows, dk1_shape)
    tors = tuple(d for d in sympy_invariants(dk1_rows, dk1_shape) if d > 1)
    return free, tors


def cyclic_quotient_order(m: int, window: int = 50) -> int:
    """Number of classes of Z modulo mZ, by listing residues of a window."""
    classes = []
    for x in range(-window, window):
        if not any((x - y) % m == 0 for y in classes):
            classes.append(x)
    return len(classes)


# -- random complexes ---------------------------------------------------------

def _left_kernel(rows, nrows, ncols):
    """Primitive integer vectors y with y . d = 0 (sympy, over Q, then cleared)."""
    if ncols == 0:
        return [[int(i == j) for j in range(nrows)] for i in range(nrows)]
    out = []
    for v in Matrix(rows).T.nullspace():
        den = math.lcm(*(int(x.q) for x in v))
        ints = [int(x * den) for x in v]
        g = math.gcd(*ints) or 1
        out.append([x // g for x in ints])
    return out


def random_complex(rnd: random.Random, max_dim: int = 2, max_gens: int = 4, bound: int = 2, prefix: str = "x"):
    """A valid complex with entries in [-bound, bound]. Boundaries are built
    top-down; every row of d_k is zero or a small multiple of a kernel vector
    of d_{k+1}^T, so d_k d_{k+1} = 0 holds by construction."""
    dim = rnd.randint(0, max_dim)
    sizes = [rnd.randint(1, max_gens) for _ in range(dim + 1)]
    labels = [[f"{prefix}{k}_{i}" for i in range(sizes[k])] for k in range(dim + 1)]
    mats = {}
    for k in range(dim, 0, -1):
        rows, cols = sizes[k - 1], sizes[k]
        upper = mats.get(k + 1)
        if upper is None:
            d = [[rnd.randint(-bound, bound) for _ in range(cols)] for _ in range(rows)]
        else:
            # rows of d_k must annihilate the columns of d_{k+1}
            ker = _left_kernel(upper, sizes[k], sizes[k + 1])
            ker = [v for v in ker if max(map(abs, v)) <= bound]
            d = []
            for _ in range(rows):
                if ker and rnd.random() < 0.7:
                    v = rnd.choice(ker)
                    c = rnd.choice([-1, 1] if max(map(abs, v)) > bound // 2 else [-2, -1, 1, 2])
                    d.append([c * x for x in v])
                else:
                    d.append([0] * cols)
        mats[k] = d
    gens = [CriticalPointId(labels[k][i], k) for k in range(dim + 1) for i in range(sizes[k])]
    counts = [
        SignedCount(labels[k][i], labels[k - 1][j], mats[k][j][i])
        for k in range(1, dim + 1)
        for i in range(sizes[k])
        for j in range(sizes[k - 1])
        if mats[k][j][i]
    ]
    rnd.shuffle(gens)
    return build_complex(dim, gens, counts)


def random_matrix(rnd: random.Random, max_dim: int = 5, bound: int = 9):
    m, n = rnd.randint(1, max_dim), rnd.randint(1, max_dim)
    return [[rnd.randint(-bound, bound) for _ in range(n)] for _ in range(m)]


# -- random flow graphs ---------------------------------------------------------

def random_flow_graph(rnd: random.Random, max_index: int = 4, max_per_index: int = 3) -> FlowGraph:
    """A flow graph shaped like one from a connected manifold with a unique
    minimum: every index-1 point has flow lines to the minimum and no moduli
    space to the minimum is declared empty."""
    top = rnd.randint(1, max_index)
    nodes = [CriticalPointId("z", 0)]
    for k in range(1, top + 1):
        for i in range(rnd.randint(1, max_per_index)):
            nodes.append(CriticalPointId(f"n{k}_{i}", k))
    edges = []
    for s in nodes:
        for t in nodes:
            gap = s.index - t.index
            if gap <= 0:
                continue
            if gap == 1:
                if t.label == "z":
                    n = rnd.randint(1, 3)
                else:
                    n = rnd.choice([0, 0, 1, 2, 3, None])
                if n is not None:
                    edges.append(FlowEdge(s.label, t.label, n))
            elif t.label != "z" and rnd.random() < 0.2:
                edges.append(FlowEdge(s.label, t.label, 0))
    return FlowGraph(tuple(nodes), tuple(edges))


def brute_chains(g: FlowGraph, start: str, stop: str):
    """All node sequences start > ... > stop with strictly decreasing indices
    and existing legs, by scanning every subset of intermediate nodes."""
    lo, hi = g.index(stop), g.index(start)
    middle = [n for n in g.nodes if lo < n.index < hi]
    out = []
    for r in range(len(middle) + 1):
        for sub in itertools.combinations(middle, r):
            idx = [n.index for n in sub]
            if len(set(idx)) != len(idx):
                continue
            seq = [start] + [n.label for n in sorted(sub, key=lambda n: -n.index)] + [stop]
            if all(g.leg_exists(a, b) for a, b in zip(seq, seq[1:])):
                out.append(tuple(seq))
    return sorted(out)


def brute_quotient_cells(g: FlowGraph, p: str) -> dict:
    """Cone point plus, for every chain prefix p > p_1 > ... > p_r (r >= 1)
    that continues to the minimum, cells of dimension D and D + 1 with
    D = |p| - |p_r| - r."""
    z = g.minimum.label
    top = g.index(p)
    hist = {0: 1}
    if top == 0:
        return hist
    reach = {n.label: n.label == z or bool(brute_chains(g, n.label, z)) for n in g.nodes}
    below = [n for n in g.nodes if n.index < top]
    for r in range(1, len(below) + 1):
        for sub in itertools.combinations(below, r):
            idx = [n.index for n in sub]
            if len(set(idx)) != r:
                continue
            seq = [p] + [n.label for n in sorted(sub, key=lambda n: -n.index)]
            if not reach[seq[-1]]:
                continue
            if not all(g.leg_exists(a, b) for a, b in zip(seq, seq[1:])):
                continue
            D = top - g.index(seq[-1]) - r
            hist[D] = hist.get(D, 0) + 1
            hist[D + 1] = hist.get(D + 1, 0) + 1
    return dict(sorted(hist.items()))
