"""Embedded surfaces as atlases of parametrized charts.

Each chart carries closed-form first and second partials of its embedding,
generated once with sympy and compiled to plain ``math`` code; the flow
integrator evaluates them millions of times, so they stay scalar.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable

import sympy as sp

_u, _v = sp.symbols("u v", real=True)


def _compile(exprs):
    """Return (value_and_first, value_first_second) callables of (u, v).

    The first yields 9 floats: X, X_u, X_v. The second yields 18: X, X_u, X_v,
    X_uu, X_uv, X_vv.
    """
    X = [sp.sympify(e) for e in exprs]
    Xu = [sp.diff(e, _u) for e in X]
    Xv = [sp.diff(e, _v) for e in X]
    Xuu = [sp.diff(e, _u, 2) for e in X]
    Xuv = [sp.diff(e, _u, _v) for e in X]
    Xvv = [sp.diff(e, _v, 2) for e in X]
    first = sp.lambdify((_u, _v), X + Xu + Xv, modules="math", cse=True)
    second = sp.lambdify((_u, _v), X + Xu + Xv + Xuu + Xuv + Xvv, modules="math", cse=True)
    return first, second


@dataclass(frozen=True, eq=False)
class Chart:
    """A parametrization (u, v) -> R^3 on a closed rectangle of parameters."""

    name: str
    domain: tuple[tuple[float, float], tuple[float, float]]
    first: Callable = field(repr=False)
    second: Callable = field(repr=False)
    inverse: Callable = field(repr=False)  # ambient point -> (u, v), defined near the chart

    def margin(self, u) -> float:
        """Distance from u to the edge of the domain (negative outside)."""
        (a0, b0), (a1, b1) = self.domain
        return min(u[0] - a0, b0 - u[0], u[1] - a1, b1 - u[1])

    def contains(self, u) -> bool:
        return self.margin(u) >= 0.0

    def grid(self, n: int):
        """n x n cell-centred seeds over the domain, row-major."""
        (a0, b0), (a1, b1) = self.domain
        out = []
        for i in range(n):
            for j in range(n):
                out.append((a0 + (i + 0.5) * (b0 - a0) / n, a1 + (j + 0.5) * (b1 - a1) / n))
        return out


@dataclass(frozen=True, eq=False)
class Surface:
    name: str
    charts: tuple[Chart, ...]
    distance_to: Callable = field(repr=False)  # p -> Euclidean distance from p to the surface
    label_scheme: dict = field(default_factory=dict)
    euler_characteristic: int | None = None
    switch_margin: float = 0.5  # leave a chart once this close to its edge
    dimension: int = 2
    ambient: int = 3

    @property
    def chart_count(self) -> int:
        return len(self.charts)

    def best_chart(self, X) -> tuple[int, tuple[float, float]]:
        """The chart in which the ambient point X sits deepest."""
        best = None
        for i, ch in enumerate(self.charts):
            u = ch.inverse(X)
            if u is None:
                continue
            m = ch.margin(u)
            if best is None or m > best[0]:
                best = (m, i, u)
        if best is None or best[0] < 0:
            raise ValueError(f"point {tuple(X)} is not covered by any chart of {self.name}")
        return best[1], best[2]


def _wrap(angle, centre):
    """Representative of angle in [centre - pi, centre + pi)."""
    return (angle - centre + math.pi) % (2 * math.pi) + centre - math.pi


@functools.lru_cache(maxsize=None)
def make_sphere(radius: float = 1.0) -> Surface:
    """Origin-centred sphere with the two stereographic charts (cached, since
    compiling the partials is the expensive part).

    ``south`` projects from the north pole (its origin is the south pole),
    ``north`` projects from the south pole.
    """
    R = sp.Float(radius)
    s = _u ** 2 + _v ** 2
    south = [R * 2 * _u / (1 + s), R * 2 * _v / (1 + s), R * (s - 1) / (1 + s)]
    north = [R * 2 * _u / (1 + s), R * 2 * _v / (1 + s), R * (1 - s) / (1 + s)]
    box = ((-2.0, 2.0), (-2.0, 2.0))

    def inv_south(X):
        d = radius - X[2]
        if d <= 1e-12 * radius:
            return None
        return (X[0] / d, X[1] / d)

    def inv_north(X):
        d = radius + X[2]
        if d <= 1e-12 * radius:
            return None
        return (X[0] / d, X[1] / d)

    charts = (
        Chart("south", box, *_compile(south), inverse=inv_south),
        Chart("north", box, *_compile(north), inverse=inv_north),
    )

    def distance_to(p):
        return abs(math.sqrt(p[0] ** 2 + p[1] ** 2 + p[2] ** 2) - radius)

    return Surface(
        name="sphere",
        charts=charts,
        distance_to=distance_to,
        label_scheme={2: "alpha", 0: "beta", 1: "s"},
        euler_characteristic=2,
        switch_margin=0.5,
    )


@functools.lru_cache(maxsize=None)
def make_torus(R: float = 2.0, r: float = 1.0) -> Surface:
    """Torus of revolution about the z axis of the circle of radius r centred
    at (R, 0, 0) in the xz-plane; (u, v) = (longitude, meridian angle).

    Four charts: each angle has two windows of width 2 pi, centred at 0 and pi.
    """
    Rs, rs = sp.Float(R), sp.Float(r)
    emb = [(Rs + rs * sp.cos(_v)) * sp.cos(_u), (Rs + rs * sp.cos(_v)) * sp.sin(_u), rs * sp.sin(_v)]
    first, second = _compile(emb)
    charts = []
    for cu in (0.0, math.pi):
        for cv in (0.0, math.pi):
            def inverse(X, cu=cu, cv=cv):
                rho = math.hypot(X[0], X[1])
                return (_wrap(math.atan2(X[1], X[0]), cu), _wrap(math.atan2(X[2], rho - R), cv))

            charts.append(Chart(
                f"u{'0' if cu == 0 else 'pi'}_v{'0' if cv == 0 else 'pi'}",
                ((cu - math.pi, cu + math.pi), (cv - math.pi, cv + math.pi)),
                first, second, inverse,
            ))

    def distance_to(p):
        rho = math.hypot(p[0], p[1])
        return abs(math.hypot(rho - R, p[2]) - r)

    return Surface(
        name="torus",
        charts=tuple(charts),
        distance_to=distance_to,
        label_scheme={2: "a", 1: "c", 0: "b"},
        euler_characteristic=0,
        switch_margin=math.pi / 4,
    )


SURFACES: dict[str, Callable[..., Surface]] = {
    "sphere": make_sphere,
    "torus": make_torus,
}


def get_surface(name: str, **params) -> Surface:
    try:
        factory = SURFACES[name]
    except KeyError:
        raise KeyError(f"unknown surface {name!r}; known: {sorted(SURFACES)}") from None
    return factory(**params)
