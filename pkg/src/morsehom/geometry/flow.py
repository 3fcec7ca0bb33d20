"""Negative-gradient flow lines between consecutive critical points, their
orientation signs, and assembly of the Morse complex.

The flow is the metric gradient du/dt = -G^{-1} grad f with G = J^T J,
integrated with fixed-step RK4 and switched to a deeper chart whenever the
current one is close to its edge. Frames are compared in the ambient space,
where chart changes are invisible.

On a surface every flow line between consecutive indices runs along the
one-dimensional invariant manifold of an index-1 point: its unstable branches
(flowed forward) for lines into minima, its stable branches (flowed backward)
for lines out of maxima. Shooting from the two-dimensional side would need
the seed angle to about 1e-12 rad, because nearby trajectories are squeezed
together along the weak unstable direction of the maximum.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ..blowup import FlowEdge, FlowGraph
from ..chain_complex import CriticalPointId, MorseComplex, SignedCount, build_complex
from ..errors import (
    AmbiguousArrival,
    GeometryError,
    IntegrationEscaped,
    MorseSmaleViolation,
    NoConvergence,
)
from ..orientation import OrientedFrame, compare_sign, concat
from .morse import CriticalPointGeom, MorseData, find_critical_points

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FlowLine:
    source: CriticalPointId
    target: CriticalPointId
    seed_direction: tuple[float, float, float]  # unit ambient vector leaving the source
    trace: np.ndarray = field(repr=False)       # (n, 3) polyline from source to target
    sign: int = 1


@dataclass
class Trajectory:
    """Sampled solution, always stored in the direction of decreasing f."""
    start: CriticalPointGeom
    arrived: CriticalPointGeom
    points: list   # (chart, u0, u1)
    ambient: list  # 3-tuples
    values: list   # f at each sample

    def reversed(self) -> Trajectory:
        return Trajectory(self.start, self.arrived, self.points[::-1], self.ambient[::-1], self.values[::-1])


def _velocity(chart, u0, u1, p):
    d = chart.first(u0, u1)
    w0, w1, w2 = d[0] - p[0], d[1] - p[1], d[2] - p[2]
    g0 = 2 * (w0 * d[3] + w1 * d[4] + w2 * d[5])
    g1 = 2 * (w0 * d[6] + w1 * d[7] + w2 * d[8])
    E = d[3] * d[3] + d[4] * d[4] + d[5] * d[5]
    F = d[3] * d[6] + d[4] * d[7] + d[5] * d[8]
    Gg = d[6] * d[6] + d[7] * d[7] + d[8] * d[8]
    det = E * Gg - F * F
    return -(Gg * g0 - F * g1) / det, -(E * g1 - F * g0) / det


def _rk4(chart, u0, u1, p, h):
    k1 = _velocity(chart, u0, u1, p)
    k2 = _velocity(chart, u0 + 0.5 * h * k1[0], u1 + 0.5 * h * k1[1], p)
    k3 = _velocity(chart, u0 + 0.5 * h * k2[0], u1 + 0.5 * h * k2[1], p)
    k4 = _velocity(chart, u0 + h * k3[0], u1 + h * k3[1], p)
    return (u0 + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
            u1 + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]))


def integrate(m: MorseData, crit, start: CriticalPointGeom, chart: int, u, backward: bool = False) -> Trajectory:
    """Flow from u (a point near ``start``) until within arrival tolerance of
    another critical point. Forward flow must decrease f at every step and
    backward flow increase it."""
    cfg = m.config
    surface = m.surface
    p = m.base_point
    h = -cfg.step if backward else cfg.step
    tol2 = cfg.arrival_tol ** 2
    others = [c for c in crit if c is not start]
    locs = [tuple(c.location) for c in others]
    u0, u1 = float(u[0]), float(u[1])
    ch = surface.charts[chart]
    X = ch.first(u0, u1)[:3]
    f = m.ambient_value(X)
    points, ambient, values = [(chart, u0, u1)], [tuple(X)], [f]
    for _ in range(cfg.max_steps):
        u0, u1 = _rk4(ch, u0, u1, p, h)
        if not (math.isfinite(u0) and math.isfinite(u1)) or ch.margin((u0, u1)) < 0:
            raise IntegrationEscaped(f"trajectory from {start.label} left chart {ch.name} at {(u0, u1)}")
        X = ch.first(u0, u1)[:3]
        f_new = m.ambient_value(X)
        if not (f_new > f if backward else f_new < f):
            raise GeometryError(
                f"f is not monotone along the flow from {start.label} ({f!r} -> {f_new!r})"
            )
        f = f_new
        if ch.margin((u0, u1)) < surface.switch_margin:
            chart, (u0, u1) = surface.best_chart(X)
            ch = surface.charts[chart]
        points.append((chart, u0, u1))
        ambient.append(tuple(X))
        values.append(f)
        near = [
            i for i, L in enumerate(locs)
            if (X[0] - L[0]) ** 2 + (X[1] - L[1]) ** 2 + (X[2] - L[2]) ** 2 < tol2
        ]
        if len(near) > 1:
            raise AmbiguousArrival(
                f"trajectory from {start.label} is within {cfg.arrival_tol} of "
                f"{[others[i].label for i in near]}; refine the step size"
            )
        if near:
            t = Trajectory(start, others[near[0]], points, ambient, values)
            return t.reversed() if backward else t
    raise NoConvergence(f"trajectory from {start.label} did not arrive within {cfg.max_steps} steps")


# -- frames along a trace ----------------------------------------------------

def _ambient(m: MorseData, c: CriticalPointGeom, v) -> np.ndarray:
    return m.jacobian(c.chart, c.coords) @ np.asarray(v)


def _tangent_projector(m: MorseData, chart, u0, u1) -> np.ndarray:
    J = m.jacobian(chart, (u0, u1))
    return J @ np.linalg.solve(J.T @ J, J.T)


def _flow_direction(m: MorseData, chart, u0, u1) -> np.ndarray:
    """Unit ambient vector along -grad f."""
    v = m.jacobian(chart, (u0, u1)) @ np.array(_velocity(m.surface.charts[chart], u0, u1, m.base_point))
    return v / np.linalg.norm(v)


def _gram_schmidt(vs: np.ndarray) -> np.ndarray:
    # triangular with positive diagonal, so the orientation is preserved
    out = []
    for v in vs:
        for q in out:
            v = v - (v @ q) * q
        out.append(v / np.linalg.norm(v))
    return np.array(out)


def flow_line_sign(m: MorseData, source: CriticalPointGeom, target: CriticalPointGeom, traj: Trajectory) -> int:
    """Carry the unstable frame of the source down the trace and the unstable
    frame of the target (a normal frame to its stable manifold) up the trace
    to the sample nearest the middle level x; the sign compares the first with
    (-grad f(x), second)."""
    mid_f = 0.5 * (source.value + target.value)
    mid = min(range(len(traj.values)), key=lambda i: abs(traj.values[i] - mid_f))

    frame = np.array([_ambient(m, source, v) for v in source.unstable_frame])
    for i in range(mid + 1):
        ci, u0, u1 = traj.points[i]
        if source.index == m.surface.dimension:
            frame = _gram_schmidt(frame @ _tangent_projector(m, ci, u0, u1).T)
        else:
            # the unstable manifold is the trajectory itself
            t = _flow_direction(m, ci, u0, u1)
            frame = np.array([t if v @ t > 0 else -t for v in frame])

    normal = np.array([_ambient(m, target, v) for v in target.unstable_frame]).reshape(-1, 3)
    for i in range(len(traj.points) - 1, mid - 1, -1):
        ci, u0, u1 = traj.points[i]
        t = _flow_direction(m, ci, u0, u1)
        P = _tangent_projector(m, ci, u0, u1)
        carried = []
        for v in normal:
            w = P @ v
            w = w - (w @ t) * t
            carried.append(w / np.linalg.norm(w))
        normal = np.array(carried).reshape(-1, 3)

    ci, u0, u1 = traj.points[mid]
    down = OrientedFrame.of(_flow_direction(m, ci, u0, u1))
    return compare_sign(OrientedFrame(frame, 3), concat(down, OrientedFrame(normal, 3)))


# -- tracing -------------------------------------------------------------------

def _flow_line(m, source, target, traj, force_positive):
    trace = np.vstack([source.location, np.array(traj.ambient), target.location])
    lead = trace[1] - trace[0]
    sign = 1 if force_positive else flow_line_sign(m, source, target, traj)
    return FlowLine(source.id, target.id, tuple(lead / np.linalg.norm(lead)), trace, sign)


def _branches(m: MorseData, crit, saddle: CriticalPointGeom, backward: bool):
    """The two branches of the unstable (forward) or stable (backward)
    manifold of an index-1 point, as trajectories."""
    vec = saddle.stable_frame[0] if backward else saddle.unstable_frame[0]
    out = []
    for s in (1, -1):
        u = np.asarray(saddle.coords) + s * m.config.epsilon * vec
        out.append(integrate(m, crit, saddle, saddle.chart, u, backward=backward))
    return out


def trace_flow_lines(m: MorseData, crit, source: CriticalPointGeom, force_positive: bool = False) -> list[FlowLine]:
    """All flow lines from source to critical points of index one less, one
    per component of the (0-dimensional) moduli space."""
    k = source.index
    if k < 1:
        raise ValueError(f"{source.label} has index 0; no descending flow lines")
    if m.surface.dimension != 2 or k > 2:
        raise NotImplementedError("flow tracing is implemented for surfaces only")
    out = []
    if k == 1:
        for traj in _branches(m, crit, source, backward=False):
            if traj.arrived.index >= 1:
                raise MorseSmaleViolation(source.label, traj.arrived.label)
            out.append(_flow_line(m, source, traj.arrived, traj, force_positive))
        return out
    for target in crit:
        if target.index != 1:
            continue
        for traj in _branches(m, crit, target, backward=True):
            origin = traj.arrived
            if origin.index <= 1:
                raise MorseSmaleViolation(origin.label, target.label)
            if origin is source:
                out.append(_flow_line(m, source, target, traj, force_positive))
    return out


# -- assembly --------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SurfaceRun:
    data: MorseData
    critical_points: list[CriticalPointGeom]
    flow_lines: list[FlowLine]
    counts: list[SignedCount]

    @property
    def generators(self) -> list[CriticalPointId]:
        return [c.id for c in self.critical_points]

    def complex(self) -> MorseComplex:
        return build_complex(self.data.surface.dimension, self.generators, self.counts)

    def components(self) -> dict[tuple[str, str], int]:
        """Unsigned number of flow lines per consecutive pair."""
        out: dict[tuple[str, str], int] = {}
        for fl in self.flow_lines:
            key = (fl.source.label, fl.target.label)
            out[key] = out.get(key, 0) + 1
        return out

    def flow_graph(self) -> FlowGraph:
        """Unsigned counts for the blow-up engine."""
        edges = tuple(FlowEdge(s, t, n) for (s, t), n in self.components().items())
        return FlowGraph(tuple(self.generators), edges, self.data.surface.dimension)


def run_surface(m: MorseData, force_positive: bool = False) -> SurfaceRun:
    """Critical points, every consecutive-index flow line, and the signed
    counts N(xi, gamma) summed in trace order."""
    crit = find_critical_points(m)
    lines = []
    for c in crit:
        if c.index >= 1:
            lines.extend(trace_flow_lines(m, crit, c, force_positive))
    counts: dict[tuple[str, str], int] = {}
    for fl in lines:
        key = (fl.source.label, fl.target.label)
        counts[key] = counts.get(key, 0) + fl.sign
    signed = [SignedCount(s, t, v) for (s, t), v in counts.items()]
    return SurfaceRun(m, crit, lines, signed)


def assemble_morse_complex(m: MorseData, force_positive: bool = False) -> MorseComplex:
    return run_surface(m, force_positive).complex()
