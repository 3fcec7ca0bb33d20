"""Distance-squared Morse functions and their critical points.

For a chart X(u) of M and a base point p, f(u) = |X(u) - p|^2 has

    grad_i   = 2 (X - p) . X_i
    hess_ij  = 2 (X_i . X_j + (X - p) . X_ij)

so u is critical iff X - p is normal to the surface at X(u).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ..chain_complex import CriticalPointId
from ..errors import BasePointOnSurface, DegenerateCriticalPoint, NoConvergence
from .config import GeometryConfig
from .surfaces import Surface, get_surface

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class MorseData:
    surface: Surface
    base_point: tuple[float, float, float]
    config: GeometryConfig = GeometryConfig()

    def __post_init__(self):
        p = tuple(float(x) for x in self.base_point)
        if len(p) != self.surface.ambient:
            raise ValueError(f"base point must have {self.surface.ambient} coordinates")
        d = self.surface.distance_to(p)
        if d <= self.config.on_surface_tol:
            raise BasePointOnSurface(
                f"base point {p} lies on the {self.surface.name} (distance {d:.3g}); "
                "f^p would vanish there"
            )
        object.__setattr__(self, "base_point", p)

    @classmethod
    def from_config(cls, config: GeometryConfig) -> MorseData:
        surface = get_surface(config.surface, **config.surface_params)
        return cls(surface, config.resolved_base_point(), config)

    # -- local quantities in a chart ------------------------------------------

    def value(self, chart: int, u) -> float:
        d = self.surface.charts[chart].first(u[0], u[1])
        p = self.base_point
        return (d[0] - p[0]) ** 2 + (d[1] - p[1]) ** 2 + (d[2] - p[2]) ** 2

    def ambient_value(self, X) -> float:
        p = self.base_point
        return (X[0] - p[0]) ** 2 + (X[1] - p[1]) ** 2 + (X[2] - p[2]) ** 2

    def embed(self, chart: int, u) -> np.ndarray:
        return np.array(self.surface.charts[chart].first(u[0], u[1])[:3])

    def jacobian(self, chart: int, u) -> np.ndarray:
        """3 x 2 matrix with columns X_u, X_v."""
        d = self.surface.charts[chart].first(u[0], u[1])
        return np.array([d[3:6], d[6:9]]).T

    def gradient(self, chart: int, u) -> np.ndarray:
        d = self.surface.charts[chart].first(u[0], u[1])
        w = np.array(d[0:3]) - self.base_point
        return 2.0 * np.array([w @ d[3:6], w @ d[6:9]])

    def hessian(self, chart: int, u) -> np.ndarray:
        d = np.array(self.surface.charts[chart].second(u[0], u[1]))
        w = d[0:3] - self.base_point
        Xu, Xv, Xuu, Xuv, Xvv = d[3:6], d[6:9], d[9:12], d[12:15], d[15:18]
        return 2.0 * np.array([
            [Xu @ Xu + w @ Xuu, Xu @ Xv + w @ Xuv],
            [Xv @ Xu + w @ Xuv, Xv @ Xv + w @ Xvv],
        ])

    def metric(self, chart: int, u) -> np.ndarray:
        J = self.jacobian(chart, u)
        return J.T @ J


@dataclass(frozen=True, eq=False)
class CriticalPointGeom:
    id: CriticalPointId
    chart: int
    coords: tuple[float, float]
    location: np.ndarray
    hessian: np.ndarray
    eigenvalues: np.ndarray          # generalized, H v = lambda G v, ascending
    unstable_frame: np.ndarray       # (index, 2) chart vectors, G-orthonormal
    stable_frame: np.ndarray         # (2 - index, 2)
    value: float

    @property
    def index(self) -> int:
        return self.id.index

    @property
    def label(self) -> str:
        return self.id.label


def _sign_normalize(v: np.ndarray) -> np.ndarray:
    for x in v:
        if abs(x) > 1e-10:
            return v if x > 0 else -v
    return v


def frames_at(H: np.ndarray, G: np.ndarray):
    """Eigenvalues and (unstable, stable) frames of H relative to the metric G.

    The unstable vectors are sorted by ascending eigenvalue and sign-normalized;
    the stable frame is completed so that unstable followed by stable is a
    positive basis of the chart.
    """
    lam, vecs = scipy.linalg.eigh(H, G)
    vecs = np.array([_sign_normalize(vecs[:, i]) for i in range(len(lam))])
    k = int(np.sum(lam < 0))
    unstable, stable = vecs[:k].copy(), vecs[k:].copy()
    if len(stable) and np.linalg.det(np.vstack([unstable, stable])) < 0:
        stable[-1] = -stable[-1]
    return lam, unstable, stable


def _grad_hess(chart, u0, u1, p):
    d = chart.second(u0, u1)
    w0, w1, w2 = d[0] - p[0], d[1] - p[1], d[2] - p[2]
    g0 = 2 * (w0 * d[3] + w1 * d[4] + w2 * d[5])
    g1 = 2 * (w0 * d[6] + w1 * d[7] + w2 * d[8])
    h00 = 2 * (d[3] * d[3] + d[4] * d[4] + d[5] * d[5] + w0 * d[9] + w1 * d[10] + w2 * d[11])
    h01 = 2 * (d[3] * d[6] + d[4] * d[7] + d[5] * d[8] + w0 * d[12] + w1 * d[13] + w2 * d[14])
    h11 = 2 * (d[6] * d[6] + d[7] * d[7] + d[8] * d[8] + w0 * d[15] + w1 * d[16] + w2 * d[17])
    return g0, g1, h00, h01, h11


def _grad(chart, u0, u1, p):
    d = chart.first(u0, u1)
    w0, w1, w2 = d[0] - p[0], d[1] - p[1], d[2] - p[2]
    return 2 * (w0 * d[3] + w1 * d[4] + w2 * d[5]), 2 * (w0 * d[6] + w1 * d[7] + w2 * d[8])


def _newton(m: MorseData, chart: int, u0, cfg: GeometryConfig):
    ch = m.surface.charts[chart]
    (a0, b0), (a1, b1) = ch.domain
    far = max(b0 - a0, b1 - a1)
    max_step = min(b0 - a0, b1 - a1) / 8
    x, y = float(u0[0]), float(u0[1])
    p = m.base_point
    for _ in range(cfg.newton_max_iter):
        g0, g1, h00, h01, h11 = _grad_hess(ch, x, y, p)
        det = h00 * h11 - h01 * h01
        scale = h00 * h00 + 2 * h01 * h01 + h11 * h11
        if abs(det) > 1e-12 * scale:
            s0 = (h11 * g0 - h01 * g1) / det
            s1 = (h00 * g1 - h01 * g0) / det
        else:
            # (nearly) singular Hessian: minimum-norm least-squares step
            s0, s1 = np.linalg.lstsq(np.array([[h00, h01], [h01, h11]]), np.array([g0, g1]), rcond=None)[0]
        # trust radius, so a seed past an inflection cannot jump over the root
        norm = math.hypot(s0, s1)
        if norm > max_step:
            s0, s1 = s0 * max_step / norm, s1 * max_step / norm
        # the Newton step descends |grad f|^2 whatever the index; backtrack on it
        g2, t = g0 * g0 + g1 * g1, 1.0
        while t > 1e-3:
            q0, q1 = _grad(ch, x - t * s0, y - t * s1, p)
            if q0 * q0 + q1 * q1 < (1 - 1e-4 * t) * g2:
                break
            t *= 0.5
        else:
            t = 1.0  # no decrease available, usually roundoff at convergence
        s0, s1 = t * s0, t * s1
        x, y = x - s0, y - s1
        if not (math.isfinite(x) and math.isfinite(y)) or ch.margin((x, y)) < -far:
            raise NoConvergence(f"Newton left chart {chart} from seed {tuple(u0)}")
        if math.hypot(s0, s1) < cfg.grad_tol:
            return np.array([x, y])
    raise NoConvergence(f"Newton did not converge from seed {tuple(u0)} in chart {chart}")


def _label_points(surface: Surface, pts):
    """Assign labels by index using the surface's scheme, numbering only when a
    degree has several points; within a degree order by f then position."""
    by_index: dict[int, list] = {}
    for pt in pts:
        by_index.setdefault(pt["index"], []).append(pt)
    labels = {}
    for k, group in by_index.items():
        group.sort(key=lambda q: (round(q["value"], 9), tuple(np.round(q["X"], 9))))
        base = surface.label_scheme.get(k, f"x{k}_")
        for n, q in enumerate(group, start=1):
            labels[id(q)] = base if len(group) == 1 else f"{base}{n}"
    return labels


def find_critical_points(m: MorseData, seeds_per_chart: int | None = None) -> list[CriticalPointGeom]:
    """Newton on grad f from an n x n grid in every chart, deduplicated in the
    ambient space and re-expressed in the chart where each point is most
    interior. Sorted by (index, label)."""
    cfg = m.config
    n = seeds_per_chart or cfg.seeds_per_chart
    surface = m.surface
    found: list[np.ndarray] = []
    dropped = 0
    for ci, chart in enumerate(surface.charts):
        for seed in chart.grid(n):
            try:
                u = _newton(m, ci, seed, cfg)
            except NoConvergence as e:
                dropped += 1
                log.debug("%s", e)
                continue
            X = m.embed(ci, u)
            if any(np.linalg.norm(X - Y) <= cfg.dedup_radius for Y in found):
                continue
            found.append(X)
    if dropped:
        log.info("%d Newton seeds did not converge and were dropped", dropped)
    if not found:
        raise NoConvergence(f"no critical point found on the {surface.name} from {n}x{n} seeds per chart")

    pts = []
    for X in found:
        ci, u = surface.best_chart(X)
        u = _newton(m, ci, u, cfg)  # polish in the home chart
        H = m.hessian(ci, u)
        G = m.metric(ci, u)
        plain = np.linalg.eigvalsh(H)
        if np.min(np.abs(plain)) < cfg.degeneracy_tol:
            raise DegenerateCriticalPoint(m.embed(ci, u), plain)
        lam, unstable, stable = frames_at(H, G)
        pts.append({
            "chart": ci, "u": (float(u[0]), float(u[1])), "X": m.embed(ci, u), "H": H,
            "lam": lam, "unstable": unstable, "stable": stable,
            "index": len(unstable), "value": m.value(ci, u),
        })
    labels = _label_points(surface, pts)
    out = [
        CriticalPointGeom(
            id=CriticalPointId(labels[id(q)], q["index"]),
            chart=q["chart"], coords=q["u"], location=q["X"], hessian=q["H"],
            eigenvalues=q["lam"], unstable_frame=q["unstable"], stable_frame=q["stable"],
            value=q["value"],
        )
        for q in pts
    ]
    out.sort(key=lambda c: (-c.index, c.label))
    return out


def hessian_fd_error(m: MorseData, cp: CriticalPointGeom, h: float = 1e-4) -> float:
    """Max abs difference between the analytic Hessian and central differences
    of the analytic gradient at cp."""
    u = np.array(cp.coords)
    fd = np.zeros((2, 2))
    for j in range(2):
        e = np.zeros(2)
        e[j] = h
        fd[:, j] = (m.gradient(cp.chart, u + e) - m.gradient(cp.chart, u - e)) / (2 * h)
    return float(np.max(np.abs(fd - m.hessian(cp.chart, u))))


def euler_from_points(points) -> int:
    return sum((-1) ** c.index for c in points)

