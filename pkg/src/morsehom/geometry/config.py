"""Run configuration for the geometric pipeline (JSON on disk)."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace

from ..errors import SerializationError

# Base points used when the config does not give one. The torus point is
# deliberately off every symmetry plane of the embedding: on the x axis the
# inner equator is an invariant circle joining the two saddles.
DEFAULT_BASE_POINTS = {
    "sphere": (0.0, 0.0, 2.0),
    "torus": (10.0, 0.5, 0.3),
}


@dataclass(frozen=True)
class GeometryConfig:
    surface: str = "sphere"
    surface_params: dict = field(default_factory=dict)
    base_point: tuple[float, float, float] | None = None
    seeds_per_chart: int = 32            # grid is seeds_per_chart x seeds_per_chart
    grad_tol: float = 1e-12              # Newton step size at convergence
    newton_max_iter: int = 100
    dedup_radius: float = 1e-6
    degeneracy_tol: float = 1e-8
    on_surface_tol: float = 1e-9
    epsilon: float = 1e-3                # radius of the unstable sphere
    step: float = 1e-3                   # RK4 time step
    arrival_tol: float = 1e-4
    max_steps: int = 200_000

    def resolved_base_point(self) -> tuple[float, float, float]:
        if self.base_point is not None:
            return tuple(float(x) for x in self.base_point)
        try:
            return DEFAULT_BASE_POINTS[self.surface]
        except KeyError:
            raise SerializationError(f"no default base point for surface {self.surface!r}") from None

    def with_overrides(self, **kw) -> GeometryConfig:
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def to_dict(self) -> dict:
        d = asdict(self)
        d["base_point"] = list(self.resolved_base_point())
        return d


def config_from_dict(doc: dict) -> GeometryConfig:
    if not isinstance(doc, dict):
        raise SerializationError("config must be a JSON object")
    known = {f.name: f for f in fields(GeometryConfig)}
    extra = set(doc) - set(known)
    if extra:
        raise SerializationError(f"unknown config fields {sorted(extra)}")
    kw = dict(doc)
    if "base_point" in kw and kw["base_point"] is not None:
        bp = kw["base_point"]
        if not isinstance(bp, list) or len(bp) != 3 or not all(isinstance(x, (int, float)) for x in bp):
            raise SerializationError("base_point must be an array of 3 numbers")
        kw["base_point"] = tuple(float(x) for x in bp)
    if "surface_params" in kw and not isinstance(kw["surface_params"], dict):
        raise SerializationError("surface_params must be an object")
    for name in ("seeds_per_chart", "newton_max_iter", "max_steps"):
        if name in kw and (not isinstance(kw[name], int) or isinstance(kw[name], bool) or kw[name] < 1):
            raise SerializationError(f"{name} must be a positive integer")
    for name, f in known.items():
        if name in kw and f.type == "float" and not isinstance(kw[name], (int, float)):
            raise SerializationError(f"{name} must be a number")
    return GeometryConfig(**kw)


def load_config(path) -> GeometryConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as e:
        raise SerializationError(f"invalid config JSON: {e}") from e
    return config_from_dict(doc)
