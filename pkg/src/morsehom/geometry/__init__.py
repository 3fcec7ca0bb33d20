"""Numerical Morse theory of f(x) = |x - p|^2 on embedded surfaces."""

from .config import DEFAULT_BASE_POINTS, GeometryConfig, config_from_dict, load_config
from .flow import (
    FlowLine,
    SurfaceRun,
    assemble_morse_complex,
    flow_line_sign,
    integrate,
    run_surface,
    trace_flow_lines,
)
from .morse import (
    CriticalPointGeom,
    MorseData,
    euler_from_points,
    find_critical_points,
    frames_at,
    hessian_fd_error,
)
from .surfaces import SURFACES, Chart, Surface, get_surface, make_sphere, make_torus

__all__ = [
    "DEFAULT_BASE_POINTS", "GeometryConfig", "config_from_dict", "load_config",
    "FlowLine", "SurfaceRun", "assemble_morse_complex", "flow_line_sign", "integrate",
    "run_surface", "trace_flow_lines",
    "CriticalPointGeom", "MorseData", "euler_from_points", "find_critical_points",
    "frames_at", "hessian_fd_error",
    "SURFACES", "Chart", "Surface", "get_surface", "make_sphere", "make_torus",
]
