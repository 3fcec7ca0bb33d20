"""Command-line front end.

    morsehom homology s2
    morsehom surface torus --emit t2.json
    morsehom product s2 t2
    morsehom blowup s2xt2.graph.json T1

Bundled fixtures can be named without a path or extension. Reports are plain
text (``--json`` for a machine-readable document) and contain no timings, so
identical inputs give byte-identical output; wall-clock time is logged to
stderr with ``-v``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from importlib import resources
from pathlib import Path

from . import chain_complex as cc
from .blowup import blowup_complex, blowup_to_dict, dumps_graph, format_blowup, load_graph
from .errors import (
    BasePointOnSurface,
    BoundarySquareNonzero,
    DegenerateCriticalPoint,
    FlowGraphError,
    MorseHomologyError,
    MorseSmaleViolation,
    SerializationError,
    UnknownLabel,
)
from .kunneth import product_complex, verify_kunneth
from .orientation import broken_pair_cancellation

log = logging.getLogger("morsehom")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARSE = 2
EXIT_BOUNDARY = 3
EXIT_GEOMETRY = 4
EXIT_LABEL = 5


def resolve_input(name: str) -> Path:
    """A filesystem path if it exists, else a bundled fixture."""
    p = Path(name)
    if p.exists():
        return p
    data = resources.files("morsehom") / "data"
    for candidate in (name, name + ".json", name + ".graph.json"):
        f = data / candidate
        if f.is_file():
            return Path(str(f))
    raise SerializationError(f"no such file or bundled fixture: {name}")


# -- report pieces -----------------------------------------------------------------

def _matrix_lines(c: cc.MorseComplex, k: int) -> list[str]:
    rows = [g.label for g in c.generators[k - 1]]
    cols = [g.label for g in c.generators[k]]
    lines = [f"  d_{k}: C_{k} -> C_{k - 1}  (columns {' '.join(cols) or '-'}; rows {' '.join(rows) or '-'})"]
    m = c.boundaries[k]
    if not rows or not cols:
        lines.append("    (empty)")
        return lines
    width = max(len(str(v)) for r in m.to_rows() for v in r)
    for r in m.to_rows():
        lines.append("    [" + " ".join(str(v).rjust(width) for v in r) + "]")
    return lines


def _genus(h) -> int | None:
    """Genus of a closed orientable surface with this homology, if it is one."""
    if len(h) != 3 or any(g.torsion for g in h):
        return None
    if h[0].free_rank != 1 or h[2].free_rank != 1 or h[1].free_rank % 2:
        return None
    return h[1].free_rank // 2


def complex_summary(c: cc.MorseComplex) -> dict:
    h = cc.homology(c)
    poly = cc.poincare_polynomial(h)
    return {
        "dimension": c.dimension,
        "generators": {str(k): [g.label for g in gens] for k, gens in enumerate(c.generators)},
        "boundaries": {str(k): c.boundaries[k].to_rows() for k in range(1, c.dimension + 1)},
        "homology": [{"degree": k, "rank": g.free_rank, "torsion": list(g.torsion)} for k, g in enumerate(h)],
        "poincare": poly,
        "euler": cc.euler_characteristic(poly),
    }


def format_complex(c: cc.MorseComplex) -> list[str]:
    h = cc.homology(c)
    poly = cc.poincare_polynomial(h)
    lines = [f"complex of dimension {c.dimension}", "generators:"]
    for k, gens in enumerate(c.generators):
        lines.append(f"  C_{k}: {' '.join(g.label for g in gens) or '0'}")
    lines.append("boundary matrices:")
    if c.dimension == 0:
        lines.append("  (none)")
    for k in range(1, c.dimension + 1):
        lines.extend(_matrix_lines(c, k))
    lines.append("homology:")
    lines.append("  degree  rank  torsion")
    for k, g in enumerate(h):
        tors = " ".join(f"Z/{t}" for t in g.torsion) or "-"
        lines.append(f"  {k:<6}  {g.free_rank:<4}  {tors}")
    lines.append(f"Poincare polynomial: {cc.format_polynomial(poly)}")
    lines.append(f"Euler characteristic: {cc.euler_characteristic(poly)}")
    return lines


# -- subcommands -------------------------------------------------------------------

def cmd_homology(args) -> tuple[str, dict]:
    path = resolve_input(args.input)
    c = cc.load(path)
    doc = {"command": "homology", "input": path.name, **complex_summary(c)}
    lines = [f"homology of {path.name}", ""] + format_complex(c)
    return "\n".join(lines) + "\n", doc


def _geometry_config(args):
    from .geometry import SURFACES, GeometryConfig, load_config

    cfg = load_config(args.config) if args.config else GeometryConfig()
    over = {"surface": args.name, "seeds_per_chart": args.seed_density}
    if args.base_point is not None:
        over["base_point"] = tuple(args.base_point)
    cfg = cfg.with_overrides(**over)
    if cfg.surface not in SURFACES:
        raise SerializationError(f"unknown surface {cfg.surface!r}; known: {', '.join(sorted(SURFACES))}")
    return cfg


def cmd_surface(args) -> tuple[str, dict]:
    from .geometry import MorseData, hessian_fd_error, run_surface

    cfg = _geometry_config(args)
    m = MorseData.from_config(cfg)
    t0 = time.perf_counter()
    run = run_surface(m)
    log.info("surface %s traced in %.2f s", cfg.surface, time.perf_counter() - t0)
    c = run.complex()
    if args.emit:
        cc.dump(c, args.emit)
    if args.emit_graph:
        Path(args.emit_graph).write_text(dumps_graph(run.flow_graph()), encoding="utf-8")

    p = m.base_point
    lines = [f"surface {m.surface.name}, f(x) = |x - p|^2 with p = ({p[0]:g}, {p[1]:g}, {p[2]:g})", ""]
    lines.append("critical points:")
    lines.append("  label  index  location                            f")
    points = []
    for cp in run.critical_points:
        loc = "(" + ", ".join(f"{x:+.6f}" for x in cp.location) + ")"
        lines.append(f"  {cp.label:<5}  {cp.index:<5}  {loc:<34}  {cp.value:.6f}")
        points.append({
            "label": cp.label, "index": cp.index,
            "location": [round(float(x), 9) for x in cp.location],
            "value": round(cp.value, 9),
            "hessian_fd_error_ok": hessian_fd_error(m, cp) < 1e-5,
        })
    lines.append("")
    lines.append("signed counts N(source, target):")
    by_pair: dict[tuple[str, str], list[int]] = {}
    for fl in run.flow_lines:
        by_pair.setdefault((fl.source.label, fl.target.label), []).append(fl.sign)
    counts = []
    for (s, t), signs in by_pair.items():
        terms = " + ".join(f"({v:+d})" for v in signs)
        lines.append(f"  {s} -> {t}: {terms} = {sum(signs)}")
        counts.append({"source": s, "target": t, "signs": signs, "value": sum(signs)})
    if not by_pair:
        lines.append("  (no flow lines between consecutive indices)")
    coherence = broken_pair_cancellation(c)
    lines.append(f"broken-pair cancellation: {'pass' if coherence.passed else 'FAIL'}")
    lines.append("")
    lines.extend(format_complex(c))
    g = _genus(cc.homology(c))
    if g is not None:
        lines.append(f"closed orientable surface of genus {g}")
    doc = {
        "command": "surface",
        "surface": m.surface.name,
        "base_point": list(p),
        "critical_points": points,
        "counts": counts,
        "cancellation_passed": coherence.passed,
        **complex_summary(c),
    }
    return "\n".join(lines) + "\n", doc


def cmd_product(args) -> tuple[str, dict]:
    p1, p2 = resolve_input(args.first), resolve_input(args.second)
    c1, c2 = cc.load(p1), cc.load(p2)
    prod = product_complex(c1, c2)
    rep = verify_kunneth(c1, c2)
    lines = [f"product {p1.name} x {p2.name}", ""] + format_complex(prod)
    lines.append("")
    lines.append("Kunneth cross-check:")
    if rep.predicted_ranks is None:
        lines.append(f"  {rep.skipped_reason}")
    else:
        lines.append("  degree  direct  tensor  agree")
        for k, (a, b) in enumerate(zip(rep.direct_ranks, rep.predicted_ranks)):
            lines.append(f"  {k:<6}  {a:<6}  {b:<6}  {'yes' if a == b else 'NO'}")
    coherence = broken_pair_cancellation(prod)
    lines.append(f"broken-pair cancellation: {'pass' if coherence.passed else 'FAIL'}")
    genera = [_genus(cc.homology(c)) for c in (c1, c2)]
    if None not in genera:
        lines.append(f"product of closed orientable surfaces of genus {genera[0]} and {genera[1]}")
    doc = {
        "command": "product",
        "inputs": [p1.name, p2.name],
        **complex_summary(prod),
        "kunneth": {
            "direct": list(rep.direct_ranks),
            "tensor": None if rep.predicted_ranks is None else list(rep.predicted_ranks),
            "skipped": rep.skipped_reason,
        },
        "cancellation_passed": coherence.passed,
        "factor_genera": genera,
    }
    return "\n".join(lines) + "\n", doc


def cmd_blowup(args) -> tuple[str, dict]:
    path = resolve_input(args.graph)
    g = load_graph(path)
    b = blowup_complex(g, args.point)
    return format_blowup(b), {"command": "blowup", "graph": path.name, **blowup_to_dict(b)}


# -- argument parsing ------------------------------------------------------------

def _global_options(parser, suppress: bool):
    d = {"default": argparse.SUPPRESS} if suppress else {}
    parser.add_argument("--config", metavar="FILE", help="geometry config (JSON)", **d)
    parser.add_argument("--json", action="store_true", help="emit a JSON document", **d)
    parser.add_argument("--seed-density", type=int, metavar="N",
                        help="Newton seeds per chart side", **d)
    parser.add_argument("--output", metavar="FILE", help="write the report here", **d)
    parser.add_argument("-v", "--verbose", action="count", help="log progress to stderr", **d)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="morsehom", description="Integer Morse homology toolkit.")
    _global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("homology", help="homology of a serialized complex")
    p.add_argument("input")
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("surface", help="geometric run on a built-in surface")
    p.add_argument("name", nargs="?", help="sphere or torus (default: from config)")
    p.add_argument("--base-point", type=float, nargs=3, metavar=("X", "Y", "Z"))
    p.add_argument("--emit", metavar="FILE", help="write the assembled complex")
    p.add_argument("--emit-graph", metavar="FILE", help="write the flow graph")
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("product", help="product complex and Kunneth check")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(func=cmd_product)

    p = sub.add_parser("blowup", help="cells and boundary of a blown-up unstable manifold")
    p.add_argument("graph")
    p.add_argument("point")
    p.set_defaults(func=cmd_blowup)

    for sp in sub.choices.values():
        _global_options(sp, suppress=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose or 0, 2),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        text, doc = args.func(args)
    except BoundarySquareNonzero as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BOUNDARY
    except (DegenerateCriticalPoint, MorseSmaleViolation) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_GEOMETRY
    except UnknownLabel as e:
        print(f"error: unknown label {e}", file=sys.stderr)
        return EXIT_LABEL
    except (SerializationError, FlowGraphError, BasePointOnSurface, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except MorseHomologyError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE

    out = json.dumps(doc, indent=2, ensure_ascii=False) + "\n" if args.json else text
    if args.output:
        Path(args.output).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
