"""Command-line interface: ``reptile analyze|render|neighbors|gallery|orientations|dimension|area``.

Exit codes:
  0  success
  2  invalid spec (validation failure, malformed JSON, unknown gallery name)
  3  a vertex or word budget was exhausted
  4  file could not be read or written
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from . import gallery
from .analysis import ValidationFailed, analyze
from .errors import BudgetExceeded, ReptileError, SpecFormatError, UnknownGalleryName
from .ifs_model import DEFAULT_WORD_BUDGET, ReptileSpec, covering_polygon, derive_subdivision, validate
from .neighbor_engine import DEFAULT_MAX_VERTICES, edge_arrow_table, export_dot
from .render import ColorScheme, area_estimate, orientation_census, render_subdivision

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_BUDGET = 3
EXIT_IO = 4

BUDGET_ENV = "REPTILE_BUDGET"


class _IOFailure(Exception):
    pass


def budget(default: int) -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise SpecFormatError(f"{BUDGET_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise SpecFormatError(f"{BUDGET_ENV} must be positive")
    return value


def load_spec(ref: str) -> ReptileSpec:
    """A file path, or ``gallery:NAME`` for a built-in."""
    if ref.startswith("gallery:"):
        return gallery.load(ref.split(":", 1)[1])
    try:
        text = Path(ref).read_text()
    except OSError as exc:
        raise _IOFailure(f"cannot read {ref}: {exc.strerror or exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecFormatError(f"{ref} is not valid JSON: {exc}") from exc
    return ReptileSpec.from_json(data)


def write_atomic(path: str, data) -> int:
    """Write via a temporary file in the same directory and rename it into place."""
    if isinstance(data, str):
        data = data.encode()
    target = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(dir=target.parent or Path("."), prefix=f".{target.name}.", suffix=".tmp")
    except OSError as exc:
        raise _IOFailure(f"cannot write {path}: {exc.strerror or exc}") from exc
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, target)
    except OSError as exc:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise _IOFailure(f"cannot write {path}: {exc.strerror or exc}") from exc
    return len(data)


def _emit(text: str, out):
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _report_json(report: dict, drop_timing: bool) -> str:
    if drop_timing:
        report = {k: v for k, v in report.items() if k != "timing_ms"}
    return json.dumps(report, indent=2) + "\n"


def _checked_ifs(spec: ReptileSpec):
    report = validate(spec)
    if not report.valid:
        raise ValidationFailed(report)
    return derive_subdivision(spec)


# -- subcommands ---------------------------------------------------------------
def cmd_analyze(args) -> int:
    result = analyze(load_spec(args.spec), max_vertices=budget(DEFAULT_MAX_VERTICES))
    _emit(_report_json(result.report, args.no_timing), args.out)
    return EXIT_OK


def cmd_render(args) -> int:
    spec = load_spec(args.spec)
    ifs = _checked_ifs(spec)
    hull = covering_polygon(ifs, spec) if args.format == "svg" else None
    data = render_subdivision(
        ifs, args.depth, ColorScheme(), args.format, hull=hull,
        budget=budget(DEFAULT_WORD_BUDGET), size=args.size,
    )
    n = write_atomic(args.out, data)
    print(f"wrote {n} bytes to {args.out}")
    return EXIT_OK


def cmd_neighbors(args) -> int:
    spec = load_spec(args.spec)
    result = analyze(spec, max_vertices=budget(DEFAULT_MAX_VERTICES))
    graph, classes = result.graph, result.classes
    if args.dot:
        keep = [0, *sorted(v for v, c in classes.items() if c.kind == "edge")] if args.edges_only else None
        write_atomic(args.dot, export_dot(graph, keep, spec.neighbor_names))
    if args.table or not args.dot:
        rows = edge_arrow_table(graph, classes, spec.neighbor_names)
        lines = ["from\tto\ti\tj"]
        lines += [f"{u}\t{v}\t{i}\t{j}" for u, v, i, j in rows]
        print("\n".join(lines))
    if not result.report["osc"]:
        print("warning: osc:false, some arrow leads back to the root", file=sys.stderr)
    return EXIT_OK


def cmd_gallery(args) -> int:
    if args.action == "list":
        print("\n".join(gallery.NAMES))
        return EXIT_OK
    if not args.name:
        raise SpecFormatError("gallery export needs a NAME")
    text = gallery.load(args.name).dumps()
    _emit(text, args.out)
    return EXIT_OK


def cmd_orientations(args) -> int:
    ifs = _checked_ifs(load_spec(args.spec))
    census = orientation_census(ifs, args.depth, 360.0 / args.bins, budget=budget(DEFAULT_WORD_BUDGET))
    if args.out:
        write_atomic(args.out, census.to_csv())
    else:
        sys.stdout.write(census.to_csv())
    print(
        f"depth {census.depth}: {census.total} pieces, "
        f"{census.distinct_linear_parts} distinct orientations "
        f"({census.distinct_angles_plus} with det>0, {census.distinct_angles_minus} with det<0), "
        f"det>0 {sum(census.det_plus)}, det<0 {sum(census.det_minus)}",
        file=sys.stdout if args.out else sys.stderr,
    )
    return EXIT_OK


def cmd_dimension(args) -> int:
    result = analyze(load_spec(args.spec), max_vertices=budget(DEFAULT_MAX_VERTICES))
    rep = result.report
    out = {
        "name": rep["name"],
        "components": rep["components"],
        "boundary_dimension": rep["boundary_dimension"],
        "measure_ratios": rep["measure_ratios"],
    }
    _emit(json.dumps(out, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_area(args) -> int:
    spec = load_spec(args.spec)
    ifs = _checked_ifs(spec)
    value = area_estimate(ifs, covering_polygon(ifs, spec), args.resolution, args.depth, args.seed)
    print(f"{value:.6f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="reptile", description="Analyze self-similar replication tiles.")
    sub = p.add_subparsers(dest="command", required=True)
    spec_help = "spec JSON file or gallery:NAME"

    a = sub.add_parser("analyze", help="full neighbor-graph analysis as JSON")
    a.add_argument("spec", help=spec_help)
    a.add_argument("--out", help="write the report here instead of stdout")
    a.add_argument("--no-timing", action="store_true", help="omit timing_ms for reproducible output")
    a.set_defaults(func=cmd_analyze)

    r = sub.add_parser("render", help="draw the depth-n subdivision")
    r.add_argument("spec", help=spec_help)
    r.add_argument("--depth", type=int, default=2)
    r.add_argument("--format", choices=("svg", "ppm"), default="svg")
    r.add_argument("--size", type=int, default=512, help="PPM side length in pixels")
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_render)

    n = sub.add_parser("neighbors", help="edge-neighbor arrows and DOT export")
    n.add_argument("spec", help=spec_help)
    n.add_argument("--dot", help="write the graph in DOT format")
    n.add_argument("--edges-only", action="store_true", help="restrict the DOT output to root and edge neighbors")
    n.add_argument("--table", action="store_true", help="print the edge-neighbor arrow table")
    n.set_defaults(func=cmd_neighbors)

    g = sub.add_parser("gallery", help="built-in specs")
    g.add_argument("action", choices=("list", "export"))
    g.add_argument("name", nargs="?")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gallery)

    o = sub.add_parser("orientations", help="histogram of piece orientations")
    o.add_argument("spec", help=spec_help)
    o.add_argument("--depth", type=int, default=6)
    o.add_argument("--bins", type=int, default=360)
    o.add_argument("--out", help="CSV destination (stdout if omitted)")
    o.set_defaults(func=cmd_orientations)

    d = sub.add_parser("dimension", help="boundary dimension per edge component")
    d.add_argument("spec", help=spec_help)
    d.add_argument("--out")
    d.set_defaults(func=cmd_dimension)

    ar = sub.add_parser("area", help="pixel-coverage area estimate")
    ar.add_argument("spec", help=spec_help)
    ar.add_argument("--resolution", type=int, default=2048)
    ar.add_argument("--depth", type=int, default=8)
    ar.add_argument("--seed", type=int, default=0)
    ar.set_defaults(func=cmd_area)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _IOFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except BudgetExceeded as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValidationFailed, SpecFormatError, UnknownGalleryName) as exc:
        print(f"invalid spec: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ReptileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
