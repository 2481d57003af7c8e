"""End-to-end analysis of one reptile spec, producing a JSON-ready report."""
from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import networkx as nx

from . import polygon as poly
from .boundary import (
    BoundarySystem,
    boundary_equations,
    component_dimensions,
    measure_ratios,
    verify_boundary_osc,
)
from .errors import ReptileError
from .exact_affine import classify_isometry, format_rational
from .ifs_model import (
    ReptileSpec,
    SubdivisionIFS,
    ValidationReport,
    default_depth,
    derive_subdivision,
    diameter_bound,
    neighbor_bound_sq,
    tile_hull,
    validate,
)
from .neighbor_engine import (
    DEFAULT_MAX_VERTICES,
    CandidateGraph,
    NeighborGraph,
    PointNeighbor,
    check_osc,
    classify_vertices,
    edge_components,
    edge_vertices,
    generate_candidates,
    trim_to_proper,
    vertex_names,
)


class ValidationFailed(ReptileError):
    def __init__(self, report: ValidationReport):
        super().__init__("; ".join(report.violations))
        self.report = report


@dataclass
class Analysis:
    """Everything computed for a spec; ``report`` is the serializable summary."""

    spec: ReptileSpec
    ifs: SubdivisionIFS
    validation: ValidationReport
    bound_sq: Fraction
    bound_method: str
    candidates: CandidateGraph
    graph: NeighborGraph
    classes: dict
    names: dict[int, str]
    system: Optional[BoundarySystem]
    report: dict = field(default_factory=dict)

    def named_polygons(self) -> dict[int, tuple]:
        """Boundary hulls of the input, keyed by graph vertex."""
        out = {}
        for name, pts in self.spec.boundary_hulls.items():
            h = self.spec.neighbor_names.get(name)
            if h is not None and h in self.graph.index:
                out[self.graph.index[h]] = pts
        return out


def neighbor_bound(spec: ReptileSpec, ifs: SubdivisionIFS) -> tuple[Fraction, str]:
    """Squared pruning radius (2 diam A)^2 and how it was obtained.

    A certified hull gives an exact rational diameter; otherwise the
    sampled diameter bound at the default depth is rounded up.
    """
    hull = tile_hull(spec, ifs)
    if hull is not None:
        return 4 * poly.max_dist_sq(hull), "hull"
    depth = max(default_depth(ifs.m), 1)
    while 2 * ifs.ratio**depth >= 1:
        depth += 1
    return neighbor_bound_sq(diameter_bound(ifs, depth).upper), f"sampled(depth={depth})"


def _piece_label(names, pieces):
    return [names[p] for p in pieces]


def analyze(spec: ReptileSpec, max_vertices: int = DEFAULT_MAX_VERTICES) -> Analysis:
    started = time.perf_counter()
    validation = validate(spec)
    if not validation.valid:
        raise ValidationFailed(validation)
    ifs = derive_subdivision(spec)
    bound_sq, method = neighbor_bound(spec, ifs)
    candidates = generate_candidates(ifs, bound_sq, max_vertices)
    graph = trim_to_proper(candidates)
    classes = classify_vertices(graph)
    names = vertex_names(graph, spec.neighbor_names)
    edges = edge_vertices(classes)
    osc = check_osc(graph)

    system = boundary_equations(graph, classes) if edges else None
    components, ratios, boundary_osc = [], [], None
    if system is not None:
        for comp, res in component_dimensions(system):
            components.append(
                {
                    "pieces": _piece_label(names, comp),
                    "spectral_radius": res.spectral_radius,
                    "dimension": res.dimension,
                }
            )
        # measure ratios live on strongly connected pieces of the system
        g = nx.DiGraph()
        g.add_nodes_from(system.pieces)
        g.add_edges_from((p, q) for p in system.pieces for _, q in system.equations[p])
        for scc in sorted(sorted(c) for c in nx.strongly_connected_components(g)):
            if not any(q in scc for p in scc for _, q in system.equations[p]):
                continue
            closed = all(q in scc for p in scc for _, q in system.equations[p])
            if not closed:
                continue
            sub = system.restrict(scc)
            ratios.append({names[p]: v for p, v in measure_ratios(sub).items()})

    analysis = Analysis(
        spec, ifs, validation, bound_sq, method, candidates, graph, classes, names, system
    )
    polygons = analysis.named_polygons()
    if system is not None and polygons:
        try:
            boundary_osc = verify_boundary_osc(system.restrict(sorted(polygons)), polygons)
        except ReptileError:
            boundary_osc = False

    iso_census: Counter = Counter()
    for v in range(1, len(graph)):
        iso_census[f"{classes[v].kind}:{classify_isometry(graph.vertices[v]).kind}"] += 1

    hull_ok = None
    if spec.hull is not None:
        hull_ok = tile_hull(spec, ifs) is not None

    dims = [c["dimension"] for c in components]
    report = {
        "name": spec.name,
        "validation": validation.to_json(),
        "neighbor_bound_sq": format_rational(bound_sq),
        "neighbor_bound_method": method,
        "hull_certificate": hull_ok,
        "candidate_count": len(candidates),
        "proper_count_including_root": len(graph),
        "edge_count": len(edges),
        "point_count": len(graph) - 1 - len(edges),
        "osc": osc,
        "edge_components": len(edge_components(graph, classes)),
        "components": components,
        "boundary_dimension": max(dims) if dims else None,
        "measure_ratios": ratios,
        "boundary_osc": boundary_osc,
        "edge_neighbors": [
            {
                "name": names[v],
                "map": graph.vertices[v].formula(),
                "isometry": classify_isometry(graph.vertices[v]).to_json(),
            }
            for v in edges
        ],
        "isometry_census": dict(sorted(iso_census.items())),
        "timing_ms": round((time.perf_counter() - started) * 1000.0, 3),
    }
    analysis.report = report
    return analysis


def point_neighbor_points(analysis: Analysis) -> dict[int, object]:
    return {v: c.intersection for v, c in analysis.classes.items() if isinstance(c, PointNeighbor)}
