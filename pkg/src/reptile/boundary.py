"""Graph-directed boundary systems derived from the edge-neighbor subgraph.

Each edge neighbor h gives a boundary piece B_h = A ∩ h(A) satisfying
B_h = U f_i(B_h') over the arrows (h, h', i, j) between edge neighbors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

import networkx as nx
import numpy as np

from . import polygon as poly
from .errors import NilpotentMatrix, NoEdgeNeighbors, NotStronglyConnected, ReptileError
from .exact_affine import RationalAffineMap, Vec2Q, compose
from .ifs_model import SubdivisionIFS
from .neighbor_engine import NeighborClass, NeighborGraph, edge_vertices

DEFAULT_TOLERANCE = 1e-12
MAX_ITERATIONS = 100_000


@dataclass
class BoundarySystem:
    pieces: list[int]  # graph vertex ids of the edge neighbors
    equations: dict[int, list[tuple[int, int]]]  # piece -> [(map index i, target piece)]
    ifs: SubdivisionIFS

    @property
    def adjacency(self) -> np.ndarray:
        pos = {p: k for k, p in enumerate(self.pieces)}
        mat = np.zeros((len(self.pieces), len(self.pieces)), dtype=np.int64)
        for p in self.pieces:
            for _, q in self.equations[p]:
                mat[pos[p], pos[q]] += 1
        return mat

    def restrict(self, pieces: Sequence[int]) -> "BoundarySystem":
        keep = set(pieces)
        missing = [q for p in pieces for _, q in self.equations[p] if q not in keep]
        if missing:
            raise ReptileError(f"pieces {sorted(pieces)} do not form a closed subsystem")
        return BoundarySystem(sorted(keep), {p: self.equations[p] for p in sorted(keep)}, self.ifs)

    def components(self) -> list[list[int]]:
        """Weakly connected components, each a closed subsystem."""
        g = nx.DiGraph()
        g.add_nodes_from(self.pieces)
        g.add_edges_from((p, q) for p in self.pieces for _, q in self.equations[p])
        return sorted(sorted(c) for c in nx.weakly_connected_components(g))

    def is_strongly_connected(self) -> bool:
        g = nx.DiGraph()
        g.add_nodes_from(self.pieces)
        g.add_edges_from((p, q) for p in self.pieces for _, q in self.equations[p])
        return nx.is_strongly_connected(g)


def boundary_equations(graph: NeighborGraph, classes: Mapping[int, NeighborClass]) -> BoundarySystem:
    pieces = edge_vertices(classes)
    if not pieces:
        raise NoEdgeNeighbors("the neighbor graph has no edge neighbors")
    keep = set(pieces)
    equations = {p: [] for p in pieces}
    for u, v, i, j in graph.arrows:
        if u in keep and v in keep:
            equations[u].append((i, j, v))
    return BoundarySystem(
        pieces,
        {p: [(i, v) for i, _, v in sorted(terms)] for p, terms in equations.items()},
        graph.ifs,
    )


@dataclass(frozen=True)
class DimensionResult:
    spectral_radius: float
    dimension: float
    iterations: int
    residual: float
    eigenvector: tuple[float, ...] = ()


def _is_nilpotent(mat: np.ndarray) -> bool:
    # exact check on Python integers: M^n == 0
    n = mat.shape[0]
    power = mat.astype(object)
    base = mat.astype(object)
    for _ in range(max(n - 1, 0)):
        power = power.dot(base)
    return not power.any()


def spectral_radius(adjacency, tolerance: float = DEFAULT_TOLERANCE) -> DimensionResult:
    """Perron root of a nonnegative matrix by power iteration.

    Iterates on M + I, which is primitive whenever M is irreducible; this
    avoids the oscillation of plain power iteration on periodic graphs.
    The ``dimension`` field is left at nan; see ``boundary_dimension``.
    """
    mat = np.asarray(adjacency)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] == 0:
        raise ValueError("adjacency must be a nonempty square matrix")
    if (mat < 0).any():
        raise ValueError("adjacency must be nonnegative")
    if _is_nilpotent(mat):
        raise NilpotentMatrix("spectral radius is 0: the boundary is a finite set")
    shifted = mat.astype(float) + np.eye(mat.shape[0])
    v = np.ones(mat.shape[0]) / mat.shape[0]
    rho = 0.0
    residual = math.inf
    for it in range(1, MAX_ITERATIONS + 1):
        w = shifted @ v
        rho_new = float(v @ w / (v @ v))
        v = w / w.sum()
        residual = float(np.abs(mat @ v - (rho_new - 1.0) * v).max() / np.abs(v).max())
        if abs(rho_new - rho) < tolerance and residual < tolerance:
            rho = rho_new
            break
        rho = rho_new
    else:
        raise ReptileError(f"power iteration did not converge in {MAX_ITERATIONS} steps")
    # polish with the Rayleigh quotient of the original matrix
    radius = float(v @ (mat @ v) / (v @ v))
    residual = float(np.abs(mat @ v - radius * v).max() / np.abs(v).max())
    return DimensionResult(radius, math.nan, it, residual, tuple(v / v.max()))


def boundary_dimension(
    system: BoundarySystem, contraction_ratio_squared=None, tolerance: float = DEFAULT_TOLERANCE
) -> DimensionResult:
    """Similarity dimension log(rho) / log(1/r) of the graph-directed system."""
    r_sq = Fraction(
        system.ifs.contraction_ratio_squared if contraction_ratio_squared is None else contraction_ratio_squared
    )
    if not system.pieces:
        raise NoEdgeNeighbors("empty boundary system")
    res = spectral_radius(system.adjacency, tolerance)
    dim = 2 * math.log(res.spectral_radius) / -math.log(r_sq)
    return DimensionResult(res.spectral_radius, dim, res.iterations, res.residual, res.eigenvector)


def component_dimensions(system: BoundarySystem) -> list[tuple[list[int], DimensionResult]]:
    return [(comp, boundary_dimension(system.restrict(comp))) for comp in system.components()]


def measure_ratios(system: BoundarySystem) -> dict[int, float]:
    """Perron right eigenvector normalized to max 1, one entry per piece.

    For a strongly connected system these are the ratios of the Hausdorff
    measures of the boundary pieces in the boundary dimension.
    """
    if not system.is_strongly_connected():
        raise NotStronglyConnected("measure ratios need a strongly connected system")
    res = spectral_radius(system.adjacency)
    return dict(zip(system.pieces, res.eigenvector))


# -- hull certificates and arcs ---------------------------------------------
def _image(f: RationalAffineMap, polygon) -> list[Vec2Q]:
    return poly.normalize_convex([f.apply(p) for p in polygon])


def verify_boundary_osc(system: BoundarySystem, polygons: Mapping[int, Sequence]) -> bool:
    """Check f_i(C_h') ⊆ C_h for every equation term, with pairwise disjoint
    interiors among the terms of each equation.  All tests are exact."""
    hulls = {p: poly.normalize_convex(polygons[p]) for p in system.pieces}
    maps = system.ifs.maps
    for p in system.pieces:
        images = [_image(maps[i - 1], hulls[q]) for i, q in system.equations[p]]
        if not all(poly.contains_polygon(hulls[p], img) for img in images):
            return False
        for a in range(len(images)):
            for b in range(a + 1, len(images)):
                if not poly.interiors_disjoint(images[a], images[b]):
                    return False
    return True


@dataclass(frozen=True)
class ArcPlan:
    """Ordering data for drawing one boundary piece as a chain of hull images."""

    start: Vec2Q
    end: Vec2Q
    children: tuple[tuple[int, int, bool], ...]  # (map index, target piece, reversed)


def _shared_vertices(p1, p2) -> set:
    return set(map(tuple, p1)) & set(map(tuple, p2))


def arc_plans(system: BoundarySystem, polygons: Mapping[int, Sequence]) -> dict[int, ArcPlan]:
    """Endpoints and child order for every piece.

    Children of a piece are chained so that consecutive hull images share a
    single vertex.  Endpoints are then found by constraint propagation: each
    child's endpoints must map to the connection points around it.
    """
    hulls = {p: poly.normalize_convex(polygons[p]) for p in system.pieces}
    maps = system.ifs.maps
    chains: dict[int, tuple[list[tuple[int, int]], list[tuple], list[list[Vec2Q]]]] = {}
    for p in system.pieces:
        terms = list(system.equations[p])
        images = [_image(maps[i - 1], hulls[q]) for i, q in terms]
        k = len(terms)
        touch = {a: [] for a in range(k)}
        for a in range(k):
            for b in range(a + 1, k):
                shared = _shared_vertices(images[a], images[b])
                if shared:
                    if len(shared) != 1:
                        raise ReptileError(f"hull images of piece {p} share more than a point")
                    touch[a].append(b)
                    touch[b].append(a)
        ends = [a for a in range(k) if len(touch[a]) <= 1]
        if k > 1 and (len(ends) != 2 or any(len(t) > 2 for t in touch.values())):
            raise ReptileError(f"hull images of piece {p} do not form a chain")
        order = [ends[0]] if k > 1 else [0]
        while len(order) < k:
            nxt = [b for b in touch[order[-1]] if b not in order]
            order.append(nxt[0])
        links = [
            next(iter(_shared_vertices(images[order[n]], images[order[n + 1]])))
            for n in range(k - 1)
        ]
        chains[p] = ([terms[a] for a in order], links, [images[a] for a in order])

    # candidate endpoint pairs; pruned until consistent
    cand = {
        p: {(u, v) for u in hulls[p] for v in hulls[p] if u != v} for p in system.pieces
    }
    changed = True
    while changed:
        changed = False
        for p in system.pieces:
            terms, links, _ = chains[p]
            ok = set()
            for u, v in cand[p]:
                for pair in ((u, v), (v, u)):
                    pts = [pair[0]] + [Vec2Q(*x) for x in links] + [pair[1]]
                    if all(
                        _child_fits(maps[i - 1], cand[q], pts[n], pts[n + 1])
                        for n, (i, q) in enumerate(terms)
                    ):
                        ok.add((u, v))
                        break
            if ok != cand[p]:
                cand[p] = ok
                changed = True
    plans = {}
    for p in system.pieces:
        if len({frozenset(pair) for pair in cand[p]}) != 1:
            raise ReptileError(f"arc endpoints of piece {p} are not determined by the hulls")
        start, end = min(cand[p])
        terms, links, _ = chains[p]
        pts = [start] + [Vec2Q(*x) for x in links] + [end]
        if not all(
            _child_fits(maps[i - 1], cand[q], pts[n], pts[n + 1]) for n, (i, q) in enumerate(terms)
        ):
            terms, links = terms[::-1], links[::-1]
            pts = [start] + [Vec2Q(*x) for x in links] + [end]
        children = []
        for n, (i, q) in enumerate(terms):
            f = maps[i - 1]
            cs, ce = min(cand[q])
            forward = f.apply(cs) == pts[n] and f.apply(ce) == pts[n + 1]
            children.append((i, q, not forward))
        plans[p] = ArcPlan(start, end, tuple(children))
    return plans


def _child_fits(f: RationalAffineMap, pairs, a, b) -> bool:
    for u, v in pairs:
        fu, fv = f.apply(u), f.apply(v)
        if (fu == a and fv == b) or (fu == b and fv == a):
            return True
    return False


def boundary_polyline(
    system: BoundarySystem,
    polygons: Mapping[int, Sequence],
    piece: int,
    depth: int,
    plans: Optional[dict[int, ArcPlan]] = None,
) -> list[Vec2Q]:
    """Connection points of the depth-n chain of hull images, in arc order."""
    plans = plans or arc_plans(system, polygons)
    maps = system.ifs.maps
    cells = [(RationalAffineMap.identity(), piece, False)]
    for _ in range(depth):
        nxt = []
        for f, p, rev in cells:
            kids = plans[p].children
            for i, q, flip in (reversed(kids) if rev else kids):
                nxt.append((compose(f, maps[i - 1]), q, rev != flip))
        cells = nxt
    f0, p0, rev0 = cells[0]
    first = plans[p0].end if rev0 else plans[p0].start
    out = [f0.apply(first)]
    for f, p, rev in cells:
        out.append(f.apply(plans[p].start if rev else plans[p].end))
    return out


def polyline_cells(
    system: BoundarySystem,
    polygons: Mapping[int, Sequence],
    piece: int,
    depth: int,
) -> list[list[Vec2Q]]:
    """Hull images of the depth-n chain for ``piece``, in arc order."""
    plans = arc_plans(system, polygons)
    maps = system.ifs.maps
    cells = [(RationalAffineMap.identity(), piece, False)]
    for _ in range(depth):
        nxt = []
        for f, p, rev in cells:
            kids = plans[p].children
            for i, q, flip in (reversed(kids) if rev else kids):
                nxt.append((compose(f, maps[i - 1]), q, rev != flip))
        cells = nxt
    return [_image(f, poly.normalize_convex(polygons[p])) for f, p, _ in cells]
