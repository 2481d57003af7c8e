"""Neighbor graphs of self-similar sets.

Vertices are neighbor maps h (isometries relating two pieces); an arrow
labelled (i, j) runs from h to f_i^-1 h f_j.  Vertex 0 is always the
identity map, the root.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

import networkx as nx

from .errors import NotPointNeighbor, VertexBudgetExceeded
from .exact_affine import RationalAffineMap, Vec2Q, compose
from .ifs_model import SubdivisionIFS, base_point, fixed_point, piece_map

DEFAULT_MAX_VERTICES = 10**6
ROOT = 0

Arrow = tuple[int, int, int, int]


@dataclass
class NeighborGraph:
    vertices: list[RationalAffineMap]
    arrows: list[Arrow]
    ifs: SubdivisionIFS
    index: dict[RationalAffineMap, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {h: k for k, h in enumerate(self.vertices)}
        self._out: Optional[list[list[Arrow]]] = None

    root = ROOT

    def __len__(self):
        return len(self.vertices)

    def vertex(self, h: RationalAffineMap) -> int:
        return self.index[h]

    def out_arrows(self, v: int) -> list[Arrow]:
        if self._out is None:
            out: list[list[Arrow]] = [[] for _ in self.vertices]
            for arrow in self.arrows:
                out[arrow[0]].append(arrow)
            self._out = out
        return self._out[v]

    def out_degree(self, v: int) -> int:
        return len(self.out_arrows(v))

    def arrows_into_root(self) -> list[Arrow]:
        return [a for a in self.arrows if a[1] == ROOT and not (a[0] == ROOT and a[2] == a[3])]

    def to_networkx(self, vertices: Optional[Iterable[int]] = None) -> nx.MultiDiGraph:
        keep = set(range(len(self.vertices)) if vertices is None else vertices)
        g = nx.MultiDiGraph()
        g.add_nodes_from(sorted(keep))
        for u, v, i, j in self.arrows:
            if u in keep and v in keep:
                g.add_edge(u, v, label=(i, j))
        return g


@dataclass
class CandidateGraph(NeighborGraph):
    bound_sq: Fraction = Fraction(0)

    @property
    def bound_used(self) -> float:
        return math.sqrt(self.bound_sq)


def _displacement_ok(h: RationalAffineMap, px: int, py: int, pe: int, bn: int, bd: int) -> bool:
    # ||h(p) - p||^2 <= bn/bd with p = (px, py)/pe, all in integers
    (a, b, c, d, e, f), den = h.key
    x = a * px + b * py + c * pe - den * px
    y = d * px + e * py + f * pe - den * py
    scale = den * pe
    return (x * x + y * y) * bd <= bn * scale * scale


def generate_candidates(
    ifs: SubdivisionIFS,
    bound_sq,
    max_vertices: int = DEFAULT_MAX_VERTICES,
) -> CandidateGraph:
    """Breadth-first search over f_i^-1 h f_j, pruning maps that move the base
    point further than sqrt(bound_sq)."""
    if max_vertices < 1:
        raise VertexBudgetExceeded(max_vertices)
    bound_sq = Fraction(bound_sq)
    p = base_point(ifs)
    pe = math.lcm(p.x.denominator, p.y.denominator)
    px, py = int(p.x * pe), int(p.y * pe)
    bn, bd = bound_sq.numerator, bound_sq.denominator

    maps = ifs.maps
    inverses = ifs.inverses()
    m = len(maps)
    identity = RationalAffineMap.identity()
    vertices = [identity]
    index = {identity: ROOT}
    arrows: list[Arrow] = []
    queue = deque([ROOT])

    while queue:
        v = queue.popleft()
        h = vertices[v]
        for i in range(m):
            left = compose(inverses[i], h)
            for j in range(m):
                if v == ROOT and i == j:
                    arrows.append((ROOT, ROOT, i + 1, j + 1))
                    continue
                nxt = compose(left, maps[j])
                w = index.get(nxt)
                if w is None:
                    if not _displacement_ok(nxt, px, py, pe, bn, bd):
                        continue
                    if len(vertices) >= max_vertices:
                        raise VertexBudgetExceeded(max_vertices)
                    w = len(vertices)
                    vertices.append(nxt)
                    index[nxt] = w
                    queue.append(w)
                arrows.append((v, w, i + 1, j + 1))
    return CandidateGraph(vertices, arrows, ifs, index, bound_sq=bound_sq)


def trim_to_proper(graph: NeighborGraph) -> NeighborGraph:
    """Repeatedly drop non-root vertices without outgoing arrows.

    What survives are the vertices admitting arbitrarily long paths, i.e.
    the maps h with A and h(A) intersecting.  Vertex order is preserved.
    """
    n = len(graph.vertices)
    outdeg = [0] * n
    incoming: list[list[int]] = [[] for _ in range(n)]
    for u, v, _, _ in graph.arrows:
        outdeg[u] += 1
        incoming[v].append(u)
    alive = [True] * n
    stack = [v for v in range(1, n) if outdeg[v] == 0]
    while stack:
        v = stack.pop()
        if not alive[v]:
            continue
        alive[v] = False
        for u in incoming[v]:
            outdeg[u] -= 1
            if outdeg[u] == 0 and u != ROOT and alive[u]:
                stack.append(u)
    renumber = {}
    vertices = []
    for v in range(n):
        if alive[v]:
            renumber[v] = len(vertices)
            vertices.append(graph.vertices[v])
    arrows = [
        (renumber[u], renumber[v], i, j)
        for u, v, i, j in graph.arrows
        if alive[u] and alive[v]
    ]
    return NeighborGraph(vertices, arrows, graph.ifs)


def check_osc(graph: NeighborGraph) -> bool:
    """No arrow ends in the root apart from its own (i, i) loops."""
    return not graph.arrows_into_root()


@dataclass(frozen=True)
class PointNeighbor:
    intersection: Vec2Q
    kind = "point"


@dataclass(frozen=True)
class EdgeNeighbor:
    kind = "edge"


NeighborClass = Union[PointNeighbor, EdgeNeighbor]


def bounded_path_vertices(graph: NeighborGraph) -> set[int]:
    """Vertices from which the number of length-n paths stays bounded in n.

    That holds exactly when every reachable strongly connected component with
    a cycle is a single simple cycle and no cycle can reach another one.
    Such vertices have a single intersection point with A: the point may have
    a few addresses (several paths), but never a growing number of them.
    """
    g = graph.to_networkx()
    cond = nx.condensation(nx.DiGraph(g))
    members = cond.graph["mapping"]  # vertex -> component id
    comp_nodes: dict[int, list[int]] = {}
    for v, c in members.items():
        comp_nodes.setdefault(c, []).append(v)

    # cycle structure per component: 0 = acyclic, 1 = simple cycle, 2 = richer
    kind = {}
    for c, nodes in comp_nodes.items():
        inside = set(nodes)
        internal = [sum(1 for a in graph.out_arrows(v) if a[1] in inside) for v in nodes]
        if sum(internal) == 0:
            kind[c] = 0
        elif all(k == 1 for k in internal):
            kind[c] = 1
        else:
            kind[c] = 2

    # cycles[c] = number of cyclic components on the richest path out of c, capped at 2
    cycles: dict[int, int] = {}
    for c in reversed(list(nx.topological_sort(cond))):
        below = max((cycles[s] for s in cond.successors(c)), default=0)
        if kind[c] == 2:
            cycles[c] = 2
        else:
            cycles[c] = min(2, below + (1 if kind[c] == 1 else 0))
    return {v for v, c in members.items() if v != ROOT and cycles[c] <= 1}


def _unique_path(graph: NeighborGraph, v: int) -> tuple[list[int], list[int]]:
    """Follow the smallest-label arrow from v until a vertex repeats.

    Returns the first labels of the transient prefix and of the cycle.
    """
    seen: dict[int, int] = {}
    labels: list[int] = []
    while v not in seen:
        seen[v] = len(labels)
        arrows = graph.out_arrows(v)
        if not arrows:
            raise NotPointNeighbor(f"vertex {v} has no outgoing arrow")
        _, w, i, _ = min(arrows, key=lambda a: (a[2], a[3], a[1]))
        labels.append(i)
        v = w
    start = seen[v]
    return labels[:start], labels[start:]


def point_neighbor_coordinate(
    graph: NeighborGraph, h: int, point_vertices: Optional[set[int]] = None
) -> Vec2Q:
    """The single point of A ∩ h(A) for a point neighbor, computed exactly
    from an eventually periodic address."""
    if point_vertices is None:
        point_vertices = bounded_path_vertices(graph)
    if h not in point_vertices:
        raise NotPointNeighbor(f"vertex {h} is not a point neighbor")
    prefix, cycle = _unique_path(graph, h)
    ifs = graph.ifs
    return piece_map(ifs, prefix).apply(fixed_point(piece_map(ifs, cycle)))


def classify_vertices(graph: NeighborGraph) -> dict[int, NeighborClass]:
    points = bounded_path_vertices(graph)
    out: dict[int, NeighborClass] = {}
    for v in range(1, len(graph.vertices)):
        if v in points:
            out[v] = PointNeighbor(point_neighbor_coordinate(graph, v, points))
        else:
            out[v] = EdgeNeighbor()
    return out


def edge_vertices(classes: Mapping[int, NeighborClass]) -> list[int]:
    return sorted(v for v, c in classes.items() if isinstance(c, EdgeNeighbor))


def vertex_names(
    graph: NeighborGraph, known: Optional[Mapping[str, RationalAffineMap]] = None
) -> dict[int, str]:
    """Human names for vertices: ``id`` for the root, names from ``known``
    where the maps match, ``v<k>`` otherwise."""
    names = {ROOT: "id"}
    for name, h in (known or {}).items():
        v = graph.index.get(h)
        if v is not None and v != ROOT:
            names[v] = name
    for v in range(len(graph.vertices)):
        names.setdefault(v, f"v{v}")
    return names


def edge_arrow_table(
    graph: NeighborGraph,
    classes: Mapping[int, NeighborClass],
    known: Optional[Mapping[str, RationalAffineMap]] = None,
) -> list[tuple[str, str, int, int]]:
    """Arrows among the root and the edge neighbors, root loops excluded."""
    keep = set(edge_vertices(classes)) | {ROOT}
    names = vertex_names(graph, known)
    rows = [
        (names[u], names[v], i, j)
        for u, v, i, j in graph.arrows
        if u in keep and v in keep and not (u == ROOT and v == ROOT and i == j)
    ]
    return sorted(rows)


def edge_components(graph: NeighborGraph, classes: Mapping[int, NeighborClass]) -> list[list[int]]:
    """Weakly connected components of the edge-neighbor subgraph without the root."""
    sub = graph.to_networkx(edge_vertices(classes))
    comps = [sorted(c) for c in nx.weakly_connected_components(sub)]
    return sorted(comps)


def export_dot(
    graph: NeighborGraph,
    vertices: Optional[Iterable[int]] = None,
    known: Optional[Mapping[str, RationalAffineMap]] = None,
) -> str:
    """DOT text with vertices sorted by canonical map encoding."""
    keep = sorted(
        set(range(len(graph.vertices)) if vertices is None else vertices) | {ROOT},
        key=lambda v: graph.vertices[v].key,
    )
    node_id = {v: f"n{k}" for k, v in enumerate(keep)}
    names = vertex_names(graph, known)
    lines = ["digraph neighbors {"]
    for v in keep:
        label = f"{names[v]}\\n{graph.vertices[v].formula()}"
        lines.append(f'  {node_id[v]} [label="{label}"];')
    edges = sorted(
        (node_id[u], node_id[v], i, j)
        for u, v, i, j in graph.arrows
        if u in node_id and v in node_id
    )
    for u, v, i, j in edges:
        lines.append(f'  {u} -> {v} [label="{i},{j}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
