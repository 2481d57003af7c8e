import itertools
import time
from fractions import Fraction as F

import numpy as np
import pytest

from reptile import gallery
from reptile.errors import NotPointNeighbor, VertexBudgetExceeded
from reptile.exact_affine import RationalAffineMap, Vec2Q, classify_isometry, compose, invert
from reptile.ifs_model import SubdivisionIFS, derive_subdivision
from reptile.neighbor_engine import (
    EdgeNeighbor,
    NeighborGraph,
    PointNeighbor,
    check_osc,
    edge_arrow_table,
    edge_components,
    export_dot,
    generate_candidates,
    point_neighbor_coordinate,
    trim_to_proper,
)


def _census(a):
    r = a.report
    return (r["candidate_count"], r["proper_count_including_root"], r["edge_count"], r["point_count"], r["osc"])


def test_pinwheel1_census(pinwheel1):
    assert _census(pinwheel1) == (955, 81, 11, 69, True)


def test_pinwheel2_census(pinwheel2):
    assert _census(pinwheel2)[2:] == (11, 35, True)
    assert pinwheel2.report["proper_count_including_root"] == 47


def test_square4_census(square4):
    assert _census(square4)[1:] == (9, 4, 4, True)


def test_candidate_search_is_fast():
    ifs = derive_subdivision(gallery.load("pinwheel1"))
    start = time.perf_counter()
    generate_candidates(ifs, 8)
    assert time.perf_counter() - start < 2.0


def test_proper_counts_consistent(analyses):
    for a in analyses.values():
        r = a.report
        assert r["proper_count_including_root"] == r["edge_count"] + r["point_count"] + 1


# -- brute-force oracle for the square ---------------------------------------
def _raster_square(ox, oy, n=8):
    # closed unit square [ox, ox+1] x [oy, oy+1] sampled at step 1/n, as lattice indices
    xs = np.arange(ox * n, (ox + 1) * n + 1)
    ys = np.arange(oy * n, (oy + 1) * n + 1)
    return {(int(x), int(y)) for x in xs for y in ys}


def test_square4_against_raster_oracle(square4):
    base = _raster_square(0, 0)
    expected = {}
    for a, b in itertools.product(range(-3, 4), repeat=2):
        if (a, b) == (0, 0):
            continue
        common = base & _raster_square(a, b)
        if len(common) == 1:
            expected[(a, b)] = "point"
        elif common:
            expected[(a, b)] = "edge"
    got = {}
    for v, cls in square4.classes.items():
        h = square4.graph.vertices[v]
        assert classify_isometry(h).kind == "translation"
        got[(int(h.c), int(h.f))] = cls.kind
    assert got == expected


def test_square4_point_coordinates(square4):
    pts = {}
    for v, cls in square4.classes.items():
        if isinstance(cls, PointNeighbor):
            h = square4.graph.vertices[v]
            pts[(int(h.c), int(h.f))] = cls.intersection
    assert pts == {
        (1, 1): Vec2Q.of(1, 1),
        (-1, 1): Vec2Q.of(0, 1),
        (1, -1): Vec2Q.of(1, 0),
        (-1, -1): Vec2Q.of(0, 0),
    }


def test_point_coordinate_lies_in_both_copies(pinwheel1):
    # the intersection point x of A and h(A) satisfies: h^-1(x) is the
    # intersection point for the inverse neighbor
    g = pinwheel1.graph
    for v, cls in pinwheel1.classes.items():
        if isinstance(cls, PointNeighbor):
            h = g.vertices[v]
            w = g.index[invert(h)]
            assert pinwheel1.classes[w].intersection == invert(h).apply(cls.intersection)


def test_point_coordinate_rejects_edge(pinwheel1):
    edge = next(v for v, c in pinwheel1.classes.items() if isinstance(c, EdgeNeighbor))
    with pytest.raises(NotPointNeighbor):
        point_neighbor_coordinate(pinwheel1.graph, edge)


# -- graph invariants ----------------------------------------------------------
@pytest.mark.parametrize("name", gallery.NAMES)
def test_arrow_soundness(analyses, name):
    g = analyses[name].graph
    maps, inv = g.ifs.maps, g.ifs.inverses()
    for u, v, i, j in g.arrows:
        assert compose(inv[i - 1], compose(g.vertices[u], maps[j - 1])) == g.vertices[v]


@pytest.mark.parametrize("name", gallery.NAMES)
def test_closure_under_inversion(analyses, name):
    g = analyses[name].graph
    arrows = set(g.arrows)
    for h in g.vertices:
        assert invert(h) in g.index
    for u, v, i, j in g.arrows:
        if u == 0 and v == 0:
            continue
        iu, iv = (g.index[invert(g.vertices[x])] for x in (u, v))
        assert (iu, iv, j, i) in arrows


@pytest.mark.parametrize("name", gallery.NAMES)
def test_trim_idempotent(analyses, name):
    g = analyses[name].graph
    again = trim_to_proper(g)
    assert again.vertices == g.vertices and again.arrows == g.arrows


@pytest.mark.parametrize("name", gallery.NAMES)
def test_all_vertices_reachable(analyses, name):
    import networkx as nx

    g = analyses[name].graph
    reach = nx.descendants(g.to_networkx(), 0) | {0}
    assert reach == set(range(len(g)))


@pytest.mark.parametrize("name", gallery.NAMES)
def test_dichotomy(analyses, name):
    a = analyses[name]
    assert set(a.classes) == set(range(1, len(a.graph)))
    for v, c in a.classes.items():
        assert isinstance(c, (PointNeighbor, EdgeNeighbor))
        if isinstance(c, EdgeNeighbor):
            # edge neighbors branch somewhere downstream
            assert a.graph.out_degree(v) >= 1


def test_determinism():
    ifs = derive_subdivision(gallery.load("pinwheel1"))
    g1, g2 = generate_candidates(ifs, 8), generate_candidates(ifs, 8)
    assert g1.vertices == g2.vertices and g1.arrows == g2.arrows


def test_edge_components_pinwheel1(pinwheel1):
    comps = edge_components(pinwheel1.graph, pinwheel1.classes)
    names = sorted(sorted(pinwheel1.names[v] for v in c) for c in comps)
    assert names == [["a", "a-", "b", "b-", "s", "s-", "t", "t-"], ["p", "r", "r-"]]


def test_square4_edge_components(square4):
    assert len(edge_components(square4.graph, square4.classes)) == 4


# -- OSC and budgets -------------------------------------------------------------
def test_duplicate_piece_breaks_osc():
    ifs = derive_subdivision(gallery.load("square4"))
    dup = SubdivisionIFS(ifs.maps + (ifs.maps[0],), F(1, 4))
    graph = trim_to_proper(generate_candidates(dup, 8))
    assert not check_osc(graph)
    assert (0, 0, 1, 5) in graph.arrows


def test_gallery_osc(analyses):
    assert all(check_osc(a.graph) for a in analyses.values())


def test_vertex_budget():
    ifs = derive_subdivision(gallery.load("pinwheel1"))
    with pytest.raises(VertexBudgetExceeded):
        generate_candidates(ifs, 8, max_vertices=1)
    with pytest.raises(VertexBudgetExceeded):
        generate_candidates(ifs, 8, max_vertices=954)
    assert len(generate_candidates(ifs, 8, max_vertices=955)) == 955


def test_tight_bound_keeps_root_only():
    ifs = derive_subdivision(gallery.load("square4"))
    g = generate_candidates(ifs, F(1, 100))
    assert len(g) == 1 and len(g.arrows) == 4


def test_bound_monotone():
    ifs = derive_subdivision(gallery.load("pinwheel1"))
    sizes = [len(generate_candidates(ifs, b)) for b in (2, 4, 8, 12)]
    assert sizes == sorted(sizes)
    # a bound past (2 diam)^2 adds candidates but no proper neighbors
    assert len(trim_to_proper(generate_candidates(ifs, 12))) == 81


# -- exports ------------------------------------------------------------------------
def test_dot_export_square4(square4):
    dot = export_dot(square4.graph, known=square4.spec.neighbor_names)
    assert dot.count("[label=\"") - dot.count("->") == 9
    assert dot == export_dot(square4.graph, known=square4.spec.neighbor_names)


def test_dot_root_only():
    g = NeighborGraph([RationalAffineMap.identity()], [], None)
    assert export_dot(g) == 'digraph neighbors {\n  n0 [label="id\\n(x, y)"];\n}\n'


def test_edge_table_excludes_root_loops(pinwheel1):
    rows = edge_arrow_table(pinwheel1.graph, pinwheel1.classes, pinwheel1.spec.neighbor_names)
    assert len(rows) == 35
    assert ("p", "p", 4, 4) in rows
    assert not any(u == v == "id" for u, v, _, _ in rows)
