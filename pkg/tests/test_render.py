import re
from fractions import Fraction as F

import pytest

from reptile import gallery
from reptile.errors import BudgetExceeded
from reptile.exact_affine import RationalAffineMap, Vec2Q
from reptile.ifs_model import SubdivisionIFS, covering_polygon, derive_subdivision
from reptile.render import (
    ColorScheme,
    area_estimate,
    orientation_angle,
    orientation_census,
    piece_maps,
    render_ppm,
    render_subdivision,
)


def _load(name):
    spec = gallery.load(name)
    ifs = derive_subdivision(spec)
    return spec, ifs, covering_polygon(ifs, spec)


@pytest.mark.parametrize("depth,count", [(0, 1), (1, 5), (2, 25)])
def test_svg_region_count(depth, count):
    _, ifs, hull = _load("pinwheel1")
    svg = render_subdivision(ifs, depth, format="svg", hull=hull).decode()
    assert svg.count("<polygon") == count


def test_svg_depth0_is_hull():
    _, ifs, hull = _load("pinwheel1")
    svg = render_subdivision(ifs, 0, format="svg", hull=hull).decode()
    pts = re.search(r'points="([^"]+)"', svg).group(1).split()
    assert len(pts) == len(hull) == 6


def test_render_byte_determinism():
    _, ifs, hull = _load("pinwheel2")
    assert render_subdivision(ifs, 2, format="svg", hull=hull) == render_subdivision(
        ifs, 2, format="svg", hull=hull
    )
    assert render_ppm(ifs, 4, size=64) == render_ppm(ifs, 4, size=64)


def test_ppm_header():
    _, ifs, _ = _load("square4")
    data = render_subdivision(ifs, 3, format="ppm", size=32)
    assert data.startswith(b"P6\n32 32\n255\n")
    assert len(data) == len(b"P6\n32 32\n255\n") + 32 * 32 * 3


def test_render_budget():
    _, ifs, hull = _load("pinwheel1")
    with pytest.raises(BudgetExceeded):
        render_subdivision(ifs, 6, format="svg", hull=hull, budget=1000)


def test_piece_maps_lexicographic():
    _, ifs, _ = _load("square4")
    words = [w for w, _ in piece_maps(ifs, 2)]
    assert words == sorted(words) and len(words) == 16


def test_color_scheme():
    scheme = ColorScheme()
    assert scheme.color(()) == (255, 255, 255)
    assert scheme.color((1, 2)) != scheme.color((2, 1))
    with pytest.raises(ValueError):
        ColorScheme(depth_weighting=(0.8, 0.5))


# -- orientations ------------------------------------------------------------
def test_depth1_det_split():
    _, ifs, _ = _load("pinwheel1")
    c = orientation_census(ifs, 1)
    assert sum(c.det_minus) == 2 and sum(c.det_plus) == 3


@pytest.mark.parametrize("name", gallery.NAMES)
@pytest.mark.parametrize("depth", [0, 1, 3, 5])
def test_census_total(name, depth):
    _, ifs, _ = _load(name)
    c = orientation_census(ifs, depth, bin_degrees=7.5)
    assert c.total == ifs.m**depth
    assert sum(c.linear_parts.values()) == ifs.m**depth


def test_distinct_orientations_grow():
    _, ifs, _ = _load("pinwheel1")
    counts = [orientation_census(ifs, n).distinct_linear_parts for n in range(1, 7)]
    assert all(b > a for a, b in zip(counts, counts[1:]))
    _, sq, _ = _load("square4")
    assert orientation_census(sq, 6).distinct_linear_parts == 1


def test_census_closed_under_pieces():
    # each depth-(n+1) linear part is a depth-n part times a piece's linear part
    _, ifs, _ = _load("pinwheel1")
    from reptile.exact_affine import compose

    lower = orientation_census(ifs, 3).linear_parts
    upper = orientation_census(ifs, 4).linear_parts
    expect = {compose(f.linear, m) for m in lower for f in ifs.maps}
    assert set(upper) == expect


def test_orientation_angle():
    assert orientation_angle(RationalAffineMap.identity()) == (1, 0.0)
    sign, angle = orientation_angle(RationalAffineMap([[0, -1], [1, 0]]))
    assert sign == 1 and angle == pytest.approx(90.0)
    sign, angle = orientation_angle(RationalAffineMap([[0, 1], [1, 0]]))
    assert sign == -1 and angle == pytest.approx(45.0)


def test_csv_layout():
    _, ifs, _ = _load("square4")
    csv = orientation_census(ifs, 2, bin_degrees=90).to_csv().splitlines()
    assert csv == ["bin_start_deg,det_plus_count,det_minus_count", "0,16,0", "90,0,0", "180,0,0", "270,0,0"]


# -- area --------------------------------------------------------------------------
def test_area_square_low_res():
    _, ifs, hull = _load("square4")
    assert area_estimate(ifs, hull, resolution=256, depth=4) == pytest.approx(1.0, abs=0.01)


def test_area_pinwheel_low_res():
    _, ifs, hull = _load("pinwheel1")
    assert area_estimate(ifs, hull, resolution=384, depth=6) == pytest.approx(0.5, abs=0.03)


def test_area_seeded():
    _, ifs, hull = _load("pinwheel2")
    a = area_estimate(ifs, hull, resolution=128, depth=4, seed=3)
    assert a == area_estimate(ifs, hull, resolution=128, depth=4, seed=3)


def test_area_degenerate_system():
    # every map equal: the attractor is a single point
    f = RationalAffineMap([[F(1, 2), 0], [0, F(1, 2)]])
    ifs = SubdivisionIFS((f, f, f, f), F(1, 4))
    hull = [Vec2Q.of(-1, -1), Vec2Q.of(1, -1), Vec2Q.of(1, 1), Vec2Q.of(-1, 1)]
    assert area_estimate(ifs, hull, resolution=128, depth=8) < 1e-3
