import math
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from reptile.errors import NotIsometry, SingularMap
from reptile.exact_affine import (
    GlideReflection,
    Identity,
    IrrationalRotation,
    RationalAffineMap,
    RationalRotation,
    Reflection,
    Translation,
    Vec2Q,
    classify_isometry,
    compose,
    format_rational,
    invert,
    to_rational,
)

# the five pinwheel isometries
H = [
    RationalAffineMap([[1, 0], [0, 1]]),
    RationalAffineMap([[0, 1], [1, 0]], (1, 0)),
    RationalAffineMap([[0, -1], [-1, 0]], (2, 1)),
    RationalAffineMap([[1, 0], [0, -1]], (1, 0)),
    RationalAffineMap([[0, 1], [-1, 0]], (2, 0)),
]


def test_compose_cancels_to_glide():
    assert compose(invert(H[3]), H[4]) == H[1]
    assert H[1].formula() == "(y+1, x)"


def test_compose_gives_half_turn():
    assert compose(invert(H[1]), H[2]).formula() == "(-x+1, -y+1)"


def test_identity_is_neutral():
    ident = RationalAffineMap.identity()
    for h in H:
        assert compose(ident, h) == h
        assert compose(h, ident) == h


def test_invert_singular():
    with pytest.raises(SingularMap):
        invert(RationalAffineMap([[1, 2], [2, 4]]))


def test_normal_form_hashes_equal():
    f = RationalAffineMap([["2/4", 0], [0, "1/2"]], ("3/6", 0))
    g = RationalAffineMap([[F(1, 2), 0], [0, F(1, 2)]], (F(1, 2), 0))
    assert f == g and hash(f) == hash(g)
    assert f.key == ((1, 0, 1, 0, 1, 0), 2)


def test_floats_rejected():
    with pytest.raises(TypeError):
        to_rational(0.5)
    assert to_rational("-3/6") == F(-1, 2)
    assert format_rational(F(-1, 2)) == "-1/2"
    assert format_rational(F(4)) == "4"


def test_json_round_trip():
    f = RationalAffineMap([["3/5", "-4/5"], ["4/5", "3/5"]], (1, "-1/7"))
    assert RationalAffineMap.from_json(f.to_json()) == f


def test_classify_identity_and_translation():
    assert isinstance(classify_isometry(RationalAffineMap.identity()), Identity)
    c = classify_isometry(RationalAffineMap.translation_by(1, -2))
    assert isinstance(c, Translation) and c.vector == Vec2Q.of(1, -2)


def test_classify_half_turn():
    c = classify_isometry(RationalAffineMap([[-1, 0], [0, -1]], (1, 1)))
    assert isinstance(c, RationalRotation)
    assert c.order == 2 and c.center == Vec2Q.of("1/2", "1/2")


def test_classify_quarter_turn():
    # (y+1, 1-x) turns by -90 degrees about (1, 0)
    c = classify_isometry(RationalAffineMap([[0, 1], [-1, 0]], (1, 1)))
    assert isinstance(c, RationalRotation)
    assert c.order == 4 and c.center == Vec2Q.of(1, 0)
    assert c.angle_degrees == pytest.approx(-90.0)


def test_classify_irrational_rotation():
    c = classify_isometry(RationalAffineMap([["3/5", "-4/5"], ["4/5", "3/5"]]))
    assert isinstance(c, IrrationalRotation)
    assert c.angle_degrees == pytest.approx(math.degrees(math.atan2(4, 3)), abs=1e-12)
    assert c.center == Vec2Q.of(0, 0)


def test_classify_reflection_and_glide():
    refl = classify_isometry(RationalAffineMap([[1, 0], [0, -1]], (0, 1)))
    assert isinstance(refl, Reflection)
    assert refl.contains(Vec2Q.of(7, "1/2"))
    glide = classify_isometry(H[1])
    assert isinstance(glide, GlideReflection)
    assert glide.shift_length_sq == F(1, 2)
    assert glide.contains(Vec2Q.of("1/2", 0)) and glide.contains(Vec2Q.of(1, "1/2"))


def test_classify_rejects_similarity():
    with pytest.raises(NotIsometry):
        classify_isometry(RationalAffineMap([[2, 1], [1, -2]]))


# -- properties ------------------------------------------------------------
small = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def affine_maps(invertible=True):
    entries = st.tuples(small, small, small, small)
    if invertible:
        entries = entries.filter(lambda m: m[0] * m[3] != m[1] * m[2])
    return st.builds(
        lambda m, t: RationalAffineMap([[m[0], m[1]], [m[2], m[3]]], t),
        entries,
        st.tuples(small, small),
    )


# Pythagorean triples give rational rotations by angles that are irrational
# multiples of 360 degrees, plus the four signed permutation matrices
@st.composite
def isometries(draw):
    kind = draw(st.sampled_from(["triple", "perm"]))
    if kind == "triple":
        u = draw(st.integers(1, 6))
        v = draw(st.integers(0, 6))
        n = u * u + v * v
        cos, sin = F(u * u - v * v, n), F(2 * u * v, n)
        if draw(st.booleans()):
            cos, sin = -sin, cos
    else:
        cos, sin = draw(st.sampled_from([(F(1), F(0)), (F(0), F(1)), (F(-1), F(0)), (F(0), F(-1))]))
    if draw(st.booleans()):
        lin = [[cos, -sin], [sin, cos]]
    else:
        lin = [[cos, sin], [sin, -cos]]
    return RationalAffineMap(lin, (draw(small), draw(small)))


points = st.builds(Vec2Q, small, small)


@given(affine_maps(), affine_maps())
def test_inverse_of_composition(f, g):
    assert invert(compose(f, g)) == compose(invert(g), invert(f))


@given(affine_maps(), points)
def test_apply_after_invert_is_identity(f, p):
    assert f.apply(invert(f).apply(p)) == p
    assert invert(f).apply(f.apply(p)) == p


@given(affine_maps(), affine_maps(), affine_maps())
def test_composition_associative(f, g, h):
    assert compose(f, compose(g, h)) == compose(compose(f, g), h)


@given(affine_maps(invertible=False), points)
def test_compose_matches_application(f, p):
    g = RationalAffineMap([[1, 2], [3, 5]], (F(1, 3), -1))
    assert compose(f, g).apply(p) == f.apply(g.apply(p))


@given(isometries())
def test_classification_exhaustive(h):
    c = classify_isometry(h)
    assert c.kind in {
        "identity", "translation", "rational_rotation",
        "irrational_rotation", "reflection", "glide_reflection",
    }
    if h.det > 0:
        assert c.kind in {"identity", "translation", "rational_rotation", "irrational_rotation"}
    else:
        assert c.kind in {"reflection", "glide_reflection"}


@given(isometries())
def test_rotation_center_is_fixed(h):
    c = classify_isometry(h)
    if isinstance(c, (RationalRotation, IrrationalRotation)):
        assert h.apply(c.center) == c.center
    if isinstance(c, RationalRotation):
        power = RationalAffineMap.identity()
        for _ in range(c.order):
            power = compose(h, power)
        assert power == RationalAffineMap.identity()


@given(isometries())
def test_reflection_axis_structure(h):
    c = classify_isometry(h)
    if isinstance(c, (Reflection, GlideReflection)):
        # h maps the axis into itself and h∘h is a translation along it
        q = c.point + c.direction
        assert c.contains(h.apply(c.point)) and c.contains(h.apply(q))
        hh = compose(h, h)
        assert hh.linear == RationalAffineMap.identity()
        shift = hh.translation
        assert shift.x * c.direction.y - shift.y * c.direction.x == 0
        if isinstance(c, GlideReflection):
            # h∘h shifts by twice the glide length
            assert shift.norm_sq() == 4 * c.shift_length_sq
        else:
            assert shift.norm_sq() == 0


@given(isometries(), isometries())
def test_class_invariant_under_conjugation(h, k):
    c1 = classify_isometry(h)
    c2 = classify_isometry(compose(k, compose(h, invert(k))))
    assert c1.kind == c2.kind
    if isinstance(c1, RationalRotation):
        assert c1.order == c2.order
    if isinstance(c1, GlideReflection):
        assert c1.shift_length_sq == c2.shift_length_sq
