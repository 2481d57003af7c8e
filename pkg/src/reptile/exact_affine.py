"""Exact rational affine maps of the plane and classification of isometries.

All arithmetic is done on Python integers.  A map is stored as six integer
numerators over one positive common denominator, reduced so that the seven
integers are coprime; that normal form doubles as the hash key.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Union

from .errors import NotIsometry, SingularMap

Rational = Fraction
RationalLike = Union[int, str, Fraction]


def to_rational(value: RationalLike) -> Fraction:
    """Parse ``"p/q"``, ``"p"``, an int or a Fraction.

    Floats are rejected; they would smuggle binary rounding into exact data.
    """
    if isinstance(value, float):
        raise TypeError("floats are not accepted as exact rationals")
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class Vec2Q(NamedTuple):
    x: Fraction
    y: Fraction

    @classmethod
    def of(cls, x: RationalLike, y: RationalLike) -> "Vec2Q":
        return cls(to_rational(x), to_rational(y))

    def __add__(self, other):  # type: ignore[override]
        return Vec2Q(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return Vec2Q(self.x - other[0], self.y - other[1])

    def scale(self, k) -> "Vec2Q":
        return Vec2Q(self.x * k, self.y * k)

    def norm_sq(self) -> Fraction:
        return self.x * self.x + self.y * self.y

    def as_floats(self) -> tuple[float, float]:
        return float(self.x), float(self.y)

    def to_json(self) -> list[str]:
        return [format_rational(self.x), format_rational(self.y)]

    @classmethod
    def from_json(cls, data) -> "Vec2Q":
        x, y = data
        return cls.of(x, y)


def _reduce(nums: tuple[int, ...], den: int) -> tuple[tuple[int, ...], int]:
    if den < 0:
        nums = tuple(-n for n in nums)
        den = -den
    g = math.gcd(den, *nums)
    if g > 1:
        nums = tuple(n // g for n in nums)
        den //= g
    return nums, den


class RationalAffineMap:
    """The map ``(x, y) -> (a x + b y + c, d x + e y + f)`` with rational entries."""

    __slots__ = ("_nums", "_den", "_hash")

    def __init__(self, matrix, translation=(0, 0)):
        (a, b), (d, e) = matrix
        c, f = translation
        entries = [to_rational(v) for v in (a, b, c, d, e, f)]
        den = math.lcm(*(q.denominator for q in entries))
        nums = tuple(q.numerator * (den // q.denominator) for q in entries)
        self._set(*_reduce(nums, den))

    def _set(self, nums, den):
        self._nums = nums
        self._den = den
        self._hash = hash((nums, den))

    @classmethod
    def _raw(cls, nums: tuple[int, ...], den: int) -> "RationalAffineMap":
        obj = cls.__new__(cls)
        obj._set(*_reduce(nums, den))
        return obj

    @classmethod
    def identity(cls) -> "RationalAffineMap":
        return cls._raw((1, 0, 0, 0, 1, 0), 1)

    @classmethod
    def translation_by(cls, tx: RationalLike, ty: RationalLike) -> "RationalAffineMap":
        return cls(((1, 0), (0, 1)), (tx, ty))

    # -- entries ---------------------------------------------------------
    @property
    def key(self) -> tuple[tuple[int, ...], int]:
        """Canonical encoding: coprime integer numerators and denominator."""
        return self._nums, self._den

    def _q(self, k: int) -> Fraction:
        return Fraction(self._nums[k], self._den)

    a = property(lambda self: self._q(0))
    b = property(lambda self: self._q(1))
    c = property(lambda self: self._q(2))
    d = property(lambda self: self._q(3))
    e = property(lambda self: self._q(4))
    f = property(lambda self: self._q(5))

    @property
    def matrix(self) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
        return (self.a, self.b), (self.d, self.e)

    @property
    def translation(self) -> Vec2Q:
        return Vec2Q(self.c, self.f)

    @property
    def linear(self) -> "RationalAffineMap":
        a, b, _, d, e, _ = self._nums
        return RationalAffineMap._raw((a, b, 0, d, e, 0), self._den)

    @property
    def det(self) -> Fraction:
        a, b, _, d, e, _ = self._nums
        return Fraction(a * e - b * d, self._den * self._den)

    @property
    def trace(self) -> Fraction:
        return Fraction(self._nums[0] + self._nums[4], self._den)

    def is_identity(self) -> bool:
        return self._nums == (1, 0, 0, 0, 1, 0) and self._den == 1

    # -- algebra ---------------------------------------------------------
    def __call__(self, p) -> Vec2Q:
        return self.apply(p)

    def apply(self, p) -> Vec2Q:
        x, y = Fraction(p[0]), Fraction(p[1])
        a, b, c, d, e, f = self._nums
        return Vec2Q((a * x + b * y + c) / self._den, (d * x + e * y + f) / self._den)

    def __matmul__(self, other: "RationalAffineMap") -> "RationalAffineMap":
        return compose(self, other)

    def __eq__(self, other):
        if not isinstance(other, RationalAffineMap):
            return NotImplemented
        return self._nums == other._nums and self._den == other._den

    def __hash__(self):
        return self._hash

    def __lt__(self, other: "RationalAffineMap") -> bool:
        return (self._den, self._nums) < (other._den, other._nums)

    def __repr__(self):
        return f"RationalAffineMap({self.formula()})"

    def formula(self) -> str:
        def row(p, q, r):
            terms = []
            for coef, var in ((p, "x"), (q, "y")):
                if coef == 0:
                    continue
                s = "" if abs(coef) == 1 else format_rational(abs(coef))
                terms.append(("-" if coef < 0 else "+", s + var))
            if r != 0 or not terms:
                terms.append(("-" if r < 0 else "+", format_rational(abs(r))))
            out = "".join(f"{sgn}{t}" for sgn, t in terms)
            return out[1:] if out.startswith("+") else out

        return f"({row(self.a, self.b, self.c)}, {row(self.d, self.e, self.f)})"

    # -- serialization ---------------------------------------------------
    def to_json(self) -> dict:
        return {
            "matrix": [
                [format_rational(self.a), format_rational(self.b)],
                [format_rational(self.d), format_rational(self.e)],
            ],
            "translation": [format_rational(self.c), format_rational(self.f)],
        }

    @classmethod
    def from_json(cls, data: dict) -> "RationalAffineMap":
        return cls(data["matrix"], data.get("translation", (0, 0)))


def compose(f: RationalAffineMap, g: RationalAffineMap) -> RationalAffineMap:
    """Return ``x -> f(g(x))``."""
    fa, fb, fc, fd, fe, ff = f._nums
    ga, gb, gc, gd, ge, gf = g._nums
    dg = g._den
    return RationalAffineMap._raw(
        (
            fa * ga + fb * gd,
            fa * gb + fb * ge,
            fa * gc + fb * gf + fc * dg,
            fd * ga + fe * gd,
            fd * gb + fe * ge,
            fd * gc + fe * gf + ff * dg,
        ),
        f._den * dg,
    )


def invert(f: RationalAffineMap) -> RationalAffineMap:
    a, b, c, d, e, ff = f._nums
    det = a * e - b * d
    if det == 0:
        raise SingularMap(f"map {f.formula()} is not invertible")
    den = f._den
    return RationalAffineMap._raw(
        (e * den, -b * den, -(e * c - b * ff), -d * den, a * den, -(a * ff - d * c)),
        det,
    )


def similarity_ratio_squared(f: RationalAffineMap) -> Fraction | None:
    """Return r**2 when the linear part A satisfies A^T A = r**2 I, else None."""
    a, b, d, e = f.a, f.b, f.d, f.e
    col1 = a * a + d * d
    col2 = b * b + e * e
    if col1 != col2 or a * b + d * e != 0 or col1 == 0:
        return None
    return col1


def is_isometry(f: RationalAffineMap) -> bool:
    return similarity_ratio_squared(f) == 1


# -- isometry classes ------------------------------------------------------
@dataclass(frozen=True)
class Identity:
    kind = "identity"

    def describe(self) -> str:
        return "identity"

    def to_json(self) -> dict:
        return {"kind": self.kind}


@dataclass(frozen=True)
class Translation:
    vector: Vec2Q
    kind = "translation"

    def describe(self) -> str:
        return f"translation by ({format_rational(self.vector.x)}, {format_rational(self.vector.y)})"

    def to_json(self) -> dict:
        return {"kind": self.kind, "vector": self.vector.to_json()}


@dataclass(frozen=True)
class RationalRotation:
    order: int
    angle_degrees: float
    center: Vec2Q
    kind = "rational_rotation"

    def describe(self) -> str:
        return (
            f"rotation of order {self.order} by {self.angle_degrees:.10g} deg "
            f"about ({format_rational(self.center.x)}, {format_rational(self.center.y)})"
        )

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "order": self.order,
            "angle_degrees": round(self.angle_degrees, 10),
            "center": self.center.to_json(),
        }


@dataclass(frozen=True)
class IrrationalRotation:
    angle_degrees: float
    center: Vec2Q
    kind = "irrational_rotation"

    def describe(self) -> str:
        return (
            f"irrational rotation by {self.angle_degrees:.10g} deg "
            f"about ({format_rational(self.center.x)}, {format_rational(self.center.y)})"
        )

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "angle_degrees": round(self.angle_degrees, 10),
            "center": self.center.to_json(),
        }


@dataclass(frozen=True)
class Reflection:
    point: Vec2Q
    direction: Vec2Q
    kind = "reflection"

    def contains(self, q) -> bool:
        return _on_line(self.point, self.direction, q)

    def describe(self) -> str:
        return f"reflection in line through {_fmt_pt(self.point)} along {_fmt_pt(self.direction)}"

    def to_json(self) -> dict:
        return {"kind": self.kind, "point": self.point.to_json(), "direction": self.direction.to_json()}


@dataclass(frozen=True)
class GlideReflection:
    point: Vec2Q
    direction: Vec2Q
    shift_length_sq: Fraction
    kind = "glide_reflection"

    def contains(self, q) -> bool:
        return _on_line(self.point, self.direction, q)

    def describe(self) -> str:
        return (
            f"glide reflection along line through {_fmt_pt(self.point)} direction "
            f"{_fmt_pt(self.direction)}, shift^2 {format_rational(self.shift_length_sq)}"
        )

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "point": self.point.to_json(),
            "direction": self.direction.to_json(),
            "shift_length_sq": format_rational(self.shift_length_sq),
        }


IsometryClass = Union[
    Identity, Translation, RationalRotation, IrrationalRotation, Reflection, GlideReflection
]


def _fmt_pt(p) -> str:
    return f"({format_rational(p[0])}, {format_rational(p[1])})"


def _on_line(point, direction, q) -> bool:
    dx, dy = q[0] - point[0], q[1] - point[1]
    return dx * direction[1] - dy * direction[0] == 0


# cos(theta) -> rotation order, for rational cosines (Niven)
_NIVEN_ORDERS = {Fraction(-1): 2, Fraction(-1, 2): 3, Fraction(0): 4, Fraction(1, 2): 6}


def _primitive_direction(x: Fraction, y: Fraction) -> Vec2Q:
    # scale to coprime integers, first nonzero component positive
    den = math.lcm(x.denominator, y.denominator)
    ix, iy = int(x * den), int(y * den)
    g = math.gcd(ix, iy)
    ix, iy = ix // g, iy // g
    if ix < 0 or (ix == 0 and iy < 0):
        ix, iy = -ix, -iy
    return Vec2Q(Fraction(ix), Fraction(iy))


def classify_isometry(f: RationalAffineMap) -> IsometryClass:
    if not is_isometry(f):
        raise NotIsometry(f"{f.formula()} is not an isometry")
    a, b, d, e = f.a, f.b, f.d, f.e
    t = f.translation
    if f.det == 1:
        if a == 1 and d == 0:
            return Identity() if t.x == 0 and t.y == 0 else Translation(t)
        # rotation matrix [[cos, -sin], [sin, cos]]
        angle = math.degrees(math.atan2(d, a))
        # the center solves (I - A) x = t; I - A is invertible for A != I
        m11, m12, m21, m22 = 1 - a, -b, -d, 1 - e
        det = m11 * m22 - m12 * m21
        center = Vec2Q((m22 * t.x - m12 * t.y) / det, (m11 * t.y - m21 * t.x) / det)
        order = _NIVEN_ORDERS.get(a)
        if order is not None:
            return RationalRotation(order, angle, center)
        return IrrationalRotation(angle, center)
    # reflection matrix [[cos, sin], [sin, -cos]]; the axis is its +1 eigenspace
    if a == -1:
        direction = Vec2Q(Fraction(0), Fraction(1))
    else:
        direction = _primitive_direction(1 + a, d)
    uu = direction.norm_sq()
    along = (t.x * direction.x + t.y * direction.y) / uu
    parallel = direction.scale(along)
    perp = t - parallel
    point = perp.scale(Fraction(1, 2))
    if along == 0:
        return Reflection(point, direction)
    return GlideReflection(point, direction, parallel.norm_sq())
