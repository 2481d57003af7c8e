"""Replication-tile definitions and the contraction system they induce."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import (
    BudgetExceeded,
    DepthTooShallow,
    NoUniqueFixedPoint,
    SpecFormatError,
)
from .exact_affine import (
    RationalAffineMap,
    Vec2Q,
    compose,
    format_rational,
    invert,
    similarity_ratio_squared,
)
from . import polygon as poly

DEFAULT_WORD_BUDGET = 10**6

Address = tuple[int, ...]


@dataclass(frozen=True)
class HullCertificate:
    """A convex polygon claimed to be the hull of the tile (``of="unit"``)
    or of its enlarged copy g(A) (``of="enlarged"``)."""

    polygon: tuple[Vec2Q, ...]
    of: str = "unit"


@dataclass
class ReptileSpec:
    name: str
    expansion: RationalAffineMap
    isometries: list[RationalAffineMap]
    hull: Optional[HullCertificate] = None
    # optional presentation data: human names for neighbor maps, and convex
    # hulls of the boundary pieces keyed by those names
    neighbor_names: dict[str, RationalAffineMap] = field(default_factory=dict)
    boundary_hulls: dict[str, tuple[Vec2Q, ...]] = field(default_factory=dict)

    @property
    def m(self) -> int:
        return len(self.isometries)

    def to_json(self) -> dict:
        out: dict = {
            "name": self.name,
            "expansion": self.expansion.to_json(),
            "isometries": [h.to_json() for h in self.isometries],
        }
        if self.hull is not None:
            out["hull"] = {"of": self.hull.of, "polygon": [p.to_json() for p in self.hull.polygon]}
        if self.neighbor_names:
            out["neighbor_names"] = {k: v.to_json() for k, v in self.neighbor_names.items()}
        if self.boundary_hulls:
            out["boundary_hulls"] = {
                k: [p.to_json() for p in pts] for k, pts in self.boundary_hulls.items()
            }
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"

    @classmethod
    def from_json(cls, data: dict) -> "ReptileSpec":
        try:
            hull = None
            if "hull" in data:
                hull = HullCertificate(
                    tuple(Vec2Q.from_json(p) for p in data["hull"]["polygon"]),
                    data["hull"].get("of", "unit"),
                )
                if hull.of not in ("unit", "enlarged"):
                    raise SpecFormatError(f"hull.of must be 'unit' or 'enlarged', got {hull.of!r}")
            return cls(
                name=str(data["name"]),
                expansion=RationalAffineMap.from_json(data["expansion"]),
                isometries=[RationalAffineMap.from_json(h) for h in data["isometries"]],
                hull=hull,
                neighbor_names={
                    k: RationalAffineMap.from_json(v)
                    for k, v in data.get("neighbor_names", {}).items()
                },
                boundary_hulls={
                    k: tuple(Vec2Q.from_json(p) for p in pts)
                    for k, pts in data.get("boundary_hulls", {}).items()
                },
            )
        except SpecFormatError:
            raise
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise SpecFormatError(f"malformed reptile spec: {exc!r}") from exc

    @classmethod
    def load(cls, path) -> "ReptileSpec":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass
class ValidationReport:
    m: int
    ratio_sq: Optional[Fraction]
    isometry_ok: list[bool]
    det_signs: list[int]
    violations: list[str]

    @property
    def valid(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "m": self.m,
            "ratio_sq": None if self.ratio_sq is None else format_rational(self.ratio_sq),
            "det_signs": self.det_signs,
            "violations": self.violations,
        }


def validate(spec: ReptileSpec) -> ValidationReport:
    violations = []
    m = spec.m
    ratio_sq = similarity_ratio_squared(spec.expansion)
    if m == 0:
        violations.append("no isometries given")
    if ratio_sq is None:
        violations.append("expansion is not a similarity")
    elif ratio_sq != m:
        violations.append(f"expansion ratio^2 is {format_rational(ratio_sq)} but there are {m} pieces")
    iso_ok, signs = [], []
    for k, h in enumerate(spec.isometries, start=1):
        ok = similarity_ratio_squared(h) == 1
        iso_ok.append(ok)
        signs.append(1 if h.det > 0 else -1 if h.det < 0 else 0)
        if not ok:
            violations.append(f"h{k} = {h.formula()} is not an isometry")
    return ValidationReport(m, ratio_sq, iso_ok, signs, violations)


@dataclass(frozen=True)
class SubdivisionIFS:
    maps: tuple[RationalAffineMap, ...]
    contraction_ratio_squared: Fraction
    expansion: Optional[RationalAffineMap] = None

    @property
    def m(self) -> int:
        return len(self.maps)

    @property
    def ratio(self) -> float:
        return math.sqrt(self.contraction_ratio_squared)

    def inverses(self) -> tuple[RationalAffineMap, ...]:
        return tuple(invert(f) for f in self.maps)


def derive_subdivision(spec: ReptileSpec) -> SubdivisionIFS:
    g_inv = invert(spec.expansion)
    maps = tuple(compose(g_inv, h) for h in spec.isometries)
    ratio_sq = similarity_ratio_squared(g_inv)
    if ratio_sq is None:
        ratio_sq = Fraction(1, spec.m)
    return SubdivisionIFS(maps, ratio_sq, spec.expansion)


def piece_map(ifs: SubdivisionIFS, word: Sequence[int]) -> RationalAffineMap:
    """f_{w1} o ... o f_{wn} for a 1-based address."""
    out = RationalAffineMap.identity()
    for i in word:
        out = compose(out, ifs.maps[i - 1])
    return out


def fixed_point(f: RationalAffineMap) -> Vec2Q:
    (a, b), (d, e) = f.matrix
    t = f.translation
    m11, m12, m21, m22 = 1 - a, -b, -d, 1 - e
    det = m11 * m22 - m12 * m21
    if det == 0:
        raise NoUniqueFixedPoint(f"{f.formula()} has no unique fixed point")
    return Vec2Q((m22 * t.x - m12 * t.y) / det, (m11 * t.y - m21 * t.x) / det)


def base_point(ifs: SubdivisionIFS) -> Vec2Q:
    return fixed_point(ifs.maps[0])


def hull_maps(ifs: SubdivisionIFS, of: str = "unit") -> list[RationalAffineMap]:
    """Maps whose Hutchinson operator must preserve the hull polygon.

    For ``of="enlarged"`` the polygon bounds g(A), so the relevant system is
    the conjugate g f_i g^-1 = h_i g^-1.
    """
    if of == "unit":
        return list(ifs.maps)
    if of == "enlarged":
        if ifs.expansion is None:
            raise ValueError("enlarged hull check needs the expansion map")
        g, g_inv = ifs.expansion, invert(ifs.expansion)
        return [compose(g, compose(f, g_inv)) for f in ifs.maps]
    raise ValueError(f"unknown hull kind {of!r}")


def check_hull_invariance(ifs: SubdivisionIFS, polygon, candidate_hull_of: str = "unit") -> bool:
    """True iff every piece map sends the convex polygon into itself.

    Boundary contact counts as inside.  A true result certifies that the
    attractor lies in the polygon.
    """
    c = poly.normalize_convex(polygon)
    for f in hull_maps(ifs, candidate_hull_of):
        if not poly.contains_polygon(c, [f.apply(p) for p in c]):
            return False
    return True


def tile_hull(spec: ReptileSpec, ifs: Optional[SubdivisionIFS] = None) -> Optional[list[Vec2Q]]:
    """The tile's hull certificate expressed around A itself, if it checks out."""
    if spec.hull is None:
        return None
    ifs = ifs or derive_subdivision(spec)
    if not check_hull_invariance(ifs, spec.hull.polygon, spec.hull.of):
        return None
    pts = list(spec.hull.polygon)
    if spec.hull.of == "enlarged":
        g_inv = invert(spec.expansion)
        pts = [g_inv.apply(p) for p in pts]
    return poly.normalize_convex(pts)


@dataclass(frozen=True)
class DiameterBound:
    upper: float
    depth: int
    base_points: tuple[Vec2Q, ...]
    sample_diameter_sq: Fraction

    @property
    def lower(self) -> float:
        return math.sqrt(self.sample_diameter_sq)


def inner_hull(ifs: SubdivisionIFS, depth: int) -> list[Vec2Q]:
    """Convex hull of the depth-n images of all fixed points.

    Computed level by level as hull(U f_i(H)), which equals the hull of the
    full image set without enumerating m**n words.
    """
    pts = {fixed_point(f) for f in ifs.maps}
    h = poly.convex_hull(pts)
    for _ in range(depth):
        h = poly.convex_hull([f.apply(p) for f in ifs.maps for p in h])
    return h


def diameter_bound(ifs: SubdivisionIFS, depth: int) -> DiameterBound:
    r_n = ifs.ratio**depth
    if 2 * r_n >= 1:
        raise DepthTooShallow(f"2 r^n = {2 * r_n:.4g} >= 1 at depth {depth}")
    base = tuple(dict.fromkeys(fixed_point(f) for f in ifs.maps))
    d_sq = poly.max_dist_sq(inner_hull(ifs, depth))
    return DiameterBound(math.sqrt(d_sq) / (1 - 2 * r_n), depth, base, d_sq)


def default_depth(m: int, budget: int = DEFAULT_WORD_BUDGET) -> int:
    n = 0
    while m ** (n + 1) <= budget:
        n += 1
    return n


def neighbor_bound_sq(upper: float) -> Fraction:
    """Rational over-approximation of (2 * upper)**2."""
    scale = 10**9
    return Fraction(math.ceil((2 * upper) ** 2 * scale) + 1, scale)


def sample_points(
    ifs: SubdivisionIFS, depth: int, budget: int = DEFAULT_WORD_BUDGET
) -> list[Vec2Q]:
    """f_w(p0) for all words of length ``depth`` in lexicographic order,
    p0 the fixed point of f_1."""
    if ifs.m**depth > budget:
        raise BudgetExceeded(f"{ifs.m}^{depth} words exceed budget {budget}")
    p0 = base_point(ifs)
    # integer kernel: every level shares one denominator
    den = math.lcm(*(f.key[1] for f in ifs.maps))
    coeffs = []
    for f in ifs.maps:
        nums, d = f.key
        k = den // d
        coeffs.append(tuple(n * k for n in nums))
    e = math.lcm(p0.x.denominator, p0.y.denominator)
    level = [(int(p0.x * e), int(p0.y * e))]
    for _ in range(depth):
        nxt = []
        for a, b, c, d, ee, ff in coeffs:
            ce, fe = c * e, ff * e
            nxt.extend((a * x + b * y + ce, d * x + ee * y + fe) for x, y in level)
        level = nxt
        e *= den
    return [Vec2Q(Fraction(x, e), Fraction(y, e)) for x, y in level]


def covering_polygon(ifs: SubdivisionIFS, spec: Optional[ReptileSpec] = None, depth: int = 6) -> list[Vec2Q]:
    """A convex polygon certified to contain the attractor.

    Uses the tile's hull certificate when it checks out.  Otherwise the inner
    hull is blown up about its centroid until the Hutchinson operator maps it
    into itself.
    """
    if spec is not None:
        hull = tile_hull(spec, ifs)
        if hull is not None:
            return hull
    inner = inner_hull(ifs, depth)
    if len(inner) < 3:
        return inner
    cx = sum(p.x for p in inner) / len(inner)
    cy = sum(p.y for p in inner) / len(inner)
    scale = Fraction(1)
    for _ in range(64):
        cand = [Vec2Q(cx + scale * (p.x - cx), cy + scale * (p.y - cy)) for p in inner]
        if check_hull_invariance(ifs, cand):
            return cand
        scale *= Fraction(9, 8)
    raise ValueError("could not certify a covering polygon")
