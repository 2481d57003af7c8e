"""Figures and statistics of subdivisions: SVG/PPM output, orientation
census and pixel-coverage area estimates."""
from __future__ import annotations

import io
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import polygon as poly
from .errors import BudgetExceeded
from .exact_affine import RationalAffineMap, compose
from .ifs_model import DEFAULT_WORD_BUDGET, SubdivisionIFS, base_point

# one base color per piece index, cycled when m exceeds the list
PALETTE = (
    (230, 57, 70),
    (244, 162, 97),
    (233, 196, 106),
    (42, 157, 143),
    (38, 70, 83),
    (131, 56, 236),
    (58, 134, 255),
    (255, 190, 11),
    (141, 153, 174),
)


@dataclass(frozen=True)
class ColorScheme:
    depth_weighting: tuple[float, ...] = (2 / 3, 1 / 3)
    palette: tuple[tuple[int, int, int], ...] = PALETTE

    def __post_init__(self):
        if not self.depth_weighting or any(w <= 0 for w in self.depth_weighting):
            raise ValueError("color weights must be positive")
        if sum(self.depth_weighting) > 1 + 1e-12:
            raise ValueError("color weights must sum to at most 1")

    def color(self, word: Sequence[int]) -> tuple[int, int, int]:
        """Mix the colors of the leading symbols; leftover weight goes to white.

        Words shorter than the weighting renormalize the weights they use.
        """
        weights = self.depth_weighting[: len(word)]
        if not weights:
            return (255, 255, 255)
        weights = [w * sum(self.depth_weighting) / sum(weights) for w in weights]
        rgb = [255.0 * (1.0 - sum(weights))] * 3
        for w, i in zip(weights, word):
            base = self.palette[(i - 1) % len(self.palette)]
            for k in range(3):
                rgb[k] += w * base[k]
        return tuple(int(round(c)) for c in rgb)  # type: ignore[return-value]


def _check_budget(ifs: SubdivisionIFS, depth: int, budget: int):
    if ifs.m**depth > budget:
        raise BudgetExceeded(f"{ifs.m}^{depth} pieces exceed budget {budget}")


def piece_maps(ifs: SubdivisionIFS, depth: int, budget: int = DEFAULT_WORD_BUDGET):
    """(word, f_w) for all words of length ``depth`` in lexicographic order."""
    _check_budget(ifs, depth, budget)
    level = [((), RationalAffineMap.identity())]
    for _ in range(depth):
        level = [(w + (i + 1,), compose(f, g)) for w, f in level for i, g in enumerate(ifs.maps)]
    return level


def _fmt(x) -> str:
    return f"{float(x):.12g}"


def render_svg(
    ifs: SubdivisionIFS,
    depth: int,
    hull,
    scheme: ColorScheme = ColorScheme(),
    width: int = 800,
    budget: int = DEFAULT_WORD_BUDGET,
) -> bytes:
    hull = poly.normalize_convex(hull)
    pieces = piece_maps(ifs, depth, budget)
    xs = [float(p.x) for p in hull]
    ys = [float(p.y) for p in hull]
    pad = 0.02 * max(max(xs) - min(xs), max(ys) - min(ys), 1e-9)
    x0, x1 = min(xs) - pad, max(xs) + pad
    y0, y1 = min(ys) - pad, max(ys) + pad
    height = max(1, int(round(width * (y1 - y0) / (x1 - x0))))
    out = io.StringIO()
    out.write('<?xml version="1.0" encoding="UTF-8"?>\n')
    out.write(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="{_fmt(x0)} {_fmt(-y1)} {_fmt(x1 - x0)} {_fmt(y1 - y0)}">\n'
    )
    out.write(f'<g transform="scale(1,-1)" stroke="#222" stroke-width="{_fmt((x1 - x0) / width)}">\n')
    for word, f in pieces:
        pts = " ".join(f"{_fmt(q.x)},{_fmt(q.y)}" for q in (f.apply(p) for p in hull))
        r, g, b = scheme.color(word)
        label = "".join(map(str, word)) or "A"
        out.write(f'<polygon id="w{label}" points="{pts}" fill="#{r:02x}{g:02x}{b:02x}"/>\n')
    out.write("</g>\n</svg>\n")
    return out.getvalue().encode()


def _float_maps(ifs: SubdivisionIFS) -> list[tuple[np.ndarray, np.ndarray]]:
    return [
        (np.array([[float(f.a), float(f.b)], [float(f.d), float(f.e)]]), np.array([float(f.c), float(f.f)]))
        for f in ifs.maps
    ]


def render_ppm(
    ifs: SubdivisionIFS,
    depth: int,
    scheme: ColorScheme = ColorScheme(),
    size: int = 512,
    budget: int = DEFAULT_WORD_BUDGET,
) -> bytes:
    """Binary PPM with one sample point f_w(p0) per word, colored by word."""
    _check_budget(ifs, depth, budget)
    m = ifs.m
    maps = _float_maps(ifs)
    p0 = base_point(ifs)
    pts = np.array([[float(p0.x), float(p0.y)]])
    for _ in range(depth):
        pts = np.concatenate([pts @ A.T + t for A, t in maps])
    n = len(pts)
    # symbols of each word, read from the block structure of the ordering
    idx = np.arange(n)
    lead = min(depth, len(scheme.depth_weighting))
    digits = [(idx // m ** (depth - 1 - k)) % m + 1 for k in range(lead)]
    combos = {}
    colors = np.empty((n, 3), dtype=np.uint8)
    keys = np.zeros(n, dtype=np.int64)
    for d in digits:
        keys = keys * (m + 1) + d
    for key in np.unique(keys):
        word, rest = [], int(key)
        for _ in range(lead):
            word.append(rest % (m + 1))
            rest //= m + 1
        combos[int(key)] = scheme.color(word[::-1])
    for key, rgb in combos.items():
        colors[keys == key] = rgb

    lo = pts.min(axis=0)
    span = max(float((pts.max(axis=0) - lo).max()), 1e-12)
    scale = (size - 1) / span
    col = np.clip(np.round((pts[:, 0] - lo[0]) * scale).astype(int), 0, size - 1)
    row = np.clip(size - 1 - np.round((pts[:, 1] - lo[1]) * scale).astype(int), 0, size - 1)
    img = np.full((size, size, 3), 255, dtype=np.uint8)
    img[row, col] = colors
    return f"P6\n{size} {size}\n255\n".encode() + img.tobytes()


def render_subdivision(
    ifs: SubdivisionIFS,
    depth: int,
    scheme: ColorScheme = ColorScheme(),
    format: str = "svg",
    hull=None,
    budget: int = DEFAULT_WORD_BUDGET,
    size: int = 512,
) -> bytes:
    if format == "svg":
        if hull is None:
            raise ValueError("svg output needs a hull polygon")
        return render_svg(ifs, depth, hull, scheme, budget=budget)
    if format == "ppm":
        return render_ppm(ifs, depth, scheme, size=size, budget=budget)
    raise ValueError(f"unknown format {format!r}")


# -- orientation statistics ---------------------------------------------------
@dataclass
class OrientationCensus:
    depth: int
    bin_degrees: float
    det_plus: list[int]
    det_minus: list[int]
    distinct_linear_parts: int
    distinct_angles_plus: int
    distinct_angles_minus: int
    linear_parts: Counter = field(repr=False, default_factory=Counter)

    @property
    def total(self) -> int:
        return sum(self.det_plus) + sum(self.det_minus)

    def to_csv(self) -> str:
        lines = ["bin_start_deg,det_plus_count,det_minus_count"]
        for k, (a, b) in enumerate(zip(self.det_plus, self.det_minus)):
            lines.append(f"{k * self.bin_degrees:.10g},{a},{b}")
        return "\n".join(lines) + "\n"


def orientation_angle(f: RationalAffineMap) -> tuple[int, float]:
    """(det sign, angle in degrees) of a similarity's linear part.

    Orientation-preserving maps report their rotation angle in [0, 360);
    reversing ones report the direction of the reflection axis in [0, 180).
    """
    a, d = float(f.a), float(f.d)
    phi = math.degrees(math.atan2(d, a)) % 360.0
    if f.det > 0:
        return 1, (0.0 if phi >= 360.0 - 1e-9 else phi)
    half = (phi / 2.0) % 180.0
    return -1, (0.0 if half >= 180.0 - 1e-9 else half)


def orientation_census(
    ifs: SubdivisionIFS,
    depth: int,
    bin_degrees: float = 1.0,
    budget: int = DEFAULT_WORD_BUDGET,
) -> OrientationCensus:
    if bin_degrees <= 0:
        raise ValueError("bin width must be positive")
    _check_budget(ifs, depth, budget)
    linear = [f.linear for f in ifs.maps]
    counts: Counter = Counter({RationalAffineMap.identity(): 1})
    for _ in range(depth):
        nxt: Counter = Counter()
        for mat, c in counts.items():
            for lin in linear:
                nxt[compose(lin, mat)] += c
        counts = nxt
    nbins = int(math.ceil(360.0 / bin_degrees))
    plus, minus = [0] * nbins, [0] * nbins
    angles_plus, angles_minus = set(), set()
    for mat, c in counts.items():
        sign, angle = orientation_angle(mat)
        k = min(int(angle // bin_degrees), nbins - 1)
        # exact identity of the orientation: the linear part divided by its scale
        if sign > 0:
            plus[k] += c
            angles_plus.add(_direction_key(mat))
        else:
            minus[k] += c
            angles_minus.add(_direction_key(mat))
    return OrientationCensus(
        depth,
        bin_degrees,
        plus,
        minus,
        len(counts),
        len(angles_plus),
        len(angles_minus),
        counts,
    )


def _direction_key(f: RationalAffineMap) -> tuple[Fraction, bool]:
    # the unit vector (a, d)/|.| is fixed by (a : d) and the quadrant
    a, d = f.a, f.d
    if a == 0:
        return (Fraction(0), d > 0) if d != 0 else (Fraction(0), True)
    return (d / a, a > 0)


# -- area -------------------------------------------------------------------
MAX_FRONTIER = 60_000_000


def area_estimate(
    ifs: SubdivisionIFS,
    hull,
    resolution: int = 2048,
    depth: int = 8,
    seed: int = 0,
) -> float:
    """Area covered by the depth-n images f_w(C) of a covering polygon C.

    One jittered sample per pixel of a resolution x resolution grid over the
    bounding box of C; a sample x is covered when some word w has
    f_w^-1(x) in C, found by pulling samples back one map at a time.
    """
    hull = poly.normalize_convex(hull)
    if len(hull) < 3:
        return 0.0
    verts = np.array([[float(p.x), float(p.y)] for p in hull])
    edges = np.roll(verts, -1, axis=0) - verts
    lo, hi = verts.min(axis=0), verts.max(axis=0)
    step = (hi - lo) / resolution
    rng = np.random.default_rng(seed)
    gx, gy = np.meshgrid(np.arange(resolution), np.arange(resolution), indexing="xy")
    jitter = rng.random((resolution * resolution, 2))
    pts = lo + (np.stack([gx.ravel(), gy.ravel()], axis=1) + jitter) * step
    owner = np.arange(len(pts))

    def inside(q):
        ok = np.ones(len(q), dtype=bool)
        for v, e in zip(verts, edges):
            ok &= e[0] * (q[:, 1] - v[1]) - e[1] * (q[:, 0] - v[0]) >= -1e-12
        return ok

    keep = inside(pts)
    pts, owner = pts[keep], owner[keep]
    inverses = _float_maps(SubdivisionIFS(ifs.inverses(), Fraction(1)))
    for _ in range(depth):
        new_pts, new_owner = [], []
        for A, t in inverses:
            q = pts @ A.T + t
            ok = inside(q)
            new_pts.append(q[ok])
            new_owner.append(owner[ok])
        pts = np.concatenate(new_pts)
        owner = np.concatenate(new_owner)
        if len(pts) > MAX_FRONTIER:
            raise BudgetExceeded(f"area frontier grew past {MAX_FRONTIER} samples")
    covered = len(np.unique(owner))
    return float(covered * step[0] * step[1])
