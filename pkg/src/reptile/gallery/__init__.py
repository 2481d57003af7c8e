"""Built-in reptile definitions.

``pinwheel1`` is the fractal pinwheel with g(x, y) = (2x + y, x - 2y) and
pieces h_1..h_5; ``pinwheel2`` swaps h_2, h_3 for their reflections in the
line y = 1/2; ``square4`` is the unit square split into four.

The same tile admits a conjugate description with piece 4 as the basic tile
and expansion matrix [[2, -1], [1, 2]]; only the coordinates above ship here.
"""
from __future__ import annotations

import json
from importlib import resources

from ..errors import UnknownGalleryName
from ..ifs_model import ReptileSpec

NAMES = ("pinwheel1", "pinwheel2", "square4")


def gallery_text(name: str) -> str:
    if name not in NAMES:
        raise UnknownGalleryName(f"unknown gallery spec {name!r}; choose from {', '.join(NAMES)}")
    return resources.files(__name__).joinpath(f"{name}.json").read_text()


def load(name: str) -> ReptileSpec:
    return ReptileSpec.from_json(json.loads(gallery_text(name)))
