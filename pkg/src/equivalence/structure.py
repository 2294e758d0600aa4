"""Feature-to-geometry mapping: utterances become placed 3D primitives.

The mapping encodes the grammar/content split spatially: clause depth sets
the height layer, sentence position sets scene depth, token position sets
the horizontal spread, and the word itself picks shape (via POS), size (via
length) and color (via a bit-exact string hash). Everything is a pure
function of (features, tokens, config, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

from .errors import DegenerateCamera, NoContentWords
from .hashing import fnv1a_32, splitmix64
from .language import CONTENT_POS, LanguageFeatures, Token, sentence_spans

if TYPE_CHECKING:
    from .config import MappingConfig

Vec3 = tuple[float, float, float]

# Golden-angle spread gives well-separated hues for the palette mode.
GOLDEN_ANGLE_DEG = 137.50776405003785

FALLBACK_HUE = 0.0
FALLBACK_ALPHA = 0.5


class Shape(str, Enum):
    SLAB = "Slab"
    COLUMN = "Column"
    SPHERE = "Sphere"
    RIBBON = "Ribbon"


class HueMode(str, Enum):
    TOKEN_HASH = "TokenHash"
    FEATURE_PALETTE = "FeaturePalette"


@dataclass(frozen=True)
class Camera:
    eye: Vec3
    look_at: Vec3
    vertical_fov_deg: float = 45.0

    def __post_init__(self):
        if tuple(self.eye) == tuple(self.look_at):
            raise DegenerateCamera("camera eye equals look_at")
        if not 0.0 < self.vertical_fov_deg < 180.0:
            raise ValueError("vertical_fov_deg must be in (0, 180)")


@dataclass(frozen=True)
class Primitive:
    shape: Shape
    center: Vec3
    scale: Vec3
    hue_deg: float
    alpha: float
    source_token_index: int

    def __post_init__(self):
        if not all(s > 0 for s in self.scale):
            raise ValueError("scale components must be strictly positive")
        if not 0.0 <= self.hue_deg < 360.0:
            raise ValueError("hue_deg must be in [0, 360)")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must be in (0, 1]")


@dataclass(frozen=True)
class SpatialStructure:
    primitives: tuple[Primitive, ...]
    camera: Camera
    palette_seed: int

    def __post_init__(self):
        indices = [p.source_token_index for p in self.primitives]
        if indices != sorted(indices):
            raise ValueError("primitives must be ordered by source_token_index")


def default_camera(config: "MappingConfig") -> Camera:
    """Fixed default viewpoint: slightly above, pulled back from the scene."""
    return Camera(
        eye=(0.0, config.scene_height * 0.6, -config.scene_depth * 1.2),
        look_at=(
            config.scene_width / 2.0,
            config.scene_height / 2.0,
            config.scene_depth / 2.0,
        ),
        vertical_fov_deg=45.0,
    )


def _clamp(value: float, lo: float, hi: float) -> float:
    return max(lo, min(hi, value))


def _token_hue(token: Token, rank: int, mode: HueMode, seed: int) -> float:
    if mode is HueMode.TOKEN_HASH:
        return float(fnv1a_32(token.lower) % 360)
    base = float(splitmix64(seed) % 360)
    return (base + rank * GOLDEN_ANGLE_DEG) % 360.0


def map_structure(
    features: LanguageFeatures,
    tokens: list[Token],
    config: "MappingConfig",
    seed: int,
) -> SpatialStructure:
    """Place one primitive per content-word token.

    Raises NoContentWords when the utterance has no Noun/Verb/Adj/Adv token;
    callers fall back to ``fallback_structure``.
    """
    content = [t for t in tokens if t.pos in CONTENT_POS]
    if not content:
        raise NoContentWords("utterance has no content-word token")

    spans = sentence_spans(tokens)
    denom = max(features.token_count - 1, 1)
    alpha = max(features.content_ratio, 0.1)

    primitives = []
    for rank, tok in enumerate(content):
        sentence_idx = next(
            i for i, (start, end) in enumerate(spans) if start <= tok.index < end
        )
        depth = features.clause_depths[sentence_idx]
        x = tok.index / denom * config.scene_width
        y = depth * config.layer_height
        z = float(sentence_idx)
        size = _clamp(len(tok.surface) / 10.0, 0.2, 1.5)
        primitives.append(
            Primitive(
                shape=config.shape_by_pos[tok.pos],
                center=(x, y, z),
                scale=(size, size, size),
                hue_deg=_token_hue(tok, rank, config.hue_mode, seed),
                alpha=alpha,
                source_token_index=tok.index,
            )
        )

    camera = config.camera or default_camera(config)
    return SpatialStructure(tuple(primitives), camera, seed)


def fallback_structure(config: "MappingConfig", seed: int) -> SpatialStructure:
    """Single neutral sphere at scene center; keeps the loop alive for any input."""
    center = (
        config.scene_width / 2.0,
        config.scene_height / 2.0,
        config.scene_depth / 2.0,
    )
    sphere = Primitive(
        shape=Shape.SPHERE,
        center=center,
        scale=(1.0, 1.0, 1.0),
        hue_deg=FALLBACK_HUE,
        alpha=FALLBACK_ALPHA,
        source_token_index=0,
    )
    camera = config.camera or default_camera(config)
    return SpatialStructure((sphere,), camera, seed)


def map_structure_or_fallback(
    features: LanguageFeatures,
    tokens: list[Token],
    config: "MappingConfig",
    seed: int,
) -> SpatialStructure:
    try:
        return map_structure(features, tokens, config, seed)
    except NoContentWords:
        return fallback_structure(config, seed)


def distance(a: Vec3, b: Vec3) -> float:
    return math.sqrt(sum((ax - bx) ** 2 for ax, bx in zip(a, b)))
