"""Software rasterizer for spatial structures (base-image engine).

Primitives are perspective-projected to filled 2D silhouettes and painted
back to front over a seeded vertical gradient. All projected coordinates are
rounded half-away-from-zero before any fill so the output bytes are stable
across runs.
"""

from __future__ import annotations

import colorsys
import io
import math
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .errors import DegenerateCamera
from .hashing import splitmix64
from .structure import Camera, Primitive, Shape, SpatialStructure, distance

if False:  # only for annotations
    from .config import MappingConfig

# Saturation/value used for every primitive fill; hue carries the variation.
FILL_SATURATION = 0.55
FILL_VALUE = 0.82

# Silhouette half-extents in world units, per unit of primitive scale.
SHAPE_HALF_EXTENTS = {
    Shape.SLAB: (0.9, 0.35),
    Shape.COLUMN: (0.3, 1.4),
    Shape.SPHERE: (0.55, 0.55),
    Shape.RIBBON: (1.4, 0.18),
}

RIBBON_QUADS = 4

# Primitives closer than this to the camera plane are culled.
NEAR_PLANE = 0.05

PLACEHOLDER_TOP = (236, 235, 231)
PLACEHOLDER_BOTTOM = (209, 208, 203)


def round_half_away(x: float) -> int:
    """Round half away from zero; the one rounding rule used everywhere."""
    return math.floor(x + 0.5) if x >= 0 else math.ceil(x - 0.5)


def round_half_away_array(x: np.ndarray) -> np.ndarray:
    return np.where(x >= 0, np.floor(x + 0.5), np.ceil(x - 0.5))


def hsv_to_rgb255(hue_deg: float, saturation: float, value: float) -> tuple[int, int, int]:
    r, g, b = colorsys.hsv_to_rgb((hue_deg % 360.0) / 360.0, saturation, value)
    return (
        round_half_away(r * 255.0),
        round_half_away(g * 255.0),
        round_half_away(b * 255.0),
    )


def primitive_fill_rgb(hue_deg: float) -> tuple[int, int, int]:
    return hsv_to_rgb255(hue_deg, FILL_SATURATION, FILL_VALUE)


@dataclass
class BaseImage:
    """Row-major RGBA pixel buffer, 8 bits per channel."""

    width: int
    height: int
    pixels: np.ndarray  # shape (height, width, 4), dtype uint8

    def __post_init__(self):
        expected = (self.height, self.width, 4)
        if self.pixels.shape != expected or self.pixels.dtype != np.uint8:
            raise ValueError(
                f"pixel buffer must be uint8 with shape {expected}, "
                f"got {self.pixels.dtype} {self.pixels.shape}"
            )

    @classmethod
    def from_array(cls, pixels: np.ndarray) -> "BaseImage":
        return cls(width=pixels.shape[1], height=pixels.shape[0], pixels=pixels)

    def to_png(self) -> bytes:
        buf = io.BytesIO()
        Image.fromarray(self.pixels, mode="RGBA").save(buf, format="PNG")
        return buf.getvalue()

    @classmethod
    def from_png(cls, data: bytes) -> "BaseImage":
        with Image.open(io.BytesIO(data)) as img:
            rgba = img.convert("RGBA")
            return cls.from_array(np.array(rgba, dtype=np.uint8))


def _gradient(width: int, height: int, top: tuple, bottom: tuple) -> np.ndarray:
    top_arr = np.array(top, dtype=np.float64)
    bottom_arr = np.array(bottom, dtype=np.float64)
    t = np.linspace(0.0, 1.0, height)[:, None] if height > 1 else np.zeros((1, 1))
    rows = top_arr[None, :] * (1.0 - t) + bottom_arr[None, :] * t
    rgb = round_half_away_array(rows).astype(np.uint8)
    pixels = np.empty((height, width, 4), dtype=np.uint8)
    pixels[:, :, :3] = rgb[:, None, :]
    pixels[:, :, 3] = 255
    return pixels


def background_gradient(width: int, height: int, palette_seed: int) -> np.ndarray:
    """Vertical two-stop gradient; both stops derive from the seed."""
    s1 = splitmix64(palette_seed)
    s2 = splitmix64(s1)
    top = hsv_to_rgb255(float(s1 % 360), 0.15, 0.93)
    bottom = hsv_to_rgb255(float(s2 % 360), 0.28, 0.58)
    return _gradient(width, height, top, bottom)


def placeholder_gradient(width: int, height: int) -> np.ndarray:
    """Neutral gradient shown when nothing is available to display."""
    return _gradient(width, height, PLACEHOLDER_TOP, PLACEHOLDER_BOTTOM)


def _normalize(v: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise DegenerateCamera("camera eye equals look_at")
    return v / norm


def _camera_basis(camera: Camera):
    eye = np.array(camera.eye, dtype=np.float64)
    look = np.array(camera.look_at, dtype=np.float64)
    forward = _normalize(look - eye)
    up = np.array([0.0, 1.0, 0.0])
    if abs(float(np.dot(forward, up))) > 0.999:
        up = np.array([0.0, 0.0, 1.0])
    right = _normalize(np.cross(up, forward))
    true_up = np.cross(forward, right)
    return eye, forward, right, true_up


def _composite_rect(buf, x0, x1, y0, y1, rgb, alpha):
    """Source-over fill of [x0,x1) x [y0,y1), clipped to the canvas."""
    h, w = buf.shape[:2]
    x0c, x1c = max(x0, 0), min(x1, w)
    y0c, y1c = max(y0, 0), min(y1, h)
    if x0c >= x1c or y0c >= y1c:
        return
    region = buf[y0c:y1c, x0c:x1c, :3].astype(np.float64)
    src = np.array(rgb, dtype=np.float64)
    blended = src[None, None, :] * alpha + region * (1.0 - alpha)
    buf[y0c:y1c, x0c:x1c, :3] = round_half_away_array(blended).astype(np.uint8)


def _composite_ellipse(buf, cx, cy, rx, ry, rgb, alpha):
    h, w = buf.shape[:2]
    x0c, x1c = max(cx - rx, 0), min(cx + rx + 1, w)
    y0c, y1c = max(cy - ry, 0), min(cy + ry + 1, h)
    if x0c >= x1c or y0c >= y1c:
        return
    ys = np.arange(y0c, y1c, dtype=np.float64)[:, None]
    xs = np.arange(x0c, x1c, dtype=np.float64)[None, :]
    mask = ((xs - cx) / rx) ** 2 + ((ys - cy) / ry) ** 2 <= 1.0
    if not mask.any():
        return
    region = buf[y0c:y1c, x0c:x1c, :3].astype(np.float64)
    src = np.array(rgb, dtype=np.float64)
    blended = src[None, None, :] * alpha + region * (1.0 - alpha)
    out = np.where(
        mask[:, :, None], round_half_away_array(blended), region
    ).astype(np.uint8)
    buf[y0c:y1c, x0c:x1c, :3] = out


def _paint_primitive(buf, prim: Primitive, px: float, py: float, hw: float, hh: float):
    rgb = primitive_fill_rgb(prim.hue_deg)
    cx, cy = round_half_away(px), round_half_away(py)
    rx = max(round_half_away(hw), 1)
    ry = max(round_half_away(hh), 1)

    if prim.shape is Shape.SPHERE:
        _composite_ellipse(buf, cx, cy, rx, ry, rgb, prim.alpha)
    elif prim.shape is Shape.RIBBON:
        # Quad strip: adjacent quads with alternating vertical offsets.
        dy = max(round_half_away(0.8 * ry), 1)
        edges = [
            cx - rx + round_half_away(k * (2 * rx) / RIBBON_QUADS)
            for k in range(RIBBON_QUADS + 1)
        ]
        for k in range(RIBBON_QUADS):
            offset = dy if k % 2 == 0 else -dy
            _composite_rect(
                buf,
                edges[k], edges[k + 1],
                cy + offset - ry, cy + offset + ry,
                rgb, prim.alpha,
            )
    else:  # SLAB and COLUMN are plain rectangles with different proportions
        _composite_rect(buf, cx - rx, cx + rx, cy - ry, cy + ry, rgb, prim.alpha)


def rasterize(structure: SpatialStructure, config: "MappingConfig") -> BaseImage:
    """Paint the structure into a panel-sized RGBA buffer.

    Painter's algorithm: primitives sorted by descending eye distance, ties by
    ascending source_token_index, each source-over composited onto the canvas.
    """
    camera = structure.camera
    if tuple(camera.eye) == tuple(camera.look_at):
        raise DegenerateCamera("camera eye equals look_at")

    width, height = config.panel_width_px, config.panel_height_px
    buf = background_gradient(width, height, structure.palette_seed)

    eye, forward, right, true_up = _camera_basis(camera)
    focal = (height / 2.0) / math.tan(math.radians(camera.vertical_fov_deg) / 2.0)
    cx, cy = width / 2.0, height / 2.0

    ordered = sorted(
        structure.primitives,
        key=lambda p: (-distance(p.center, camera.eye), p.source_token_index),
    )
    for prim in ordered:
        delta = np.array(prim.center, dtype=np.float64) - eye
        z_cam = float(np.dot(delta, forward))
        if z_cam <= NEAR_PLANE:
            continue
        px = cx + focal * float(np.dot(delta, right)) / z_cam
        py = cy - focal * float(np.dot(delta, true_up)) / z_cam
        ext_w, ext_h = SHAPE_HALF_EXTENTS[prim.shape]
        hw = focal * (ext_w * prim.scale[0]) / z_cam
        hh = focal * (ext_h * prim.scale[1]) / z_cam
        _paint_primitive(buf, prim, px, py, hw, hh)

    return BaseImage(width=width, height=height, pixels=buf)
