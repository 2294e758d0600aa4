"""Scroll composition: stylized panels joined into one long horizontal image.

Panels append on the right; adjacent panels share an ``overlap_px``-wide seam
that is linearly cross-faded. A scroll is an immutable snapshot — every
operation returns a new value — so the single writer can publish snapshots
while any number of readers render viewports from them.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DimensionMismatch, OutOfRange, UnknownPanel
from .prompts import PromptSpec
from .raster import BaseImage, placeholder_gradient, round_half_away_array
from .synthesis import png_dimensions


@dataclass(frozen=True)
class Panel:
    """One utterance's contribution to the scroll (all images as PNG bytes)."""

    index: int
    utterance_id: str
    base: bytes  # engine-1 base image
    prompt: PromptSpec
    result: bytes  # engine-2 stylized output
    created_at: int  # ms epoch
    curated: bool = True


@dataclass(frozen=True)
class Scroll:
    panel_width: int
    panel_height: int
    overlap_px: int = 64
    max_panels: int = 64
    panels: tuple[Panel, ...] = ()

    def __post_init__(self):
        if not 0 <= self.overlap_px < self.panel_width:
            raise ValueError("overlap_px must satisfy 0 <= overlap < panel width")
        if self.max_panels < 1:
            raise ValueError("max_panels must be >= 1")

    @property
    def included(self) -> tuple[Panel, ...]:
        return tuple(p for p in self.panels if p.curated)

    @property
    def total_width(self) -> int:
        count = len(self.included)
        if count == 0:
            return self.panel_width  # placeholder panel
        return count * self.panel_width - self.overlap_px * (count - 1)


def _check_dimensions(scroll: Scroll, png: bytes, what: str) -> None:
    dims = png_dimensions(png)
    expected = (scroll.panel_width, scroll.panel_height)
    if dims != expected:
        raise DimensionMismatch(f"{what} is {dims}, scroll expects {expected}")


def append_panel(scroll: Scroll, panel: Panel) -> Scroll:
    """Append on the right, evicting the earliest panel beyond max_panels."""
    _check_dimensions(scroll, panel.result, f"panel {panel.index} result")
    _check_dimensions(scroll, panel.base, f"panel {panel.index} base")
    if scroll.panels and panel.index <= scroll.panels[-1].index:
        raise ValueError("panel index must increase monotonically")
    panels = (scroll.panels + (panel,))[-scroll.max_panels:]
    return replace(scroll, panels=panels)


def _find(scroll: Scroll, panel_index: int) -> int:
    for i, panel in enumerate(scroll.panels):
        if panel.index == panel_index:
            return i
    raise UnknownPanel(f"no retained panel with index {panel_index}")


def set_curated(scroll: Scroll, panel_index: int, curated: bool) -> Scroll:
    i = _find(scroll, panel_index)
    panels = list(scroll.panels)
    panels[i] = replace(panels[i], curated=curated)
    return replace(scroll, panels=tuple(panels))


def replace_result(scroll: Scroll, panel_index: int, result: bytes) -> Scroll:
    """Swap a panel's stylized output in place (regeneration)."""
    _check_dimensions(scroll, result, f"panel {panel_index} result")
    i = _find(scroll, panel_index)
    panels = list(scroll.panels)
    panels[i] = replace(panels[i], result=result)
    return replace(scroll, panels=tuple(panels))


def get_panel(scroll: Scroll, panel_index: int) -> Panel:
    return scroll.panels[_find(scroll, panel_index)]


def layout(scroll: Scroll) -> list[tuple[Panel, int]]:
    """Included panels with their global start column."""
    placed = []
    x = 0
    for panel in scroll.included:
        placed.append((panel, x))
        x += scroll.panel_width - scroll.overlap_px
    return placed


def render_viewport(scroll: Scroll, offset_px: int, width_px: int) -> BaseImage:
    """Composite the columns [offset_px, offset_px + width_px).

    Each panel's weight ramps 0→1 over the overlap at its head and 1→0 at its
    tail (t = k / overlap_px); weights are normalized so they sum to one at
    every column, which reduces to plain (1−t, t) cross-fading at a two-panel
    seam and to verbatim copy elsewhere.
    """
    total = scroll.total_width
    if width_px < 1 or offset_px < 0 or offset_px + width_px > total:
        raise OutOfRange(
            f"viewport [{offset_px}, {offset_px + width_px}) outside scroll width {total}"
        )

    placed = layout(scroll)
    height = scroll.panel_height
    if not placed:
        crop = placeholder_gradient(scroll.panel_width, height)[
            :, offset_px : offset_px + width_px
        ]
        return BaseImage.from_array(np.ascontiguousarray(crop))

    acc = np.zeros((height, width_px, 3), dtype=np.float64)
    wsum = np.zeros(width_px, dtype=np.float64)
    last = len(placed) - 1
    v = float(scroll.overlap_px)

    for i, (panel, x_start) in enumerate(placed):
        lo = max(x_start, offset_px)
        hi = min(x_start + scroll.panel_width, offset_px + width_px)
        if lo >= hi:
            continue
        xs = np.arange(lo, hi, dtype=np.float64)
        if v > 0:
            head = np.ones_like(xs) if i == 0 else np.clip((xs - x_start) / v, 0.0, 1.0)
            tail = (
                np.ones_like(xs)
                if i == last
                else np.clip((x_start + scroll.panel_width - xs) / v, 0.0, 1.0)
            )
            weights = np.minimum(head, tail)
        else:
            weights = np.ones_like(xs)
        pixels = BaseImage.from_png(panel.result).pixels
        columns = pixels[:, lo - x_start : hi - x_start, :3].astype(np.float64)
        acc[:, lo - offset_px : hi - offset_px] += columns * weights[None, :, None]
        wsum[lo - offset_px : hi - offset_px] += weights

    rgb = round_half_away_array(acc / wsum[None, :, None])
    out = np.empty((height, width_px, 4), dtype=np.uint8)
    out[:, :, :3] = np.clip(rgb, 0, 255).astype(np.uint8)
    out[:, :, 3] = 255
    return BaseImage.from_array(out)
