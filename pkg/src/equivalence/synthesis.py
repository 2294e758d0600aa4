"""Stylization engine #2: pluggable img2img backends behind one wire contract.

``RemoteBackend`` speaks a minimal JSON-over-HTTP protocol that adapters can
map onto common diffusion servers. ``FallbackBackend`` is a deterministic
offline stand-in (posterize + seeded grain + border band) so the whole
pipeline runs and tests reproducibly without a model.
"""

from __future__ import annotations

import base64
import binascii
import struct
import time
from dataclasses import dataclass
from typing import Callable, Protocol

import httpx
import numpy as np

from .errors import BackendRejected, BackendUnreachable, DecodeError
from .raster import BaseImage, round_half_away, round_half_away_array

WIRE_PATH = "/v1/img2img"

# Retry schedule for transport-level failures (seconds between attempts).
RETRY_BACKOFF_S = (0.5, 2.0)

GRAIN_SPACING_PX = 16
GRAIN_AMPLITUDE = 24.0
BORDER_BAND_PX = 8
BORDER_DARKEN = 0.15
POSTERIZE_BITS_RANGE = 4  # bits removed at strength 1: 8 -> 4


def png_dimensions(data: bytes) -> tuple[int, int]:
    """Read (width, height) from a PNG IHDR without decoding the image."""
    if len(data) < 24 or data[:8] != b"\x89PNG\r\n\x1a\n" or data[12:16] != b"IHDR":
        raise DecodeError("not a PNG byte stream")
    width, height = struct.unpack(">II", data[16:24])
    return width, height


@dataclass(frozen=True)
class SynthesisRequest:
    base_image: bytes  # PNG
    prompt: str
    negative_prompt: str
    strength: float
    steps: int
    seed: int
    width: int
    height: int

    def __post_init__(self):
        if not 0.0 <= self.strength <= 1.0:
            raise ValueError("strength must be in [0, 1]")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        for name in ("width", "height"):
            value = getattr(self, name)
            if value <= 0 or value % 8 != 0:
                raise ValueError(f"{name} must be a positive multiple of 8")
        if png_dimensions(self.base_image) != (self.width, self.height):
            raise ValueError("base_image dimensions do not match width/height")


@dataclass(frozen=True)
class SynthesisResult:
    image: bytes  # PNG
    seed_used: int
    duration_ms: int
    backend_id: str


def request_to_wire(request: SynthesisRequest) -> dict:
    return {
        "base_image": base64.b64encode(request.base_image).decode("ascii"),
        "prompt": request.prompt,
        "negative_prompt": request.negative_prompt,
        "strength": request.strength,
        "steps": request.steps,
        "seed": request.seed,
        "width": request.width,
        "height": request.height,
    }


def request_from_wire(body: dict) -> SynthesisRequest:
    try:
        image = base64.b64decode(body["base_image"], validate=True)
    except (KeyError, binascii.Error, ValueError) as exc:
        raise DecodeError(f"bad base_image field: {exc}") from exc
    return SynthesisRequest(
        base_image=image,
        prompt=body["prompt"],
        negative_prompt=body["negative_prompt"],
        strength=body["strength"],
        steps=body["steps"],
        seed=body["seed"],
        width=body["width"],
        height=body["height"],
    )


def result_to_wire(result: SynthesisResult) -> dict:
    return {
        "image": base64.b64encode(result.image).decode("ascii"),
        "seed_used": result.seed_used,
        "duration_ms": result.duration_ms,
    }


class SynthesisBackend(Protocol):
    backend_id: str

    def synthesize(self, request: SynthesisRequest) -> SynthesisResult: ...


def synthesize(request: SynthesisRequest, backend: SynthesisBackend) -> SynthesisResult:
    """Run one stylization and enforce the result-dimension contract."""
    result = backend.synthesize(request)
    if png_dimensions(result.image) != (request.width, request.height):
        raise DecodeError(
            f"backend {backend.backend_id} returned wrong image dimensions"
        )
    return result


def _value_noise(height: int, width: int, seed: int) -> np.ndarray:
    """Smooth lattice noise in [-1, 1], bilinearly interpolated per pixel."""
    rng = np.random.default_rng(seed)
    gh = height // GRAIN_SPACING_PX + 2
    gw = width // GRAIN_SPACING_PX + 2
    lattice = rng.uniform(-1.0, 1.0, size=(gh, gw))

    ys = np.arange(height, dtype=np.float64) / GRAIN_SPACING_PX
    xs = np.arange(width, dtype=np.float64) / GRAIN_SPACING_PX
    y0 = np.floor(ys).astype(np.intp)
    x0 = np.floor(xs).astype(np.intp)
    ty = (ys - y0)[:, None]
    tx = (xs - x0)[None, :]

    top = lattice[y0[:, None], x0[None, :]] * (1 - tx) + lattice[y0[:, None], x0[None, :] + 1] * tx
    bottom = (
        lattice[y0[:, None] + 1, x0[None, :]] * (1 - tx)
        + lattice[y0[:, None] + 1, x0[None, :] + 1] * tx
    )
    return top * (1 - ty) + bottom * ty


def fallback_stylize(base: BaseImage, strength: float, seed: int) -> BaseImage:
    """Deterministic offline stylization: posterize, grain, border band.

    Posterization keeps (8 − round(4×strength)) significant bits per channel,
    so strength 0 is the identity there; grain amplitude and border darkening
    also scale to zero with strength.
    """
    if not 0.0 <= strength <= 1.0:
        raise ValueError("strength must be in [0, 1]")

    bits = 8 - round_half_away(POSTERIZE_BITS_RANGE * strength)
    mask = (0xFF << (8 - bits)) & 0xFF
    rgb = (base.pixels[:, :, :3] & mask).astype(np.float64)

    amplitude = GRAIN_AMPLITUDE * strength
    if amplitude > 0.0:
        rgb += amplitude * _value_noise(base.height, base.width, seed)[:, :, None]

    factor = 1.0 - BORDER_DARKEN * strength
    if factor < 1.0:
        b = BORDER_BAND_PX
        border = np.zeros((base.height, base.width), dtype=bool)
        border[:b, :] = border[-b:, :] = True
        border[:, :b] = border[:, -b:] = True
        rgb[border] *= factor

    out = base.pixels.copy()
    out[:, :, :3] = np.clip(round_half_away_array(rgb), 0, 255).astype(np.uint8)
    return BaseImage(width=base.width, height=base.height, pixels=out)


class FallbackBackend:
    """In-process deterministic backend; byte-stable in (base_image, seed)."""

    backend_id = "fallback"

    def synthesize(self, request: SynthesisRequest) -> SynthesisResult:
        started = time.monotonic()
        base = BaseImage.from_png(request.base_image)
        styled = fallback_stylize(base, request.strength, request.seed)
        duration_ms = int((time.monotonic() - started) * 1000)
        return SynthesisResult(
            image=styled.to_png(),
            seed_used=request.seed,
            duration_ms=duration_ms,
            backend_id=self.backend_id,
        )


class RemoteBackend:
    """HTTP img2img client with bounded timeout and a fixed retry schedule.

    Transport failures retry per RETRY_BACKOFF_S; a non-200 response is a
    deterministic rejection and is not retried.
    """

    backend_id = "remote"

    def __init__(
        self,
        base_url: str,
        timeout_ms: int = 60000,
        transport: httpx.BaseTransport | None = None,
        sleep_fn: Callable[[float], None] = time.sleep,
    ):
        self._url = base_url.rstrip("/") + WIRE_PATH
        self._sleep = sleep_fn
        self._client = httpx.Client(
            transport=transport, timeout=timeout_ms / 1000.0
        )

    def close(self) -> None:
        self._client.close()

    def synthesize(self, request: SynthesisRequest) -> SynthesisResult:
        body = request_to_wire(request)
        last_error: Exception | None = None
        for attempt in range(len(RETRY_BACKOFF_S) + 1):
            if attempt > 0:
                self._sleep(RETRY_BACKOFF_S[attempt - 1])
            try:
                response = self._client.post(self._url, json=body)
            except httpx.TransportError as exc:
                last_error = exc
                continue
            if response.status_code != 200:
                raise BackendRejected(response.status_code, response.text)
            return self._parse_success(request, response)
        raise BackendUnreachable(
            f"backend unreachable after {len(RETRY_BACKOFF_S) + 1} attempts: {last_error}"
        )

    def _parse_success(
        self, request: SynthesisRequest, response: httpx.Response
    ) -> SynthesisResult:
        try:
            payload = response.json()
            image = base64.b64decode(payload["image"], validate=True)
            seed_used = int(payload["seed_used"])
            duration_ms = int(payload["duration_ms"])
        except (KeyError, ValueError, TypeError, binascii.Error) as exc:
            raise DecodeError(f"malformed backend response: {exc}") from exc
        if png_dimensions(image) != (request.width, request.height):
            raise DecodeError("backend returned wrong image dimensions")
        return SynthesisResult(
            image=image,
            seed_used=seed_used,
            duration_ms=duration_ms,
            backend_id=self.backend_id,
        )


def make_backend(kind: str, base_url: str | None, timeout_ms: int, **kwargs):
    if kind == "fallback":
        return FallbackBackend()
    if kind == "remote":
        if not base_url:
            raise ValueError("remote backend requires base_url")
        return RemoteBackend(base_url, timeout_ms, **kwargs)
    raise ValueError(f"unknown backend kind: {kind}")
