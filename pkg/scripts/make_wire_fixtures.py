#!/usr/bin/env python3
"""Regenerate the img2img wire-protocol fixtures under tests/fixtures/wire/.

The fixtures pin the JSON shape of the backend contract: a request for a
16x16 gradient panel and the fallback backend's response to it.
"""

import json
from pathlib import Path

from equivalence.raster import BaseImage, placeholder_gradient
from equivalence.synthesis import (
    FallbackBackend,
    SynthesisRequest,
    request_to_wire,
    result_to_wire,
)

OUT_DIR = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "wire"


def main() -> None:
    base = BaseImage.from_array(placeholder_gradient(16, 16))
    request = SynthesisRequest(
        base_image=base.to_png(),
        prompt="ink wash scroll painting, muted palette, river",
        negative_prompt="text, watermark, signature, frame",
        strength=0.5,
        steps=30,
        seed=42,
        width=16,
        height=16,
    )
    result = FallbackBackend().synthesize(request)
    wire_result = result_to_wire(result)
    wire_result["duration_ms"] = 12  # pinned; wall-clock is not reproducible

    OUT_DIR.mkdir(parents=True, exist_ok=True)
    (OUT_DIR / "img2img_request.json").write_text(
        json.dumps(request_to_wire(request), indent=2) + "\n"
    )
    (OUT_DIR / "img2img_response.json").write_text(
        json.dumps(wire_result, indent=2) + "\n"
    )
    print(f"wrote fixtures to {OUT_DIR}")


if __name__ == "__main__":
    main()
