#!/usr/bin/env python3
"""Run utterances through the full offline pipeline with fixed seeds.

For each input line: features -> structure -> base image -> prompt ->
fallback stylization -> scroll append. Writes, per panel, NN.base.png,
NN.png and NN.prompt.json, plus scroll.png (the full-width viewport) and a
manifest. Output is byte-deterministic in (utterances, seed, config).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from equivalence.config import EngineConfig
from equivalence.hashing import splitmix64
from equivalence.language import LanguageAnalyzer
from equivalence.prompts import build_prompt
from equivalence.raster import rasterize
from equivalence.scroll import Panel, Scroll, append_panel, render_viewport
from equivalence.structure import map_structure_or_fallback
from equivalence.synthesis import FallbackBackend, SynthesisRequest, synthesize


def run(utterances: list[str], out_dir: Path, seed: int, config: EngineConfig) -> dict:
    out_dir.mkdir(parents=True, exist_ok=True)
    analyzer = LanguageAnalyzer()
    backend = FallbackBackend()
    mapping = config.mapping
    scroll = Scroll(
        panel_width=mapping.panel_width_px,
        panel_height=mapping.panel_height_px,
        overlap_px=config.scroll.overlap_px,
        max_panels=config.scroll.max_panels,
    )

    manifest = {"seed": seed, "panels": []}
    for i, text in enumerate(utterances):
        panel_seed = splitmix64(seed + i)
        tokens, _, features = analyzer.analyze(text)
        structure = map_structure_or_fallback(features, tokens, mapping, panel_seed)
        base = rasterize(structure, mapping)
        prompt = build_prompt(tokens, features, mapping, config.prompt, panel_seed)
        request = SynthesisRequest(
            base_image=base.to_png(),
            prompt=prompt.positive,
            negative_prompt=prompt.negative,
            strength=prompt.strength,
            steps=prompt.steps,
            seed=panel_seed,
            width=mapping.panel_width_px,
            height=mapping.panel_height_px,
        )
        result = synthesize(request, backend)

        (out_dir / f"{i:02d}.base.png").write_bytes(request.base_image)
        (out_dir / f"{i:02d}.png").write_bytes(result.image)
        (out_dir / f"{i:02d}.prompt.json").write_text(
            json.dumps(prompt.to_payload(), indent=2, sort_keys=True) + "\n"
        )
        panel = Panel(
            index=i,
            utterance_id=f"u-{i:06d}",
            base=request.base_image,
            prompt=prompt,
            result=result.image,
            created_at=0,  # fixed: output must not depend on the clock
        )
        scroll = append_panel(scroll, panel)
        manifest["panels"].append(
            {"index": i, "text": text, "seed": panel_seed, "strength": prompt.strength}
        )

    viewport = render_viewport(scroll, 0, scroll.total_width)
    (out_dir / "scroll.png").write_bytes(viewport.to_png())
    manifest["total_width"] = scroll.total_width
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    )
    return manifest


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--utterances", required=True, help="text file, one utterance per line")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--config", help="optional engine config JSON")
    args = parser.parse_args(argv)

    config = EngineConfig.load(args.config) if args.config else EngineConfig()
    lines = [
        line.strip()
        for line in Path(args.utterances).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    started = time.monotonic()
    manifest = run(lines, Path(args.out), args.seed, config)
    elapsed = time.monotonic() - started
    print(
        f"rendered {len(manifest['panels'])} panels "
        f"(total width {manifest['total_width']}px) in {elapsed:.1f}s -> {args.out}"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
