"""Prompt construction: transcript + features -> text prompt for engine #2.

The positive prompt is the configured style base followed by the most
frequent content words and coarse density/diversity modifiers, so the prompt
tracks both what was said and how it was said.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .config import MappingConfig, PromptConfig
from .language import CONTENT_POS, LanguageFeatures, Token


@dataclass(frozen=True)
class PromptSpec:
    positive: str
    negative: str
    strength: float
    steps: int
    seed: int

    def __post_init__(self):
        if not self.positive:
            raise ValueError("positive prompt must be non-empty")
        if not 0.0 <= self.strength <= 1.0:
            raise ValueError("strength must be in [0, 1]")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")

    def to_payload(self) -> dict:
        return {
            "positive": self.positive,
            "negative": self.negative,
            "strength": self.strength,
            "steps": self.steps,
            "seed": self.seed,
        }


def top_content_terms(tokens: list[Token], limit: int) -> list[str]:
    """Most frequent content-word lower forms; ties go to first occurrence."""
    content = [t.lower for t in tokens if t.pos in CONTENT_POS]
    counts = Counter(content)
    first_seen: dict[str, int] = {}
    for i, word in enumerate(content):
        first_seen.setdefault(word, i)
    ordered = sorted(counts, key=lambda w: (-counts[w], first_seen[w]))
    return ordered[:limit]


def build_prompt(
    tokens: list[Token],
    features: LanguageFeatures,
    mapping: MappingConfig,
    prompt_cfg: PromptConfig,
    seed: int,
) -> PromptSpec:
    parts = [mapping.style_base_prompt]
    parts.extend(top_content_terms(tokens, prompt_cfg.max_terms))

    if features.token_count < prompt_cfg.sparse_below:
        parts.append(prompt_cfg.sparse_term)
    elif features.token_count > prompt_cfg.dense_above:
        parts.append(prompt_cfg.dense_term)

    if features.lexical_diversity > prompt_cfg.diversity_threshold:
        parts.append(prompt_cfg.diversity_term)

    strength = prompt_cfg.strength_base + prompt_cfg.strength_scale * features.content_ratio
    strength = max(0.0, min(1.0, strength))

    return PromptSpec(
        positive=", ".join(parts),
        negative=prompt_cfg.negative,
        strength=strength,
        steps=prompt_cfg.steps,
        seed=seed,
    )
