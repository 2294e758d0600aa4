"""Engine configuration: dataclasses, JSON load/dump, whole-file validation.

A config file is validated as one unit at load time; any violation rejects
startup with a ConfigError listing every problem found.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .language import Pos
from .structure import Camera, HueMode, Shape

DEFAULT_SHAPE_BY_POS = {
    Pos.NOUN: Shape.SLAB,
    Pos.VERB: Shape.RIBBON,
    Pos.ADJ: Shape.SPHERE,
    Pos.ADV: Shape.COLUMN,
}

REQUIRED_SHAPE_POS = (Pos.NOUN, Pos.VERB, Pos.ADJ, Pos.ADV)


@dataclass
class MappingConfig:
    scene_width: float = 12.0
    scene_height: float = 6.0
    scene_depth: float = 9.0
    layer_height: float = 1.2
    shape_by_pos: dict[Pos, Shape] = field(
        default_factory=lambda: dict(DEFAULT_SHAPE_BY_POS)
    )
    hue_mode: HueMode = HueMode.TOKEN_HASH
    style_base_prompt: str = "ink wash scroll painting, muted palette"
    panel_width_px: int = 512
    panel_height_px: int = 768
    camera: Camera | None = None

    def validate(self, problems: list[str]) -> None:
        for name in ("scene_width", "scene_height", "scene_depth", "layer_height"):
            if getattr(self, name) <= 0:
                problems.append(f"mapping.{name} must be > 0")
        for pos in REQUIRED_SHAPE_POS:
            if pos not in self.shape_by_pos:
                problems.append(f"mapping.shape_by_pos missing {pos.value}")
        for name in ("panel_width_px", "panel_height_px"):
            value = getattr(self, name)
            if value <= 0 or value % 8 != 0:
                problems.append(f"mapping.{name} must be a positive multiple of 8")
        if not self.style_base_prompt.strip():
            problems.append("mapping.style_base_prompt must be non-empty")

    def to_dict(self) -> dict:
        d = {
            "scene_width": self.scene_width,
            "scene_height": self.scene_height,
            "scene_depth": self.scene_depth,
            "layer_height": self.layer_height,
            "shape_by_pos": {p.value: s.value for p, s in self.shape_by_pos.items()},
            "hue_mode": self.hue_mode.value,
            "style_base_prompt": self.style_base_prompt,
            "panel_width_px": self.panel_width_px,
            "panel_height_px": self.panel_height_px,
            "camera": None,
        }
        if self.camera is not None:
            d["camera"] = {
                "eye": list(self.camera.eye),
                "look_at": list(self.camera.look_at),
                "vertical_fov_deg": self.camera.vertical_fov_deg,
            }
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "MappingConfig":
        kwargs = {}
        for name in (
            "scene_width", "scene_height", "scene_depth", "layer_height",
            "style_base_prompt", "panel_width_px", "panel_height_px",
        ):
            if name in d:
                kwargs[name] = d[name]
        if "shape_by_pos" in d:
            kwargs["shape_by_pos"] = {
                Pos(p): Shape(s) for p, s in d["shape_by_pos"].items()
            }
        if "hue_mode" in d:
            kwargs["hue_mode"] = HueMode(d["hue_mode"])
        cam = d.get("camera")
        if cam is not None:
            kwargs["camera"] = Camera(
                eye=tuple(cam["eye"]),
                look_at=tuple(cam["look_at"]),
                vertical_fov_deg=cam.get("vertical_fov_deg", 45.0),
            )
        return cls(**kwargs)


@dataclass
class PromptConfig:
    negative: str = "text, watermark, signature, frame"
    steps: int = 30
    max_terms: int = 5
    sparse_below: int = 8
    dense_above: int = 25
    sparse_term: str = "sparse composition"
    dense_term: str = "dense intricate composition"
    diversity_threshold: float = 0.7
    diversity_term: str = "varied textures"
    strength_base: float = 0.35
    strength_scale: float = 0.3

    def validate(self, problems: list[str]) -> None:
        if self.steps < 1:
            problems.append("prompt.steps must be >= 1")
        if self.max_terms < 0:
            problems.append("prompt.max_terms must be >= 0")
        if not 0.0 <= self.strength_base <= 1.0:
            problems.append("prompt.strength_base must be in [0, 1]")

    def to_dict(self) -> dict:
        return dict(self.__dict__)

    @classmethod
    def from_dict(cls, d: dict) -> "PromptConfig":
        known = {k: v for k, v in d.items() if k in cls.__dataclass_fields__}
        return cls(**known)


@dataclass
class BackendConfig:
    kind: str = "fallback"  # "remote" or "fallback"
    base_url: str = "http://127.0.0.1:7860"
    timeout_ms: int = 60_000
    max_in_flight: int = 2

    def validate(self, problems: list[str]) -> None:
        if self.kind not in ("remote", "fallback"):
            problems.append("backend.kind must be 'remote' or 'fallback'")
        if self.kind == "remote" and not self.base_url.strip():
            problems.append("backend.base_url required for remote backend")
        if self.timeout_ms <= 0:
            problems.append("backend.timeout_ms must be > 0")
        if self.max_in_flight < 1:
            problems.append("backend.max_in_flight must be >= 1")

    def to_dict(self) -> dict:
        return dict(self.__dict__)

    @classmethod
    def from_dict(cls, d: dict) -> "BackendConfig":
        known = {k: v for k, v in d.items() if k in cls.__dataclass_fields__}
        return cls(**known)


@dataclass
class ScrollConfig:
    overlap_px: int = 64
    max_panels: int = 64

    def validate(self, problems: list[str], panel_width_px: int) -> None:
        if not 0 <= self.overlap_px < panel_width_px:
            problems.append("scroll.overlap_px must satisfy 0 <= overlap < panel width")
        if self.max_panels < 1:
            problems.append("scroll.max_panels must be >= 1")

    def to_dict(self) -> dict:
        return dict(self.__dict__)

    @classmethod
    def from_dict(cls, d: dict) -> "ScrollConfig":
        known = {k: v for k, v in d.items() if k in cls.__dataclass_fields__}
        return cls(**known)


@dataclass
class ServiceConfig:
    bind: str = "127.0.0.1:8600"
    data_dir: str = "./data"

    def validate(self, problems: list[str]) -> None:
        host, _, port = self.bind.rpartition(":")
        if not host or not port.isdigit():
            problems.append("service.bind must look like host:port")
        if not self.data_dir.strip():
            problems.append("service.data_dir must be non-empty")

    @property
    def host(self) -> str:
        return self.bind.rpartition(":")[0]

    @property
    def port(self) -> int:
        return int(self.bind.rpartition(":")[2])

    def to_dict(self) -> dict:
        return dict(self.__dict__)

    @classmethod
    def from_dict(cls, d: dict) -> "ServiceConfig":
        known = {k: v for k, v in d.items() if k in cls.__dataclass_fields__}
        return cls(**known)


@dataclass
class EngineConfig:
    mapping: MappingConfig = field(default_factory=MappingConfig)
    prompt: PromptConfig = field(default_factory=PromptConfig)
    backend: BackendConfig = field(default_factory=BackendConfig)
    scroll: ScrollConfig = field(default_factory=ScrollConfig)
    service: ServiceConfig = field(default_factory=ServiceConfig)
    # Optional per-file lexicon path overrides, keyed by lexicon name.
    lexicons: dict[str, str] = field(default_factory=dict)

    def validate(self) -> "EngineConfig":
        problems: list[str] = []
        self.mapping.validate(problems)
        self.prompt.validate(problems)
        self.backend.validate(problems)
        self.scroll.validate(problems, self.mapping.panel_width_px)
        self.service.validate(problems)
        known_lexicons = {
            "determiners", "prepositions", "conjunctions",
            "pronouns", "interjections", "subordinators",
        }
        for name, path in self.lexicons.items():
            if name not in known_lexicons:
                problems.append(f"lexicons.{name} is not a known lexicon")
            elif not Path(path).is_file():
                problems.append(f"lexicons.{name} file not found: {path}")
        if problems:
            raise ConfigError("; ".join(problems))
        return self

    def to_dict(self) -> dict:
        return {
            "mapping": self.mapping.to_dict(),
            "prompt": self.prompt.to_dict(),
            "backend": self.backend.to_dict(),
            "scroll": self.scroll.to_dict(),
            "service": self.service.to_dict(),
            "lexicons": dict(self.lexicons),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EngineConfig":
        try:
            config = cls(
                mapping=MappingConfig.from_dict(d.get("mapping", {})),
                prompt=PromptConfig.from_dict(d.get("prompt", {})),
                backend=BackendConfig.from_dict(d.get("backend", {})),
                scroll=ScrollConfig.from_dict(d.get("scroll", {})),
                service=ServiceConfig.from_dict(d.get("service", {})),
                lexicons=dict(d.get("lexicons", {})),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed config: {exc}") from exc
        return config.validate()

    @classmethod
    def load(cls, path: str | Path) -> "EngineConfig":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(raw)

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]
