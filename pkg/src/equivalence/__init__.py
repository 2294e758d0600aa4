"""Speech-to-scroll generative installation engine.

Pipeline: utterance text -> language features -> spatial structure ->
rasterized base image -> stylization prompt -> img2img synthesis ->
blended scroll panel, streamed to clients over HTTP/WebSocket.  A press
word-frequency analyzer ships alongside as a standalone CLI.
"""

from .config import (
    BackendConfig,
    EngineConfig,
    MappingConfig,
    PromptConfig,
    ScrollConfig,
    ServiceConfig,
)
from .errors import (
    BackendRejected,
    BackendUnreachable,
    ConfigError,
    DecodeError,
    DegenerateCamera,
    DimensionMismatch,
    EmptyCorpus,
    EmptyInput,
    EquivalenceError,
    NoContentWords,
    OutOfRange,
    TextTooLong,
    UnknownPanel,
    UnknownSession,
    UnreadableFile,
)
from .language import LanguageAnalyzer, LanguageFeatures, Pos, Sentence, Token
from .prompts import PromptSpec, build_prompt
from .raster import BaseImage, rasterize
from .scroll import Panel, Scroll, append_panel, render_viewport, set_curated
from .session import Engine, SessionEvent, Subscription
from .structure import (
    Camera,
    HueMode,
    Primitive,
    Shape,
    SpatialStructure,
    fallback_structure,
    map_structure,
    map_structure_or_fallback,
)
from .synthesis import (
    FallbackBackend,
    RemoteBackend,
    SynthesisRequest,
    SynthesisResult,
    fallback_stylize,
    make_backend,
    synthesize,
)

__version__ = "0.1.0"

__all__ = [
    "BackendConfig",
    "BackendRejected",
    "BackendUnreachable",
    "BaseImage",
    "Camera",
    "ConfigError",
    "DecodeError",
    "DegenerateCamera",
    "DimensionMismatch",
    "EmptyCorpus",
    "EmptyInput",
    "Engine",
    "EngineConfig",
    "EquivalenceError",
    "FallbackBackend",
    "HueMode",
    "LanguageAnalyzer",
    "LanguageFeatures",
    "MappingConfig",
    "NoContentWords",
    "OutOfRange",
    "Panel",
    "Pos",
    "Primitive",
    "PromptConfig",
    "PromptSpec",
    "RemoteBackend",
    "Scroll",
    "ScrollConfig",
    "Sentence",
    "ServiceConfig",
    "SessionEvent",
    "Shape",
    "SpatialStructure",
    "Subscription",
    "SynthesisRequest",
    "SynthesisResult",
    "TextTooLong",
    "Token",
    "UnknownPanel",
    "UnknownSession",
    "UnreadableFile",
    "append_panel",
    "build_prompt",
    "fallback_structure",
    "fallback_stylize",
    "make_backend",
    "map_structure",
    "map_structure_or_fallback",
    "rasterize",
    "render_viewport",
    "set_curated",
    "synthesize",
    "__version__",
]
