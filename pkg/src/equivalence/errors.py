"""Exception types shared across the engine."""


class EquivalenceError(Exception):
    """Base class for all engine errors."""


class ConfigError(EquivalenceError):
    """Configuration file failed validation; startup must be rejected."""


class EmptyInput(EquivalenceError):
    """Utterance text is empty or whitespace-only."""


class TextTooLong(EquivalenceError):
    """Utterance text exceeds the accepted length."""


class NoContentWords(EquivalenceError):
    """No Noun/Verb/Adj/Adv token; caller should use the fallback structure."""


class DegenerateCamera(EquivalenceError):
    """Camera eye and look-at coincide."""


class DimensionMismatch(EquivalenceError):
    """Panel image dimensions do not match the scroll configuration."""


class OutOfRange(EquivalenceError):
    """Viewport request lies outside the composed scroll."""


class UnknownPanel(EquivalenceError):
    """No panel with the requested index is retained."""


class UnknownSession(EquivalenceError):
    """No session with the requested id."""


class BackendUnreachable(EquivalenceError):
    """Synthesis backend could not be reached within the retry budget."""


class BackendRejected(EquivalenceError):
    """Synthesis backend answered with a non-success status."""

    def __init__(self, status_code: int, body: str):
        super().__init__(f"backend rejected request: status {status_code}")
        self.status_code = status_code
        self.body = body


class DecodeError(EquivalenceError):
    """Backend response image is malformed or of the wrong size."""


class EmptyCorpus(EquivalenceError):
    """Corpus directory contains no readable text files."""


class UnreadableFile(EquivalenceError):
    """A corpus file could not be read; message names the file."""
