"""Small deterministic hash/seed helpers.

Both functions are specified bit-exactly so colors derived from them are
stable across runs, platforms and implementations.
"""

_FNV_OFFSET = 2166136261
_FNV_PRIME = 16777619
_MASK32 = 0xFFFFFFFF
_MASK64 = 0xFFFFFFFFFFFFFFFF


def fnv1a_32(text: str) -> int:
    """FNV-1a 32-bit hash over the UTF-8 bytes of ``text``."""
    h = _FNV_OFFSET
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK32
    return h


def splitmix64(x: int) -> int:
    """One step of the splitmix64 sequence; used to fan a seed out."""
    z = (x + 0x9E3779B97F4B7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)
