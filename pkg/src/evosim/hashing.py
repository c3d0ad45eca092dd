"""Stable hashing helpers.

Every source of "randomness" in the engine is derived from 64-bit FNV-1a
hashes of canonical strings, so runs are reproducible across platforms and
resumable without carrying RNG state.
"""
from __future__ import annotations

import json
import re

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
MASK64 = 0xFFFFFFFFFFFFFFFF

_WS = re.compile(r"\s+")


def fnv1a64(text: str) -> int:
    """64-bit FNV-1a hash of the UTF-8 encoding of *text*."""
    h = FNV_OFFSET
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * FNV_PRIME) & MASK64
    return h


def normalize_ws(text: str) -> str:
    return _WS.sub(" ", text).strip()


def canonical_json(obj) -> str:
    """Deterministic JSON: sorted keys, tight separators, no NaNs."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False)


def canonical_context(context: dict) -> str:
    """Canonical serialization of a prompt context (sorted keys, collapsed whitespace)."""
    normalized = {k: normalize_ws(v) if isinstance(v, str) else v for k, v in context.items()}
    return canonical_json(normalized)


def mix(*parts) -> int:
    """Hash a tuple of strings/ints into one 64-bit value."""
    return fnv1a64("\x1f".join(str(p) for p in parts))


def unit_float(h: int) -> float:
    """Map a 64-bit hash to [0, 1)."""
    return (h >> 11) / float(1 << 53)
