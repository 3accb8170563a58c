"""Named, independent RNG streams derived from one root seed."""

from __future__ import annotations

import hashlib
import random


def derive_seed(root: int, *path: object) -> int:
    """Stable 63-bit seed for the stream ``path`` under ``root`` (independent of PYTHONHASHSEED)."""
    key = "/".join([str(root), *(str(p) for p in path)])
    return int.from_bytes(hashlib.sha256(key.encode()).digest()[:8], "big") >> 1


def stream(root: int, *path: object) -> random.Random:
    return random.Random(derive_seed(root, *path))
