"""Deterministic sub-seed derivation.

All randomness flows from one integer root seed. Components derive their
own streams by hashing the root together with a label path, so adding or
reordering one component never shifts another component's stream.
"""

from __future__ import annotations

import hashlib


def derive_seed(root: int, *labels: object) -> int:
    """Derive a stable 63-bit sub-seed from a root seed and a label path."""
    payload = ":".join([str(int(root))] + [str(label) for label in labels])
    digest = hashlib.sha256(payload.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1
