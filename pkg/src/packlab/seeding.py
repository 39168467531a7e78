"""Deterministic seed derivation.

All randomness in the package flows from one 64-bit master seed.  Subsystems
derive their own seeds through `derive_seed`, which hashes the master seed
together with a subsystem label and any indices:

    seed = first 8 bytes (little-endian) of
           SHA-256("{master}:{part}:{part}:...")

The rule is stable across platforms and trivially reproducible in any
language, which keeps sweep cells independent of evaluation order and lets
identical (config, seed) pairs produce byte-identical outputs.
"""

from __future__ import annotations

import hashlib


def derive_seed(master: int, *parts) -> int:
    """Derive a 64-bit child seed from the master seed and a label path."""
    key = ":".join([str(int(master))] + [str(p) for p in parts])
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")
