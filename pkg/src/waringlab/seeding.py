"""Deterministic sub-seed derivation.

Every retry or trial derives its own seed from the parent seed and a label, so
results do not depend on execution order.
"""

import hashlib


def subseed(seed: int, *parts) -> int:
    key = ":".join(str(x) for x in (seed, *parts)).encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "big")
