import hashlib

import numpy as np


def _key(value: str | int) -> int:
    if isinstance(value, int):
        return value
    return int.from_bytes(hashlib.sha256(value.encode("utf-8")).digest()[:8], "big")


def derive_rng(seed: int, *keys: str | int) -> np.random.Generator:
    """
    Independent generator for ``(seed, *keys)``. Never shared between records, so
    draws do not depend on scheduling or on which other records exist.
    """
    return np.random.default_rng(np.random.SeedSequence([seed, *(_key(k) for k in keys)]))
