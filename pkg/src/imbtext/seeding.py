"""Stable sub-seed derivation for independently seeded pipeline stages."""

import hashlib


def derive_seed(seed: int, *parts) -> int:
    """Hash (seed, *parts) into a 63-bit integer.

    Uses SHA-256 so the result is identical across processes, platforms,
    and Python versions (unlike the builtin salted ``hash``). Stages that
    derive their seeds this way stay independent: toggling one stage never
    perturbs another's random stream.
    """
    key = ":".join([str(seed), *(str(p) for p in parts)])
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1
