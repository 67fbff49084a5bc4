"""Controlled alternate quantum walk block hash (CAQWBH), its MAC and PRNG
extensions, and a statistical test harness."""

from .errors import (
    CaqwbhError,
    DegenerateInit,
    DomainError,
    EmptyMessage,
    InvalidAlpha,
    InvalidKey,
    InvalidSize,
    InvalidTheta,
    SizeMismatch,
)
from .hashing import (
    Digest,
    HashContext,
    HashParams,
    absorb,
    finalize,
    hash_bits,
    hash_bytes,
    init_context,
    validate_params,
)
from .keyed import MacKey, PrngState, mac, prng_fill, prng_next, prng_seed
from .walk import BACKEND, Coin2, WalkState, make_coin

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CaqwbhError",
    "Coin2",
    "DegenerateInit",
    "Digest",
    "DomainError",
    "EmptyMessage",
    "HashContext",
    "HashParams",
    "InvalidAlpha",
    "InvalidKey",
    "InvalidSize",
    "InvalidTheta",
    "MacKey",
    "PrngState",
    "SizeMismatch",
    "WalkState",
    "absorb",
    "finalize",
    "hash_bits",
    "hash_bytes",
    "init_context",
    "mac",
    "make_coin",
    "prng_fill",
    "prng_next",
    "prng_seed",
    "validate_params",
]
