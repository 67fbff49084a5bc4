"""Keyed constructions on top of the walk hash: a MAC and a PRNG.

The MAC keeps the hash pipeline but makes the initial state secret: ``key1``
is the position superposition and ``key2`` is a control string that replaces
the all-zero initialization block. The PRNG walks one step per output block
and feeds the last ``N`` output bits back as the next control block.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import walk
from .errors import InvalidAlpha, InvalidKey
from .hashing import (
    Digest,
    HashContext,
    HashParams,
    _setup,
    as_bits,
    check_alpha,
    postprocess,
    validate_params,
)
from .walk import WalkState


@dataclass(frozen=True)
class MacKey:
    key1: tuple[complex, ...]
    key2: tuple[int, ...]

    @classmethod
    def create(cls, key1, key2) -> MacKey:
        return cls(tuple(complex(a) for a in np.asarray(key1).ravel()), tuple(int(b) for b in as_bits(key2)))

    def validate(self, n: int) -> MacKey:
        check_alpha(self.key1, n, exc=InvalidKey)
        if len(self.key2) < n:
            raise InvalidKey(f"key2 must hold at least N = {n} bits, got {len(self.key2)}")
        return self

    @classmethod
    def generate(cls, params: HashParams, rng: np.random.Generator, key2_bits: int | None = None) -> MacKey:
        """Random key: a uniformly random unit vector and ``key2_bits`` random bits."""
        n = params.N
        z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        z /= np.sqrt(np.sum(z.real**2 + z.imag**2))
        return cls.create(z, rng.integers(0, 2, key2_bits or n, dtype=np.uint8))


def mac(params: HashParams, key: MacKey, message) -> Digest:
    """Tag of ``message`` (bit sequence) under ``key``; ``N*k`` bits long."""
    validate_params(params)
    key.validate(params.N)
    state = WalkState.from_position(params.q, np.array(key.key1, dtype=np.complex128))
    keyed = HashParams(params.q, params.k, params.theta1, params.theta2)
    ctx = HashContext(keyed, state=state)
    ctx.absorb(np.array(key.key2, dtype=np.uint8))
    ctx.flush_padded()
    return ctx.absorb(message).finalize()


def mac_bytes(params: HashParams, key: MacKey, data: bytes) -> Digest:
    return mac(params, key, np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8)))


def save_key(path, params: HashParams, key: MacKey) -> None:
    """Write a key file: params, key1 as 17-digit (re, im) pairs, key2 as hex."""
    key2 = np.array(key.key2, dtype=np.uint8)
    doc = {
        "params": params.fingerprint(),
        "key1": [[f"{a.real:.17g}", f"{a.imag:.17g}"] for a in key.key1],
        "key2": np.packbits(key2).tobytes().hex(),
        "key2_bits": int(key2.size),
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_key(path) -> tuple[HashParams, MacKey]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        p = doc["params"]
        params = HashParams(int(p["q"]), int(p["k"]), float(p["theta1"]), float(p["theta2"]))
        key1 = [complex(float(re), float(im)) for re, im in doc["key1"]]
        key2 = np.unpackbits(np.frombuffer(bytes.fromhex(doc["key2"]), dtype=np.uint8))
        key2 = key2[: int(doc.get("key2_bits", key2.size))]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidKey(f"malformed key file {path}: {exc}") from None
    key = MacKey.create(key1, key2)
    key.validate(validate_params(params).N)
    return params, key


def load_alpha(path) -> tuple[complex, ...]:
    """Read only the ``key1`` amplitudes of a key file (for a custom initial state)."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return tuple(complex(float(re), float(im)) for re, im in doc["key1"])


class PrngState:
    """Generator state: the walk state and the next control block."""

    def __init__(self, params: HashParams, state: WalkState, next_block: np.ndarray):
        self.params = params
        self.state = state
        self.next_block = next_block
        _, _, self._ctab, self._stab = _setup(params)

    def next(self) -> np.ndarray:
        walk.evolve_selectors(self.state, self.next_block, self._ctab, self._stab)
        out = postprocess(walk.probabilities(self.state), self.params.k)
        bits = np.unpackbits(np.frombuffer(out, dtype=np.uint8))
        self.next_block = np.ascontiguousarray(bits[-self.params.N :])
        return bits

    def fill(self, nbits: int) -> np.ndarray:
        if nbits < 0:
            raise ValueError("nbits must be nonnegative")
        per = self.params.digest_bits
        chunks = [self.next() for _ in range(-(-nbits // per))]
        if not chunks:
            return np.empty(0, dtype=np.uint8)
        return np.concatenate(chunks)[:nbits]

    def fill_bytes(self, nbytes: int) -> bytes:
        return np.packbits(self.fill(8 * nbytes)).tobytes()


def prng_seed(params: HashParams, alpha=None, init_block=None) -> PrngState:
    """Start a generator at ``alpha (x) |0>`` with ``init_block`` as the first control."""
    validate_params(params)
    n = params.N
    if alpha is None:
        alpha = np.zeros(n, dtype=np.complex128)
        alpha[0] = 1.0
    vec = check_alpha(alpha, n, exc=InvalidAlpha)
    block = np.zeros(n, dtype=np.uint8) if init_block is None else as_bits(init_block)
    if block.size != n:
        raise InvalidKey(f"init block must be {n} bits, got {block.size}")
    plain = HashParams(params.q, params.k, params.theta1, params.theta2)
    return PrngState(plain, WalkState.from_position(params.q, vec), np.ascontiguousarray(block))


def prng_next(st: PrngState) -> np.ndarray:
    return st.next()


def prng_fill(st: PrngState, nbits: int) -> np.ndarray:
    return st.fill(nbits)
