"""The block hash pipeline: parameters, initialization, absorption, digest.

Message bits are consumed ``N`` at a time; each block drives one walk step
with bit ``j`` choosing the coin at position ``j`` (0 -> theta1, 1 -> theta2).
A trailing partial block is completed with the Hadamard coin. The digest
takes ``floor(p(x) * 10**k) mod 2**k`` for every position and concatenates
the ``k``-bit groups MSB first in ascending ``x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import walk
from .errors import DegenerateInit, InvalidAlpha, InvalidSize, InvalidTheta
from .walk import HADAMARD_SELECTOR, WalkState

COS_THETA1 = 3 / 5
COS_THETA2 = 8 / 17

INSTANCES = {
    "caqwbh-256": (5, 8),
    "caqwbh-512": (6, 8),
}


@dataclass(frozen=True)
class HashParams:
    """Configuration of one hash instance.

    ``alpha`` is the initial position superposition; ``None`` means ``e_0``.
    """

    q: int
    k: int
    theta1: float
    theta2: float
    alpha: tuple[complex, ...] | None = field(default=None)

    @property
    def N(self) -> int:
        return 1 << self.q

    @property
    def digest_bits(self) -> int:
        return self.N * self.k

    @property
    def digest_bytes(self) -> int:
        return self.digest_bits // 8

    def alpha_vector(self) -> np.ndarray:
        if self.alpha is None:
            vec = np.zeros(self.N, dtype=np.complex128)
            vec[0] = 1.0
            return vec
        return np.array(self.alpha, dtype=np.complex128)

    def with_alpha(self, alpha) -> HashParams:
        alpha = None if alpha is None else tuple(complex(a) for a in np.asarray(alpha).ravel())
        return HashParams(self.q, self.k, self.theta1, self.theta2, alpha)

    @classmethod
    def instance(cls, name: str = "caqwbh-256") -> HashParams:
        try:
            q, k = INSTANCES[name.lower()]
        except KeyError:
            raise InvalidSize(f"unknown instance {name!r}; choose from {sorted(INSTANCES)}") from None
        return cls(q, k, walk.theta_from_cos(COS_THETA1), walk.theta_from_cos(COS_THETA2))

    def fingerprint(self) -> dict:
        """JSON-friendly description; floats as 17-significant-digit strings."""
        out = {
            "q": self.q,
            "N": self.N,
            "k": self.k,
            "theta1": f"{self.theta1:.17g}",
            "theta2": f"{self.theta2:.17g}",
        }
        if self.alpha is not None:
            out["alpha"] = [[f"{a.real:.17g}", f"{a.imag:.17g}"] for a in self.alpha]
        return out


def check_alpha(alpha, n: int, exc=InvalidAlpha) -> np.ndarray:
    vec = np.asarray(alpha, dtype=np.complex128).ravel()
    if vec.shape != (n,):
        raise exc(f"expected {n} initial amplitudes, got {vec.size}")
    if not np.all(np.isfinite(vec)):
        raise exc("initial amplitudes must be finite")
    norm2 = float(np.sum(vec.real**2 + vec.imag**2))
    if abs(norm2 - 1.0) > 1e-12:
        raise exc(f"initial amplitudes must have unit norm, sum |alpha|^2 = {norm2!r}")
    return vec


def validate_params(params: HashParams) -> HashParams:
    """Return ``params`` unchanged if it describes a usable instance, else raise."""
    if not isinstance(params.q, (int, np.integer)) or params.q < 1:
        raise InvalidSize(f"N = 2**q needs a positive integer q, got {params.q!r}")
    if not isinstance(params.k, (int, np.integer)) or params.k < 1:
        raise InvalidSize(f"k must be a positive integer, got {params.k!r}")
    if (params.N * params.k) % 8:
        raise InvalidSize(f"digest length N*k = {params.N * params.k} is not a multiple of 8")
    for name in ("theta1", "theta2"):
        theta = getattr(params, name)
        if not isinstance(theta, (float, int)) or not (0.0 < theta < math.pi / 2):
            raise InvalidTheta(f"{name} must lie in (0, pi/2), got {theta!r}")
        if theta == math.pi / 4:
            raise InvalidTheta(f"{name} = pi/4 is reserved for the Hadamard padding coin")
    if params.theta1 == params.theta2:
        raise InvalidTheta("theta1 and theta2 must differ")
    if params.alpha is not None:
        check_alpha(params.alpha, params.N)
    return params


@lru_cache(maxsize=64)
def _setup(params: HashParams):
    validate_params(params)
    coin0 = walk.make_coin(params.theta1)
    coin1 = walk.make_coin(params.theta2)
    if coin0.c == coin0.s or coin1.c == coin1.s:
        raise InvalidTheta("message coins must differ from the Hadamard coin")
    ctab, stab = walk.coin_tables(coin0, coin1)
    return coin0, coin1, ctab, stab


@lru_cache(maxsize=64)
def _initial_state(params: HashParams) -> WalkState:
    _, _, ctab, stab = _setup(params)
    state = WalkState.from_position(params.q, params.alpha_vector())
    walk.evolve_selectors(state, np.zeros(params.N, dtype=np.uint8), ctab, stab)
    p = walk.probabilities(state)
    if np.any(p < 1e-300):
        raise DegenerateInit(
            f"initialization left positions {np.flatnonzero(p < 1e-300).tolist()} with zero probability"
        )
    return state


def as_bits(bits) -> np.ndarray:
    """Coerce a bit sequence (``'0101'``, list of 0/1, bool array) to uint8."""
    if isinstance(bits, str):
        bits = bits.strip()
        if bits and set(bits) - {"0", "1"}:
            raise ValueError("bit string may contain only '0' and '1'")
        return np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - ord("0")
    if isinstance(bits, (bytes, bytearray, memoryview)):
        raise TypeError("use bits_from_bytes() for byte input")
    arr = np.asarray(bits)
    if arr.dtype == bool:
        return arr.astype(np.uint8).ravel()
    arr = arr.astype(np.uint8, copy=False).ravel()
    if arr.size and arr.max() > 1:
        raise ValueError("bits must be 0 or 1")
    return arr


def bits_from_bytes(data: bytes) -> np.ndarray:
    """Unpack bytes most-significant bit first."""
    return np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8))


def postprocess(p: np.ndarray, k: int) -> bytes:
    """Map a distribution to digest bytes: ``floor(p * 10**k) mod 2**k`` per position."""
    scale = float(10**k)
    mod = 1 << k
    acc = 0
    for px in p.tolist():
        acc = (acc << k) | (math.floor(px * scale) % mod)
    return acc.to_bytes(len(p) * k // 8, "big")


@dataclass(frozen=True)
class Digest:
    """A digest of ``nbits`` bits stored big-endian in ``data``."""

    data: bytes
    nbits: int

    def __post_init__(self):
        if self.nbits != 8 * len(self.data):
            raise InvalidSize("digest bit length must match its byte length")

    def hex(self) -> str:
        return self.data.hex()

    def __str__(self):
        return self.hex()

    @property
    def bits(self) -> np.ndarray:
        return np.unpackbits(np.frombuffer(self.data, dtype=np.uint8))

    @classmethod
    def from_hex(cls, text: str) -> Digest:
        data = bytes.fromhex(text.strip())
        return cls(data, 8 * len(data))

    @classmethod
    def from_bits(cls, bits) -> Digest:
        arr = as_bits(bits)
        if arr.size % 8:
            raise InvalidSize("digest bit length must be a multiple of 8")
        return cls(np.packbits(arr).tobytes(), int(arr.size))

    def hamming(self, other: Digest) -> int:
        if self.nbits != other.nbits:
            raise InvalidSize("digests have different lengths")
        return (int.from_bytes(self.data, "big") ^ int.from_bytes(other.data, "big")).bit_count()


class HashContext:
    """Streaming hash state. Feed bits with :meth:`absorb` or bytes with :meth:`update`."""

    def __init__(self, params: HashParams, state: WalkState | None = None):
        self.params = params
        _, _, self._ctab, self._stab = _setup(params)
        self.state = _initial_state(params).copy() if state is None else state
        self.pending = np.empty(0, dtype=np.uint8)
        self._done = False

    def _check_open(self):
        if self._done:
            raise RuntimeError("context already finalized")

    def absorb(self, bits) -> HashContext:
        self._check_open()
        self._absorb(as_bits(bits))
        return self

    def update(self, data: bytes) -> HashContext:
        self._check_open()
        self._absorb(bits_from_bytes(data))
        return self

    def _absorb(self, bits: np.ndarray):
        n = self.params.N
        if self.pending.size:
            bits = np.concatenate([self.pending, bits])
        full = bits.size - bits.size % n
        if full:
            walk.evolve_selectors(self.state, np.ascontiguousarray(bits[:full]), self._ctab, self._stab)
        self.pending = bits[full:].copy()

    def flush_padded(self):
        """Run the trailing partial block, Hadamard coin on the unfilled positions."""
        r = self.pending.size
        if r:
            block = np.full(self.params.N, HADAMARD_SELECTOR, dtype=np.uint8)
            block[:r] = self.pending
            walk.evolve_selectors(self.state, block, self._ctab, self._stab)
            self.pending = np.empty(0, dtype=np.uint8)

    def finalize(self) -> Digest:
        self._check_open()
        self.flush_padded()
        self._done = True
        data = postprocess(walk.probabilities(self.state), self.params.k)
        return Digest(data, self.params.digest_bits)


def init_context(params: HashParams) -> HashContext:
    """Prepare ``alpha (x) |0>`` and run one step under the all-zero block."""
    return HashContext(params)


def absorb(ctx: HashContext, message_bits) -> HashContext:
    return ctx.absorb(message_bits)


def finalize(ctx: HashContext) -> Digest:
    return ctx.finalize()


def hash_bits(params: HashParams, message) -> Digest:
    """Digest of a bit sequence."""
    return HashContext(params).absorb(message).finalize()


def hash_bytes(params: HashParams, data: bytes) -> Digest:
    """Digest of a byte string, bits taken MSB first."""
    return HashContext(params).update(data).finalize()
