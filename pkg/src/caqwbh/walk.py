"""Controlled alternate quantum walk on the complete graph with self-loops.

The walker lives on ``N = 2**q`` positions with a two-level coin. The state is
a complex vector of ``2N`` amplitudes in position-major order, amplitude
``(x, c)`` at index ``2*x + c``. One step applies ``q`` rounds of
coin-then-shift, where the ``i``-th shift flips position bit ``i`` on the
coin-1 subspace. The same ``N``-bit control block selects the coin at every
position in all ``q`` rounds.

Floating point is normative: binary64, fixed operation order, no FMA. The hot
loops live in a compiled extension when available (``_ckernels``) and in a
numpy fallback otherwise; both produce identical bits.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from types import ModuleType

import mpmath
import numpy as np

from . import _kernels_py
from .errors import DomainError, SizeMismatch

HADAMARD_SELECTOR = 2


def _load_backend() -> tuple[str, ModuleType]:
    choice = os.environ.get("CAQWBH_BACKEND", "auto").lower()
    if choice in ("python", "numpy", "py"):
        return "python", _kernels_py
    try:
        from . import _ckernels
    except ImportError:
        if choice == "c":
            raise
        return "python", _kernels_py
    return "c", _ckernels


BACKEND, _kernels = _load_backend()


def available_backends() -> dict[str, ModuleType]:
    """Kernel modules importable in this environment, keyed by name."""
    out = {"python": _kernels_py}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        out["c"] = _ckernels
    return out


def _correctly_rounded(fn, x: float) -> float:
    # libm cos/sin are not guaranteed correctly rounded; coins must not vary
    # across platforms.
    with mpmath.workprec(128):
        return float(fn(mpmath.mpf(x)))


@dataclass(frozen=True)
class Coin2:
    """Reflection coin ``[[c, s], [s, -c]]`` with ``c = cos(theta)``."""

    theta: float
    c: float
    s: float

    def matrix(self) -> np.ndarray:
        return np.array([[self.c, self.s], [self.s, -self.c]])


HADAMARD = Coin2(theta=math.pi / 4, c=math.sqrt(0.5), s=math.sqrt(0.5))


def make_coin(theta: float) -> Coin2:
    """Build the coin for ``theta`` in ``(0, pi/2)``.

    ``cos`` and ``sin`` are correctly rounded to binary64. ``theta == pi/4``
    returns :data:`HADAMARD` with ``c == s == sqrt(1/2)`` exactly.
    """
    theta = float(theta)
    if not (0.0 < theta < math.pi / 2):
        raise DomainError(f"theta must lie in (0, pi/2), got {theta!r}")
    if theta == math.pi / 4:
        return HADAMARD
    return Coin2(
        theta=theta,
        c=_correctly_rounded(mpmath.cos, theta),
        s=_correctly_rounded(mpmath.sin, theta),
    )


def theta_from_cos(cos_value: float) -> float:
    """Correctly rounded ``acos``; used for the named instances (cos = 3/5, 8/17)."""
    with mpmath.workprec(128):
        return float(mpmath.acos(mpmath.mpf(cos_value)))


def coin_tables(coin0: Coin2, coin1: Coin2) -> tuple[np.ndarray, np.ndarray]:
    """Selector lookup tables: 0 -> coin0, 1 -> coin1, 2 -> Hadamard."""
    ctab = np.array([coin0.c, coin1.c, HADAMARD.c], dtype=np.float64)
    stab = np.array([coin0.s, coin1.s, HADAMARD.s], dtype=np.float64)
    return ctab, stab


class WalkState:
    """The ``2N`` complex amplitudes of the walker, mutated in place."""

    __slots__ = ("q", "amplitudes")

    def __init__(self, q: int, amplitudes=None):
        if q < 1:
            raise DomainError(f"q must be a positive integer, got {q}")
        self.q = int(q)
        size = 2 << self.q
        if amplitudes is None:
            amps = np.zeros(size, dtype=np.complex128)
            amps[0] = 1.0
        else:
            amps = np.array(amplitudes, dtype=np.complex128)
            if amps.shape != (size,):
                raise SizeMismatch(f"expected {size} amplitudes for q={q}, got {amps.shape}")
            if not np.all(np.isfinite(amps)):
                raise DomainError("amplitudes must be finite")
        self.amplitudes = amps

    @property
    def N(self) -> int:
        return 1 << self.q

    @classmethod
    def from_position(cls, q: int, alpha) -> WalkState:
        """``(sum_i alpha_i |i>) (x) |0>_coin``."""
        alpha = np.asarray(alpha, dtype=np.complex128)
        if alpha.shape != (1 << q,):
            raise SizeMismatch(f"expected {1 << q} position amplitudes, got {alpha.shape}")
        amps = np.zeros(2 << q, dtype=np.complex128)
        amps[0::2] = alpha
        return cls(q, amps)

    @classmethod
    def basis(cls, q: int, x: int, c: int = 0) -> WalkState:
        amps = np.zeros(2 << q, dtype=np.complex128)
        amps[2 * x + c] = 1.0
        return cls(q, amps)

    def amp(self, x: int, c: int) -> complex:
        return complex(self.amplitudes[2 * x + c])

    def norm(self) -> float:
        return math.sqrt(float(np.sum(self.amplitudes.real**2 + self.amplitudes.imag**2)))

    def copy(self) -> WalkState:
        return WalkState(self.q, self.amplitudes.copy())

    def _buf(self) -> np.ndarray:
        return self.amplitudes.view(np.float64)

    def __eq__(self, other):
        if not isinstance(other, WalkState):
            return NotImplemented
        return self.q == other.q and self.amplitudes.tobytes() == other.amplitudes.tobytes()

    def __repr__(self):
        return f"WalkState(q={self.q}, norm={self.norm():.15f})"


def _block_array(block, n: int) -> np.ndarray:
    sel = np.ascontiguousarray(block, dtype=np.uint8)
    if sel.ndim != 1 or sel.shape[0] != n:
        raise SizeMismatch(f"control block must have {n} entries, got {sel.shape}")
    if sel.size and sel.max() > 1:
        raise DomainError("control block entries must be 0 or 1")
    return sel


def apply_coin(state: WalkState, block, coin0: Coin2, coin1: Coin2) -> WalkState:
    """Apply the position-dependent coin; ``block[x]`` picks coin0 or coin1 at ``x``."""
    sel = _block_array(block, state.N)
    ctab, stab = coin_tables(coin0, coin1)
    _kernels.coin(state._buf(), sel, ctab, stab)
    return state


def apply_shift(state: WalkState, i: int) -> WalkState:
    """Flip position bit ``i`` (1-based) on the coin-1 subspace."""
    if not 1 <= i <= state.q:
        raise DomainError(f"shift index must be in [1, {state.q}], got {i}")
    _kernels.shift(state._buf(), i - 1)
    return state


def step(state: WalkState, block, coin0: Coin2, coin1: Coin2) -> WalkState:
    """One walk step ``S_q C ... S_2 C S_1 C`` under a single control block."""
    sel = _block_array(block, state.N)
    ctab, stab = coin_tables(coin0, coin1)
    _kernels.evolve(state._buf(), sel, state.q, ctab, stab)
    return state


def evolve(state: WalkState, blocks, coin0: Coin2, coin1: Coin2) -> WalkState:
    """Apply one step per block, first block first."""
    n = state.N
    arr = np.ascontiguousarray(blocks, dtype=np.uint8)
    if arr.size == 0:
        return state
    arr = arr.reshape(-1)
    if arr.size % n:
        raise SizeMismatch(f"blocks must be a whole number of {n}-bit blocks")
    if arr.max() > 1:
        raise DomainError("control block entries must be 0 or 1")
    ctab, stab = coin_tables(coin0, coin1)
    _kernels.evolve(state._buf(), arr, state.q, ctab, stab)
    return state


def evolve_selectors(state: WalkState, selectors: np.ndarray, ctab: np.ndarray, stab: np.ndarray) -> WalkState:
    # Unchecked fast path for the hash pipeline; selectors may include the
    # Hadamard selector 2.
    if selectors.size:
        _kernels.evolve(state._buf(), selectors, state.q, ctab, stab)
    return state


def probabilities(state: WalkState) -> np.ndarray:
    """``p(x) = (|amp(x,0)|^2) + (|amp(x,1)|^2)`` with ``|a|^2 = re*re + im*im``."""
    out = np.empty(state.N, dtype=np.float64)
    _kernels.probabilities(state._buf(), out)
    return out
