"""Statistical evaluation of the hash: sensitivity, diffusion/confusion,
per-location uniformity, byte-collision counts and the birthday bound.

Every trial draws its randomness from a Philox stream keyed by
``(seed, trial_index)``, so results do not depend on how trials are split
across worker processes.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DomainError, EmptyMessage, SizeMismatch
from .hashing import Digest, HashParams, hash_bits, validate_params

DEFAULT_MSG_LEN = 1024
CONDITIONS = ("flip", "delete", "insert")


class TrialRng:
    """Counter-based trial randomness: trial ``i`` uses Philox keyed by ``(seed, i)``."""

    def __init__(self, seed: int):
        if not 0 <= seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        self.seed = int(seed)

    def trial(self, index: int) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=(index << 64) | self.seed))


def random_message(gen: np.random.Generator, nbits: int) -> np.ndarray:
    return gen.integers(0, 2, nbits, dtype=np.uint8)


def mutate(message, condition: str, gen: np.random.Generator) -> np.ndarray:
    """Apply one random flip, deletion or insertion to a bit message."""
    msg = np.asarray(message, dtype=np.uint8)
    if condition not in CONDITIONS:
        raise DomainError(f"condition must be one of {CONDITIONS}, got {condition!r}")
    if condition in ("flip", "delete") and msg.size == 0:
        raise EmptyMessage(f"cannot {condition} a bit of an empty message")
    if condition == "flip":
        out = msg.copy()
        out[gen.integers(msg.size)] ^= 1
        return out
    if condition == "delete":
        return np.delete(msg, gen.integers(msg.size))
    pos = gen.integers(msg.size + 1)
    return np.insert(msg, pos, np.uint8(gen.integers(2)))


def omega(d1: Digest, d2: Digest) -> int:
    """Number of byte positions at which two digests agree."""
    if d1.nbits != d2.nbits:
        raise SizeMismatch("digests have different lengths")
    return sum(a == b for a, b in zip(d1.data, d2.data))


def w_theoretical(T: int, n: int, w: int) -> float:
    """Expected number of draws (out of ``T``) with exactly ``w`` of ``n`` bytes equal."""
    if not 0 <= w <= n:
        raise DomainError(f"omega must lie in [0, {n}], got {w}")
    prob = math.comb(n, w) * Fraction(1, 256) ** w * Fraction(255, 256) ** (n - w)
    return float(T * prob)


def birthday_bound_exact(n_bits: int) -> int:
    if n_bits <= 0 or n_bits % 2:
        raise DomainError(f"digest length must be a positive even number, got {n_bits}")
    return 1 << (n_bits // 2)


def birthday_bound(n_bits: int) -> float:
    """Trials needed for a 1/2 collision chance on an ideal ``n_bits`` hash."""
    return float(birthday_bound_exact(n_bits))


def format_birthday(n_bits: int) -> str:
    """E.g. ``2^128 ≈ 3.4028×10^38``."""
    value = birthday_bound_exact(n_bits)
    mantissa, exponent = f"{value:.4e}".split("e")
    return f"2^{n_bits // 2} ≈ {mantissa}×10^{int(exponent)}"


def _trial_chunk(args):
    params, msg_len, seed, condition, start, stop = args
    rng = TrialRng(seed)
    nb = params.digest_bytes
    diffs = np.empty((stop - start, nb), dtype=np.uint8)
    for row, i in enumerate(range(start, stop)):
        gen = rng.trial(i)
        msg = random_message(gen, msg_len)
        d1 = hash_bits(params, msg)
        d2 = hash_bits(params, mutate(msg, condition, gen))
        diffs[row] = np.frombuffer(d1.data, dtype=np.uint8) ^ np.frombuffer(d2.data, dtype=np.uint8)
    return diffs


@dataclass
class TrialPairs:
    """Raw result of ``T`` (message, mutant) trials: XOR of each digest pair."""

    params: HashParams
    seed: int
    msg_len: int
    condition: str
    xor: np.ndarray  # (T, digest_bytes) uint8

    @property
    def T(self) -> int:
        return self.xor.shape[0]

    def changed_bits(self) -> np.ndarray:
        return np.unpackbits(self.xor, axis=1).sum(axis=1).astype(np.int64)

    def equal_bytes(self) -> np.ndarray:
        return (self.xor == 0).sum(axis=1).astype(np.int64)

    def diffusion(self) -> DiffusionReport:
        return DiffusionReport.from_counts(self.changed_bits(), self.params.digest_bits, self._meta())

    def uniformity(self) -> UniformityReport:
        per_loc = np.unpackbits(self.xor, axis=1).sum(axis=0).astype(np.int64)
        return UniformityReport(T=self.T, per_location=per_loc.tolist(), meta=self._meta())

    def collision(self) -> CollisionReport:
        n = self.params.digest_bytes
        observed = np.bincount(self.equal_bytes(), minlength=n + 1)
        return CollisionReport(
            T=self.T,
            n_bytes=n,
            counts={w: int(observed[w]) for w in range(n + 1)},
            theory={w: w_theoretical(self.T, n, w) for w in range(n + 1)},
            meta=self._meta(),
        )

    def _meta(self) -> dict:
        return {
            "params": self.params.fingerprint(),
            "seed": self.seed,
            "msg_len": self.msg_len,
            "condition": self.condition,
        }


def run_trials(
    params: HashParams,
    T: int,
    msg_len: int = DEFAULT_MSG_LEN,
    seed: int = 0,
    jobs: int = 1,
    condition: str = "flip",
) -> TrialPairs:
    """Hash ``T`` random messages and their mutants (one flip by default)."""
    validate_params(params)
    if T < 1:
        raise DomainError("T must be at least 1")
    if condition not in CONDITIONS:
        raise DomainError(f"condition must be one of {CONDITIONS}, got {condition!r}")
    if msg_len < 1:
        raise DomainError("message length must be at least 1 bit")
    jobs = max(1, min(int(jobs), T))
    if jobs == 1:
        xor = _trial_chunk((params, msg_len, seed, condition, 0, T))
    else:
        bounds = np.linspace(0, T, 4 * jobs + 1).astype(int)
        tasks = [(params, msg_len, seed, condition, int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            xor = np.concatenate(list(pool.map(_trial_chunk, tasks)))
    return TrialPairs(params, seed, msg_len, condition, xor)


@dataclass
class DiffusionReport:
    T: int
    B: list[int]
    b_min: int
    b_max: int
    b_mean: float
    p_mean: float
    delta_b: float
    delta_p: float
    n_bits: int
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_counts(cls, counts, n_bits: int, meta: dict | None = None) -> DiffusionReport:
        B = np.asarray(counts, dtype=np.int64)
        T = B.size
        if T < 2:
            raise DomainError("diffusion statistics need T >= 2")
        mean = float(B.sum()) / T
        p = mean / n_bits
        delta_b = math.sqrt(float(np.sum((B - mean) ** 2)) / (T - 1))
        delta_p = math.sqrt(float(np.sum((B / n_bits - p) ** 2)) / (T - 1)) * 100
        return cls(
            T=T,
            B=B.tolist(),
            b_min=int(B.min()),
            b_max=int(B.max()),
            b_mean=mean,
            p_mean=p * 100,
            delta_b=delta_b,
            delta_p=delta_p,
            n_bits=n_bits,
            meta=meta or {},
        )

    def to_dict(self, verbose: bool = False) -> dict:
        out = {
            "test": "diffusion",
            "T": self.T,
            "n_bits": self.n_bits,
            "b_mean": self.b_mean,
            "p_mean_percent": self.p_mean,
            "delta_b": self.delta_b,
            "delta_p_percent": self.delta_p,
            "b_min": self.b_min,
            "b_max": self.b_max,
            **self.meta,
        }
        if verbose:
            out["B"] = self.B
        return out


@dataclass
class UniformityReport:
    T: int
    per_location: list[int]
    meta: dict = field(default_factory=dict)

    @property
    def mean_count(self) -> float:
        return sum(self.per_location) / len(self.per_location)

    def to_dict(self, verbose: bool = False) -> dict:
        out = {
            "test": "uniformity",
            "T": self.T,
            "n_bits": len(self.per_location),
            "mean_count": self.mean_count,
            "min_count": min(self.per_location),
            "max_count": max(self.per_location),
            **self.meta,
        }
        if verbose:
            out["per_location"] = self.per_location
        return out


@dataclass
class CollisionReport:
    T: int
    n_bytes: int
    counts: dict[int, int]
    theory: dict[int, float]
    meta: dict = field(default_factory=dict)

    def to_dict(self, verbose: bool = False) -> dict:
        # Tail entries with nothing observed or expected are noise in the report.
        shown = [w for w in range(self.n_bytes + 1) if verbose or self.counts[w] or self.theory[w] >= 0.005]
        return {
            "test": "collision",
            "T": self.T,
            "n_bytes": self.n_bytes,
            "observed": {str(w): self.counts[w] for w in shown},
            "theory": {str(w): round(self.theory[w], 2) for w in shown},
            **self.meta,
        }


def diffusion_confusion(params, T, msg_len_bits=DEFAULT_MSG_LEN, seed=0, jobs=1) -> DiffusionReport:
    return run_trials(params, T, msg_len_bits, seed, jobs).diffusion()


def uniformity(params, T, msg_len_bits=DEFAULT_MSG_LEN, seed=0, jobs=1) -> UniformityReport:
    return run_trials(params, T, msg_len_bits, seed, jobs).uniformity()


def collision_test(params, T, msg_len_bits=DEFAULT_MSG_LEN, seed=0, jobs=1) -> CollisionReport:
    return run_trials(params, T, msg_len_bits, seed, jobs).collision()


@dataclass
class SensitivityReport:
    """Digests of an original message and of its flip/delete/insert mutants."""

    digests: dict[str, Digest]
    distances: dict[str, int]
    meta: dict = field(default_factory=dict)

    def to_dict(self, verbose: bool = False) -> dict:
        return {
            "test": "sensitivity",
            "digests": {name: d.hex() for name, d in self.digests.items()},
            "changed_bits_vs_original": self.distances,
            **self.meta,
        }


def sensitivity_report(params: HashParams, message, gen: np.random.Generator) -> SensitivityReport:
    msg = np.asarray(message, dtype=np.uint8)
    if msg.size == 0:
        raise EmptyMessage("sensitivity test needs a nonempty message")
    digests = {"original": hash_bits(params, msg)}
    for cond in CONDITIONS:
        digests[cond] = hash_bits(params, mutate(msg, cond, gen))
    distances = {cond: digests["original"].hamming(digests[cond]) for cond in CONDITIONS}
    return SensitivityReport(digests, distances, {"params": params.fingerprint(), "msg_len": int(msg.size)})


def run_sensitivity(params: HashParams, msg_len: int = DEFAULT_MSG_LEN, seed: int = 0) -> SensitivityReport:
    gen = TrialRng(seed).trial(0)
    report = sensitivity_report(params, random_message(gen, msg_len), gen)
    report.meta["seed"] = seed
    return report


@dataclass(frozen=True)
class Bands:
    """Pass bands for the statistical tests.

    Calibrated for a 256-bit digest at ``T = 10000`` and rescaled by the
    binomial standard errors for other sizes, so the z-thresholds stay fixed.
    """

    b_mean: tuple[float, float]
    p_mean: tuple[float, float]
    delta_b: tuple[float, float]
    b_min: float
    b_max: float
    omega0_tol: float
    location: tuple[float, float]
    location_mean: tuple[float, float]

    @classmethod
    def for_size(cls, n_bits: int, T: int) -> Bands:
        rs = math.sqrt(10000 / T)
        rn = math.sqrt(n_bits / 256)
        half = n_bits / 2
        sd = math.sqrt(n_bits) / 2
        mean_tol = 1.0 * rn * rs
        p_tol = 0.4 / rn * rs
        sd_tol = 0.7 * rn * rs
        tail = 38 * rn * math.sqrt(math.log(max(T, 2)) / math.log(10000))
        n_bytes = n_bits // 8
        p0 = (255 / 256) ** n_bytes
        p0_ref = (255 / 256) ** 32
        omega_tol = 100 * math.sqrt(T * p0 * (1 - p0) / (10000 * p0_ref * (1 - p0_ref)))
        loc_tol = 300 / rs
        loc_mean_tol = 50 / rs / rn
        return cls(
            b_mean=(half - mean_tol, half + mean_tol),
            p_mean=(50 - p_tol, 50 + p_tol),
            delta_b=(sd - sd_tol, sd + sd_tol),
            b_min=half - tail,
            b_max=half + tail,
            omega0_tol=omega_tol,
            location=(T / 2 - loc_tol, T / 2 + loc_tol),
            location_mean=(T / 2 - loc_mean_tol, T / 2 + loc_mean_tol),
        )


def check_diffusion(rep: DiffusionReport, bands: Bands) -> list[str]:
    fails = []
    for name in ("b_mean", "p_mean", "delta_b"):
        lo, hi = getattr(bands, name)
        value = getattr(rep, name)
        if not lo <= value <= hi:
            fails.append(f"{name} = {value:.4f} outside [{lo:.4f}, {hi:.4f}]")
    if rep.b_min < bands.b_min:
        fails.append(f"b_min = {rep.b_min} below {bands.b_min:.2f}")
    if rep.b_max > bands.b_max:
        fails.append(f"b_max = {rep.b_max} above {bands.b_max:.2f}")
    return fails


def check_collision(rep: CollisionReport, bands: Bands) -> list[str]:
    fails = []
    dev = abs(rep.counts[0] - rep.theory[0])
    if dev > bands.omega0_tol:
        fails.append(f"omega=0 count {rep.counts[0]} deviates {dev:.2f} from {rep.theory[0]:.2f}")
    tail = sum(c for w, c in rep.counts.items() if w >= 5)
    if tail:
        fails.append(f"{tail} draws with omega >= 5")
    return fails


def check_uniformity(rep: UniformityReport, bands: Bands) -> list[str]:
    fails = []
    lo, hi = bands.location
    bad = [i for i, c in enumerate(rep.per_location) if not lo <= c <= hi]
    if bad:
        fails.append(f"{len(bad)} locations outside [{lo:.0f}, {hi:.0f}]")
    lo, hi = bands.location_mean
    if not lo <= rep.mean_count <= hi:
        fails.append(f"mean count {rep.mean_count:.2f} outside [{lo:.2f}, {hi:.2f}]")
    return fails
