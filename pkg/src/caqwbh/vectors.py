"""Golden test vectors: generate a fixed message corpus and verify digests bit-exactly."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .hashing import HashParams, hash_bits, validate_params

FORMAT = "caqwbh-vectors/1"


@dataclass(frozen=True)
class TestVector:
    name: str
    nbits: int
    message: str  # hex of the MSB-first packed bits, zero padded
    digest: str

    __test__ = False  # keep pytest from collecting this class

    def bits(self) -> np.ndarray:
        packed = np.frombuffer(bytes.fromhex(self.message), dtype=np.uint8)
        return np.unpackbits(packed)[: self.nbits]


def pack_message(bits: np.ndarray) -> str:
    return np.packbits(bits).tobytes().hex()


def corpus(n: int) -> list[tuple[str, np.ndarray]]:
    """Named messages covering empty, sub-block, aligned and padded lengths for block width ``n``."""
    # A fixed xorshift keeps the corpus independent of numpy's RNG algorithms.
    state = 0x9E3779B97F4A7C15

    def pseudo(nbits):
        nonlocal state
        out = np.empty(nbits, dtype=np.uint8)
        for i in range(nbits):
            state ^= (state << 13) & 0xFFFFFFFFFFFFFFFF
            state ^= state >> 7
            state ^= (state << 17) & 0xFFFFFFFFFFFFFFFF
            out[i] = state >> 63
        return out

    def text(s):
        return np.unpackbits(np.frombuffer(s.encode(), dtype=np.uint8))

    items = [
        ("empty", np.empty(0, dtype=np.uint8)),
        ("bit-0", np.array([0], dtype=np.uint8)),
        ("bit-1", np.array([1], dtype=np.uint8)),
        ("bits-101", np.array([1, 0, 1], dtype=np.uint8)),
        ("sub-block-7", pseudo(7)),
        ("block-minus-1", pseudo(n - 1)),
        ("block-zeros", np.zeros(n, dtype=np.uint8)),
        ("block-ones", np.ones(n, dtype=np.uint8)),
        ("block-alternating", np.arange(n, dtype=np.uint8) & 1),
        ("block-random", pseudo(n)),
        ("block-plus-1", pseudo(n + 1)),
        ("two-blocks-minus-1", pseudo(2 * n - 1)),
        ("two-blocks", pseudo(2 * n)),
        ("two-blocks-plus-5", pseudo(2 * n + 5)),
        ("four-blocks-plus-3", pseudo(4 * n + 3)),
        ("ascii-abc", text("abc")),
        ("ascii-fox", text("The quick brown fox jumps over the lazy dog")),
        ("random-1000", pseudo(1000)),
        ("random-1024", pseudo(1024)),
        ("random-4099", pseudo(4099)),
        ("zeros-1024", np.zeros(1024, dtype=np.uint8)),
        ("single-one-at-end", np.concatenate([np.zeros(3 * n - 1, dtype=np.uint8), [1]]).astype(np.uint8)),
    ]
    return items


def generate(params: HashParams) -> list[TestVector]:
    validate_params(params)
    return [
        TestVector(name, int(bits.size), pack_message(bits), hash_bits(params, bits).hex())
        for name, bits in corpus(params.N)
    ]


def write(path, params: HashParams, vectors: list[TestVector]) -> None:
    doc = {
        "format": FORMAT,
        "params": params.fingerprint(),
        "vectors": [
            {"name": v.name, "bits": v.nbits, "message": v.message, "digest": v.digest} for v in vectors
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def read(path) -> tuple[HashParams, list[TestVector]]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("format") != FORMAT:
        raise ValueError(f"{path}: not a {FORMAT} file")
    p = doc["params"]
    alpha = None
    if "alpha" in p:
        alpha = tuple(complex(float(re), float(im)) for re, im in p["alpha"])
    params = HashParams(int(p["q"]), int(p["k"]), float(p["theta1"]), float(p["theta2"]), alpha)
    vectors = [TestVector(v["name"], int(v["bits"]), v["message"], v["digest"].lower()) for v in doc["vectors"]]
    return params, vectors


def verify(params: HashParams, vectors: list[TestVector]) -> list[tuple[TestVector, str]]:
    """Recompute every vector; return ``(vector, actual_hex)`` for each mismatch."""
    bad = []
    for v in vectors:
        actual = hash_bits(params, v.bits()).hex()
        if actual != v.digest:
            bad.append((v, actual))
    return bad
