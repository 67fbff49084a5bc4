"""Compare the compiled and numpy walk kernels.

    python benchmarks/bench_kernels.py [--hashes 2000] [--steps 2000]

Reports walk steps per second for q = 5 and 6 and end-to-end 1024-bit hashes
per second, and checks that both backends return identical digests.
"""

import argparse
import time

import numpy as np

from caqwbh import walk
from caqwbh.hashing import HashParams, hash_bits


def bench_steps(mod, q, nsteps, ctab, stab):
    blocks = np.random.default_rng(0).integers(0, 2, nsteps << q).astype(np.uint8)
    state = walk.WalkState(q)
    start = time.perf_counter()
    mod.evolve(state._buf(), blocks, q, ctab, stab)
    return nsteps / (time.perf_counter() - start), state.amplitudes.tobytes()


def bench_hashes(mod, params, messages):
    saved = walk._kernels
    walk._kernels = mod
    try:
        start = time.perf_counter()
        digests = [hash_bits(params, m).hex() for m in messages]
        return len(messages) / (time.perf_counter() - start), digests
    finally:
        walk._kernels = saved


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--hashes", type=int, default=2000)
    parser.add_argument("--steps", type=int, default=2000)
    args = parser.parse_args()

    backends = walk.available_backends()
    params = HashParams.instance("caqwbh-256")
    coin0, coin1 = walk.make_coin(params.theta1), walk.make_coin(params.theta2)
    ctab, stab = walk.coin_tables(coin0, coin1)
    rng = np.random.default_rng(1)
    messages = [rng.integers(0, 2, 1024).astype(np.uint8) for _ in range(args.hashes)]

    print(f"backends: {', '.join(sorted(backends))}")
    results = {}
    for name, mod in sorted(backends.items()):
        row = {}
        for q in (5, 6):
            row[f"steps/s q={q}"], _ = bench_steps(mod, q, args.steps, ctab, stab)
        row["hashes/s"], digests = bench_hashes(mod, params, messages)
        results[name] = (row, digests)
        cells = "  ".join(f"{k}: {v:12,.0f}" for k, v in row.items())
        print(f"{name:>7}  {cells}")

    if len(results) == 2:
        (crow, cdig), (prow, pdig) = results["c"], results["python"]
        print(f"speedup (hashes): {crow['hashes/s'] / prow['hashes/s']:.1f}x")
        print("digests identical:", cdig == pdig)


if __name__ == "__main__":
    main()
