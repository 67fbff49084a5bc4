"""Command-line interface.

Exit codes: 0 success, 1 I/O failure, 2 invalid parameters or arguments,
3 statistical assertion failure, 4 golden-vector mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import keyed, stats, vectors
from .errors import CaqwbhError
from .hashing import INSTANCES, HashContext, HashParams, validate_params

EXIT_IO = 1
EXIT_PARAMS = 2
EXIT_ASSERT = 3
EXIT_VECTORS = 4


class ParamError(Exception):
    pass


def _parse_float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a decimal number: {text!r}") from None


def _params_from_args(args) -> HashParams:
    base = HashParams.instance("caqwbh-256" if args.instance == "custom" else args.instance)
    q = base.q if args.q is None else args.q
    k = base.k if args.k is None else args.k
    theta1 = base.theta1 if args.theta1 is None else args.theta1
    theta2 = base.theta2 if args.theta2 is None else args.theta2
    alpha = keyed.load_alpha(args.alpha_file) if args.alpha_file else None
    return validate_params(HashParams(q, k, theta1, theta2, alpha))


def _emit(doc: dict, out=None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_digest(digest, params, fmt, label=None):
    if fmt == "raw":
        sys.stdout.buffer.write(digest.data)
        sys.stdout.buffer.flush()
    elif fmt == "report":
        doc = {"params": params.fingerprint(), "digest": digest.hex(), "bits": digest.nbits}
        if label:
            doc["input"] = label
        _emit(doc)
    else:
        sys.stdout.write(digest.hex() + (f"  {label}\n" if label else "\n"))


def _inputs(files):
    if not files or files == ["-"]:
        yield None, sys.stdin.buffer
        return
    for name in files:
        with open(name, "rb") as fh:
            yield name, fh


def _digest_stream(ctx: HashContext, fh):
    while chunk := fh.read(1 << 16):
        ctx.update(chunk)
    return ctx.finalize()


def cmd_hash(args) -> int:
    params = _params_from_args(args)
    multi = len(args.files) > 1
    for name, fh in _inputs(args.files):
        digest = _digest_stream(HashContext(params), fh)
        _write_digest(digest, params, args.format, name if multi else None)
    return 0


def cmd_mac(args) -> int:
    params, key = keyed.load_key(args.key_file)
    for name, fh in _inputs(args.files):
        tag = keyed.mac_bytes(params, key, fh.read())
        _write_digest(tag, params, args.format, name if len(args.files) > 1 else None)
    return 0


def cmd_keygen(args) -> int:
    params = _params_from_args(args)
    rng = stats.TrialRng(args.seed).trial(0)
    key = keyed.MacKey.generate(params, rng, args.key2_bits)
    keyed.save_key(args.output, params, key)
    return 0


def cmd_prng(args) -> int:
    params = _params_from_args(args)
    if args.init_hex:
        bits = np.unpackbits(np.frombuffer(bytes.fromhex(args.init_hex), dtype=np.uint8))[: params.N]
    else:
        bits = stats.TrialRng(args.seed).trial(0).integers(0, 2, params.N, dtype=np.uint8)
    if bits.size != params.N:
        raise ParamError(f"--init-hex must supply at least {params.N} bits")
    alpha = params.alpha_vector()
    gen = keyed.prng_seed(params, alpha, bits)
    nbits = params.digest_bits if args.nbits is None else args.nbits
    out = gen.fill(nbits)
    if args.format == "raw":
        sys.stdout.buffer.write(np.packbits(out).tobytes())
    elif args.format == "report":
        _emit({"params": params.fingerprint(), "seed": args.seed, "nbits": nbits, "bits_hex": np.packbits(out).tobytes().hex()})
    else:
        sys.stdout.write(np.packbits(out).tobytes().hex() + "\n")
    return 0


def cmd_test(args) -> int:
    params = _params_from_args(args)
    bands = stats.Bands.for_size(params.digest_bits, args.T)
    fails: list[str] = []
    if args.name == "sensitivity":
        rep = stats.run_sensitivity(params, args.msg_len, args.seed)
        floor = params.digest_bits // 4
        fails = [f"{c}: only {d} bits changed" for c, d in rep.distances.items() if d < floor]
    elif args.name == "birthday":
        exact = stats.birthday_bound_exact(params.digest_bits)
        rep_doc = {
            "test": "birthday",
            "n_bits": params.digest_bits,
            "trials": str(exact),
            "approx": f"{float(exact):.4e}",
            "text": stats.format_birthday(params.digest_bits),
        }
        _emit(rep_doc, args.output)
        return 0
    else:
        if args.T < 2 and args.name == "diffusion":
            raise ParamError("diffusion needs -T >= 2")
        pairs = stats.run_trials(params, args.T, args.msg_len, args.seed, args.jobs)
        if args.name == "diffusion":
            rep = pairs.diffusion()
            fails = stats.check_diffusion(rep, bands)
        elif args.name == "uniformity":
            rep = pairs.uniformity()
            fails = stats.check_uniformity(rep, bands)
        else:
            rep = pairs.collision()
            fails = stats.check_collision(rep, bands)
    doc = rep.to_dict(verbose=args.verbose)
    if args.assert_bands:
        doc["assert"] = {"passed": not fails, "failures": fails}
    _emit(doc, args.output)
    if args.assert_bands and fails:
        for f in fails:
            print(f"assertion failed: {f}", file=sys.stderr)
        return EXIT_ASSERT
    return 0


def cmd_vectors(args) -> int:
    if args.action == "generate":
        params = _params_from_args(args)
        vectors.write(args.path, params, vectors.generate(params))
        return 0
    params, vecs = vectors.read(args.path)
    bad = vectors.verify(params, vecs)
    for v, actual in bad:
        print(f"mismatch {v.name}: expected {v.digest} got {actual}", file=sys.stderr)
    if bad:
        return EXIT_VECTORS
    if args.verbose:
        print(f"{len(vecs)} vectors verified")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("instance")
    g.add_argument("--instance", default="caqwbh-256", choices=sorted(INSTANCES) + ["custom"])
    g.add_argument("--q", type=int, help="position bits (N = 2**q)")
    g.add_argument("--k", type=int, help="digest bits per position")
    g.add_argument("--theta1", type=_parse_float, help="coin angle for control bit 0 (radians)")
    g.add_argument("--theta2", type=_parse_float, help="coin angle for control bit 1 (radians)")
    g.add_argument("--alpha-file", help="key file whose key1 amplitudes give the initial state")
    g.add_argument("--format", default="hex", choices=["hex", "raw", "report"])
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--jobs", type=int, default=1, help="worker processes for statistical tests")

    parser = argparse.ArgumentParser(prog="caqwbh", description="Quantum-walk block hash toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hash", parents=[common], help="hash files or stdin")
    p.add_argument("files", nargs="*")
    p.set_defaults(func=cmd_hash)

    p = sub.add_parser("mac", parents=[common], help="authenticate files or stdin")
    p.add_argument("--key-file", required=True)
    p.add_argument("files", nargs="*")
    p.set_defaults(func=cmd_mac)

    p = sub.add_parser("keygen", parents=[common], help="write a random MAC key file")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--key2-bits", type=int)
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("prng", parents=[common], help="pseudo-random bits")
    p.add_argument("--nbits", type=int)
    p.add_argument("--init-hex", help="first control block as hex (default: derived from --seed)")
    p.set_defaults(func=cmd_prng)

    p = sub.add_parser("test", parents=[common], help="run a statistical test")
    p.add_argument("name", choices=["sensitivity", "diffusion", "uniformity", "collision", "birthday"])
    p.add_argument("-T", type=int, default=10000, help="number of trials")
    p.add_argument("--msg-len", type=int, default=stats.DEFAULT_MSG_LEN, help="message length in bits")
    p.add_argument("--assert", dest="assert_bands", action="store_true", help="exit 3 outside the pass bands")
    p.add_argument("--verbose", action="store_true", help="include raw per-trial arrays")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("vectors", parents=[common], help="generate or verify golden vectors")
    p.add_argument("action", choices=["generate", "verify"])
    p.add_argument("path")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_vectors)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CaqwbhError, ParamError) as exc:
        print(f"caqwbh: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except OSError as exc:
        print(f"caqwbh: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"caqwbh: {exc}", file=sys.stderr)
        return EXIT_PARAMS


if __name__ == "__main__":
    sys.exit(main())
