"""Command-line interface.

Exit codes: 0 success / certified, 1 certification failed (or an internal
contradiction surfaced by ``replay --corrupt``), 2 usage or configuration error.

Seeded sampling uses numpy's PCG64 bit generator (``numpy.random.PCG64(seed)``)
so runs with equal seeds are reproducible byte for byte.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .algebra import FDModule, build_algebra, radical, save_structure, trivial_character
from .diagrams import DEFAULT_CAPS, Family
from .exact_linalg import identity, parse_rat, rat_str
from .fi import GROUP_CAP, build_fi_Mm, fi_certificate, mu
from .stability import build_Mm, ca_hom, certify_tower
from .tower import (
    HypothesisError,
    InternalContradiction,
    Tower,
    full_submodule,
    proof_replay,
    sample_submodule,
)


class UsageError(Exception):
    pass


def _family(value: str) -> Family:
    try:
        return Family.parse(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _delta(value: str):
    try:
        return parse_rat(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_tower_args(p: argparse.ArgumentParser, need_m: bool = True) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--family", type=_family, help="tl | brauer | partition")
    src.add_argument("--fi", action="store_true", help="use the FI group-algebra tower")
    p.add_argument("--delta", type=_delta, default=None, help="loop parameter p/q")
    if need_m:
        p.add_argument("--m", type=int, required=True)
    p.add_argument("--T", type=int, required=True)


def _add_output_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--out", type=Path, default=None, help="write output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="noethertower", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("algebra", help="dimension and radical of one diagram algebra")
    p.add_argument("--family", type=_family, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=_delta, required=True)
    p.add_argument("--dump-table", type=Path, default=None,
                   help="also write the structure-table cache file")
    _add_output_args(p)

    p = sub.add_parser("certify", help="certificate of the noetherian hypotheses for M(m)")
    _add_tower_args(p)
    _add_output_args(p)

    p = sub.add_parser("replay", help="replay the chain argument on a sampled submodule")
    _add_tower_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--full", action="store_true", help="use N = M instead of sampling")
    p.add_argument("--corrupt", action="store_true", help=argparse.SUPPRESS)
    _add_output_args(p)

    p = sub.add_parser("fi-orbits", help="orbit tables of the maps mu_{m,j}")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--T", type=int, required=True)
    _add_output_args(p)

    p = sub.add_parser("stab-hom", help="dimensions of C_A(i, j) for 0 <= i, j <= T")
    p.add_argument("--family", type=_family, required=True)
    p.add_argument("--delta", type=_delta, required=True)
    p.add_argument("--T", type=int, required=True)
    _add_output_args(p)
    return parser


def _check_caps(args) -> None:
    T = args.T
    if T < 0 or getattr(args, "m", 0) < 0:
        raise UsageError("levels must be nonnegative")
    if getattr(args, "m", None) is not None and args.m > T:
        raise UsageError("need m <= T")
    if getattr(args, "fi", False):
        if T > GROUP_CAP:
            raise UsageError(f"FI towers are capped at T <= {GROUP_CAP}")
        return
    if args.delta is None:
        raise UsageError("--delta is required with --family")
    cap = DEFAULT_CAPS[args.family]
    if T > cap:
        raise UsageError(f"{args.family.value} is capped at n <= {cap}")


def _emit(args, payload: dict, text: str) -> None:
    out = json.dumps(payload, indent=2) + "\n" if args.format == "json" else text + "\n"
    if args.out is not None:
        args.out.write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)


# -- commands -------------------------------------------------------------------------

def cmd_algebra(args) -> int:
    cap = DEFAULT_CAPS[args.family]
    if not 0 <= args.n <= cap:
        raise UsageError(f"{args.family.value} n must lie in 0..{cap}")
    A = build_algebra(args.family, args.n, args.delta)
    rad = radical(A).dim
    payload = {
        "family": args.family.value,
        "n": args.n,
        "delta": rat_str(args.delta),
        "dim": A.dim,
        "radical_dim": rad,
        "semisimple": rad == 0,
        "generators": [A.label(g) for g in A.generators],
    }
    if args.dump_table is not None:
        save_structure(A, args.dump_table)
    text = (f"{args.family.value}_{args.n}(delta={rat_str(args.delta)}): dim {A.dim}, "
            f"radical dim {rad}, semisimple {'yes' if rad == 0 else 'no'}")
    _emit(args, payload, text)
    return 0


def _tower(args) -> tuple[Tower, str, str | None]:
    if args.fi:
        return build_fi_Mm(args.m, args.T), "fi", None
    return (build_Mm(args.family, args.delta, args.m, args.T), args.family.value,
            rat_str(args.delta))


def _certificate(args):
    if args.fi:
        return fi_certificate(args.m, args.T)
    M, family, delta = _tower(args)
    return certify_tower(M, family, delta)


def _certificate_text(cert) -> str:
    lines = [f"{cert.family} delta={cert.delta} m={cert.m} T={cert.T}",
             "  i  dim A  rad  dim M  dim F'  nu' bijective"]
    for r in cert.levels:
        lines.append(f"{r['i']:>3} {r['algebra_dim']:>6} {r['radical_dim']:>4} {r['level_dim']:>6}"
                     f" {r['Fprime_dim']:>7}  {'yes' if r['nu_bijective'] else 'no'}")
    lines.append(f"stabilization d = {cert.stabilization_d}; status: {cert.status}")
    return "\n".join(lines)


def cmd_certify(args) -> int:
    _check_caps(args)
    cert = _certificate(args)
    _emit(args, cert.to_json(), _certificate_text(cert))
    return 0 if cert.certified else 1


def _corrupted(M: Tower, d: int) -> Tower:
    """Replace every level above ``d`` by the trivial action ``b -> eps(b) 1``."""
    levels = list(M.levels)
    for i in range(d + 1, M.T + 1):
        A, dim = M.algebras[i], M.dims[i]
        eps = trivial_character(A)
        levels[i] = FDModule(A, dim, lambda b, eps=eps, dim=dim: eps(b) * identity(dim),
                             name="corrupted")
    return Tower(M.algebras, levels, M.shifts, m=M.m, restrictions=M.restrictions, meta=M.meta)


def cmd_replay(args) -> int:
    _check_caps(args)
    M, family, delta = _tower(args)
    cert = certify_tower(M, family, delta)
    payload = {"family": family, "delta": delta, "m": args.m, "T": args.T, "seed": args.seed}
    if cert.stabilization_d is None:
        payload["error"] = "hypotheses fail at the last level; nothing to replay"
        _emit(args, payload, payload["error"])
        return 1
    d = cert.stabilization_d
    if args.corrupt:
        M = _corrupted(M, d)
    rng = np.random.Generator(np.random.PCG64(args.seed))
    N = full_submodule(M) if args.full else sample_submodule(M, rng)
    payload["submodule_dims"] = N.dims
    try:
        report = proof_replay(M, N, d, check_hypotheses=not args.corrupt)
    except InternalContradiction as exc:
        payload["error"] = "internal-contradiction"
        payload["message"] = str(exc)
        _emit(args, payload, f"internal contradiction: {exc}")
        print(f"noethertower: internal contradiction: {exc}", file=sys.stderr)
        return 1
    report.seed = None if args.full else args.seed
    payload["report"] = report.to_json()
    text = (f"d={report.d} chain={report.ell} dims={report.dims} bound={report.bound} "
            f"halted: {report.halted_reason}")
    _emit(args, payload, text)
    return 0


def cmd_fi_orbits(args) -> int:
    if not 0 <= args.m <= args.T or args.T > GROUP_CAP + 1:
        raise UsageError(f"need 0 <= m <= T <= {GROUP_CAP + 1}")
    maps = [mu(args.m, j) for j in range(args.m, args.T)]
    payload = {"m": args.m, "T": args.T, "maps": [mp.to_json() for mp in maps]}
    lines = ["  j  orbits(j)  orbits(j+1)  bijective"]
    for mp in maps:
        lines.append(f"{mp.j:>3} {len(mp.source):>10} {len(mp.target):>12}  "
                     f"{'yes' if mp.bijective else 'no'}")
    _emit(args, payload, "\n".join(lines))
    return 0


def cmd_stab_hom(args) -> int:
    cap = DEFAULT_CAPS[args.family]
    if not 0 <= args.T <= cap:
        raise UsageError(f"{args.family.value} T must lie in 0..{cap}")
    dims = [[ca_hom(args.family, args.delta, i, j).dim for j in range(args.T + 1)]
            for i in range(args.T + 1)]
    payload = {"family": args.family.value, "delta": rat_str(args.delta), "T": args.T,
               "dims": dims}
    lines = ["i\\j " + " ".join(f"{j:>5}" for j in range(args.T + 1))]
    for i, row in enumerate(dims):
        lines.append(f"{i:>3} " + " ".join(f"{x:>5}" for x in row))
    _emit(args, payload, "\n".join(lines))
    return 0


COMMANDS = {
    "algebra": cmd_algebra,
    "certify": cmd_certify,
    "replay": cmd_replay,
    "fi-orbits": cmd_fi_orbits,
    "stab-hom": cmd_stab_hom,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValueError, HypothesisError) as exc:
        print(f"noethertower: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
