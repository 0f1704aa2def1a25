"""Command line front end: ``orbitcodes profile | sweep | union | rerun``.

Exit codes: 0 ok, 2 malformed input, 3 precondition (e.g. k > n/2),
4 infeasible sweep, 5 algebraic precondition (shared orbit, mixed stabilizers).
Results go to stdout or ``--out``; every written result gets a
``<out>.manifest.json`` sidecar holding the argv, field and timestamp, so the
result file itself stays byte-identical across reruns.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from . import io as oio
from ._validation import check_basis, check_field_params
from .exceptions import (
    FieldError,
    InfeasibleSearchError,
    MixedStabilizerError,
    PreconditionError,
    SameOrbitError,
)
from .gf_tower import FieldCtx, build_field
from .multiorbit import union_distribution, verify_union_theorem
from .orbit import fraction_set, intersection_distribution, is_sidon, proj_size
from .search import SweepConfig, merge_cases, run_sweep
from .structure import analyze_2dim
from .subspace import subfield_subspace

EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_INFEASIBLE, EXIT_ALGEBRAIC = 0, 2, 3, 4, 5


class InputError(ValueError):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _add_field_args(ap: argparse.ArgumentParser) -> None:
    g = ap.add_argument_group("field")
    g.add_argument("--q", type=int, help="field size q (prime power); alternative to --p/--e")
    g.add_argument("--p", type=int, help="characteristic")
    g.add_argument("--e", type=int, default=1, help="q = p^e (default 1)")
    g.add_argument("--n", type=int, required=True, help="extension degree")
    g.add_argument("--modulus", type=_int_list, help="primitive polynomial over F_p, low degree first")


def _field(args) -> FieldCtx:
    if args.q is not None:
        p, e = check_field_params(args.q, args.n)
        if args.p is not None and (args.p, args.e) != (p, e):
            raise InputError("--q disagrees with --p/--e")
    elif args.p is not None:
        p, e = args.p, args.e
    else:
        raise InputError("give --q or --p")
    return build_field(p, e, args.n, args.modulus)


def _subspace(ctx: FieldCtx, args):
    if args.basis_subfield is not None:
        if ctx.n % args.basis_subfield:
            raise InputError(f"{args.basis_subfield} does not divide n={ctx.n}")
        return subfield_subspace(ctx, args.basis_subfield)
    if args.subspace_json:
        return oio.subspace_from_json(ctx, json.loads(Path(args.subspace_json).read_text()))
    if args.basis is None:
        raise InputError("give --basis, --basis-subfield or --subspace-json")
    return check_basis(ctx, args.basis)


def _emit(text: str, out: str | None, argv: list[str], ctx: FieldCtx, extra: dict) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    oio.write_text(out, text)
    manifest = {
        "command": next((a for a in argv if not a.startswith("-")), ""),
        "argv": argv,
        "field": ctx.spec.to_dict(),
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "outputs": [out],
        **extra,
    }
    oio.write_text(out + ".manifest.json", oio.dumps(manifest))


def cmd_profile(args, argv) -> int:
    ctx = _field(args)
    U = _subspace(ctx, args)
    prof = intersection_distribution(U)
    frac = fraction_set(U)
    data = {
        "field": ctx.spec.to_dict(),
        "subspace": oio.subspace_to_json(U),
        "profile": oio.profile_to_json(prof, frac),
    }
    if prof.t == 1 and U.k >= 3 and prof.ds == 2 * U.k - 4:
        data["analysis"] = analyze_2dim(U, prof).to_dict(ctx)
    if args.json:
        text = oio.dumps(data)
    else:
        lines = [
            f"q={prof.q} n={prof.n} k={prof.k} t={prof.t} orbit size={prof.orbit_size}",
            f"lambda = ({', '.join(map(str, prof.lam))})",
            f"ds = {prof.ds}  f = {frac.f}  Q = {frac.Q}",
        ]
        if "analysis" in data:
            a = data["analysis"]
            lines.append(f"case {a['case']}, r = {a['r']}, lambda2 = {a['lambda2']}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out, argv, ctx, {})
    return EXIT_OK


def cmd_sweep(args, argv) -> int:
    ctx = _field(args)
    config = SweepConfig(
        mode="random" if args.random else "exhaustive",
        sample_count=args.samples,
        seed=args.seed,
        workers=args.workers,
        checkpoint_interval=args.checkpoint_interval,
        checkpoint_path=args.checkpoint,
        max_candidates=args.max_candidates,
    )
    res = run_sweep(ctx.q, ctx.n, args.k, config, ctx=ctx)
    records = res.records
    fmt = "json" if args.out and args.out.endswith(".json") else "csv"
    if args.merged_cases:
        merged = merge_cases(records)
        if fmt == "json":
            size = proj_size(ctx.q, args.k)
            text = oio.dumps([{**m.__dict__, "N_orbits": m.N // size if m.N % size == 0 else None} for m in merged])
        else:
            text = oio.merged_to_csv(merged, proj_size(ctx.q, args.k))
    else:
        text = oio.dumps([rec.row() for rec in records]) if fmt == "json" else oio.records_to_csv(records)
    logging.getLogger(__name__).info(
        "candidates=%d full_length=%d filtered=%d sidon=%d", res.candidates, res.full_length, res.filtered, res.sidon
    )
    extra = {"config": {**config.__dict__, "checkpoint_path": None}, "seed": config.seed,
             "totals": {"candidates": res.candidates, "full_length": res.full_length,
                        "filtered": res.filtered, "sidon": res.sidon}}
    _emit(text, args.out, argv, ctx, extra)
    return EXIT_OK


def cmd_union(args, argv) -> int:
    ctx = _field(args)
    if not args.basis or len(args.basis) < 2:
        sys.stderr.write("union needs at least two --basis inputs; use `profile` for a single orbit\n")
        return EXIT_PARSE
    gens = [check_basis(ctx, b) for b in args.basis]
    code = union_distribution(gens)
    data = code.to_dict()
    if code.t == 1 and all(U.k >= 2 for U in gens) and all(is_sidon(U) for U in gens):
        try:
            rep = verify_union_theorem(gens)
            data["closed_form"] = list(rep.values["closed_form"])
            data["closed_form_match"] = rep.passed
        except PreconditionError as exc:
            data["closed_form_match"] = None
            data["closed_form_note"] = str(exc)
    _emit(oio.dumps(data), args.out, argv, ctx, {})
    return EXIT_OK


def cmd_rerun(args, argv) -> int:
    manifest = json.loads(Path(args.manifest).read_text())
    old = list(manifest["argv"])
    if args.out:
        if "--out" in old:
            old[old.index("--out") + 1] = args.out
        else:
            old += ["--out", args.out]
    return main(old)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="orbitcodes", description="Intersection distributions of cyclic orbit codes.")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true", help="progress on stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    pp = sub.add_parser("profile", help="intersection distribution of one orbit")
    _add_field_args(pp)
    src = pp.add_mutually_exclusive_group()
    src.add_argument("--basis", type=_int_list, help="basis as comma-separated logs of a primitive element")
    src.add_argument("--basis-subfield", type=int, metavar="T", help="use the subfield F_{q^T}")
    src.add_argument("--subspace-json", metavar="FILE", help='JSON {"basis": [...]} or {"coords": [[...]]}')
    pp.add_argument("--json", action="store_true", help="JSON output")
    pp.add_argument("--out", help="write to a file (plus a manifest sidecar)")
    pp.set_defaults(func=cmd_profile)

    sp = sub.add_parser("sweep", help="exhaustive or random (lambda2, r) census")
    _add_field_args(sp)
    sp.add_argument("--k", type=int, required=True)
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true", help="enumerate every subspace through 1 (default)")
    mode.add_argument("--random", action="store_true", help="seeded random sampling")
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--max-candidates", type=int, default=2_000_000)
    sp.add_argument("--checkpoint", help="checkpoint file; an existing one is resumed")
    sp.add_argument("--checkpoint-interval", type=int, default=50_000)
    sp.add_argument("--merged-cases", action="store_true", help="one row per (lambda2, r)")
    sp.add_argument("--out", help="CSV file, or JSON when the name ends in .json")
    sp.set_defaults(func=cmd_sweep)

    up = sub.add_parser("union", help="distribution of a union of orbits")
    _add_field_args(up)
    up.add_argument("--basis", type=_int_list, action="append", help="one generator; repeat for each")
    up.add_argument("--out")
    up.set_defaults(func=cmd_union)

    rp = sub.add_parser("rerun", help="repeat the run recorded in a manifest")
    rp.add_argument("manifest")
    rp.add_argument("--out", help="write to this path instead of the recorded one")
    rp.set_defaults(func=cmd_rerun)
    return ap


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.verbose:
        logging.basicConfig(level=logging.INFO, stream=sys.stderr, format="%(message)s")
    try:
        return args.func(args, argv)
    except (SameOrbitError, MixedStabilizerError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ALGEBRAIC
    except InfeasibleSearchError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INFEASIBLE
    except PreconditionError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PRECONDITION
    except (InputError, FieldError, ValueError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
