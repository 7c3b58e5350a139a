"""Command-line front end.

Artifacts (tables, spectra, certificates) go to stdout so subcommands can be
piped; human-readable summaries go to stderr.  ``--report PATH`` writes a
deterministic JSON run report (sorted keys, no wall-clock fields), so
identical invocations produce byte-identical reports.  Exit codes: 2 usage,
3 cap exceeded, 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
import traceback

from . import families, fileio, regularize, verify
from .errors import CapExceeded, F2RegError
from .scalars import format_rational, parse_rational
from .spectrum import FunctionTable, is_regular, wht

REPORT_SCHEMA = "f2reg-report/1"


def _read_table(path: str) -> tuple[FunctionTable, str]:
    text = sys.stdin.read() if path == "-" else open(path).read()
    return fileio.load_table(text), fileio.content_hash(text)


def _emit_report(args, payload: dict) -> None:
    payload = dict(payload)
    payload.pop("elapsed_s", None)
    payload["schema"] = REPORT_SCHEMA
    blob = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if getattr(args, "report", None):
        with open(args.report, "w") as fh:
            fh.write(blob)
    else:
        sys.stderr.write(blob)


def _cmd_spectrum(args) -> int:
    table, digest = _read_table(args.table)
    spec = wht(table)
    sys.stdout.write(fileio.dump_spectrum(spec))
    payload = {"command": "spectrum", "input_sha256": digest, "n": table.n,
               "degree": spec.degree()}
    if args.delta is not None:
        if table.scalar == "float" and args.scalar != "float":
            raise argparse.ArgumentTypeError(
                "regularity decisions on float tables need --scalar float")
        delta = parse_rational(args.delta)
        res = is_regular(spec, delta)
        payload["delta"] = format_rational(delta)
        payload["regular"] = res.regular
        payload["witness"] = None if res.witness is None else res.witness
        payload["max_nontrivial"] = str(res.magnitude)
    _emit_report(args, payload)
    return 0


def _cmd_family(args) -> int:
    name = args.name
    if name == "maj":
        table = families.majority(args.n)
    elif name == "mos":
        table = families.mean_of_signs(args.n)
    elif name == "homog":
        table = families.random_homogeneous(args.n, args.d, args.seed)
    elif name == "pkc":
        table = families.pkc_compose(args.k)
    elif name == "granular":
        table = families.random_granular(args.n, args.d, parse_rational(args.g), args.seed)
    else:
        raise argparse.ArgumentTypeError(f"unknown family {name!r}")
    text = fileio.dump_table(table)
    sys.stdout.write(text)
    _emit_report(args, {"command": "family", "name": name,
                        "seed": getattr(args, "seed", None),
                        "output_sha256": fileio.content_hash(text)})
    return 0


def _cmd_regularize(args) -> int:
    table, digest = _read_table(args.table)
    delta = parse_rational(args.delta)
    payload = {"command": "regularize", "algo": args.algo,
               "input_sha256": digest, "delta": format_rational(delta),
               "seed": args.seed}
    if args.algo == "greedy":
        res = regularize.greedy_regularize(table, delta)
        cert = res.certificate(delta)
        sys.stdout.write(fileio.dump_certificate(cert))
        payload.update(res.report())
        payload["certificate"] = json.loads(fileio.dump_certificate(cert))
    elif args.algo == "partition":
        res = regularize.partition_regularize(table, delta)
        payload.update(res.report())
    elif args.algo == "degree-d":
        if args.degree is None:
            raise argparse.ArgumentTypeError("--degree is required for degree-d")
        res = regularize.regularize_bounded_degree(table, args.degree, delta)
        sys.stdout.write(fileio.dump_certificate(res.certificate))
        payload.update(res.report())
        payload["certificate"] = json.loads(fileio.dump_certificate(res.certificate))
    elif args.algo == "exact":
        out = regularize.exact_regularity_number(table, delta, args.max_codim)
        if out is None:
            payload["found"] = False
        else:
            codim, u = out
            payload.update({"found": True, "codim": codim, "subspace": u.to_text()})
            sys.stderr.write(f"r(f, {format_rational(delta)}) = {codim}\n")
    else:
        raise argparse.ArgumentTypeError(f"unknown algorithm {args.algo!r}")
    _emit_report(args, payload)
    return 0


def _cmd_paritykill(args) -> int:
    table, digest = _read_table(args.table)
    out = regularize.parity_kill(table, args.max_codim)
    payload = {"command": "paritykill", "input_sha256": digest,
               "found": out is not None, "paritykill": out}
    sys.stdout.write(f"{out}\n" if out is not None else "not-found-below-cap\n")
    _emit_report(args, payload)
    return 0


def _cmd_verify(args) -> int:
    claim = args.claim
    if claim == "degree-one-lb":
        rep = verify.check_degree_one_lb(args.n, parse_rational(args.delta), args.max_codim)
    elif claim == "majority-lb":
        rep = verify.check_majority_lb(args.n, parse_rational(args.delta), args.max_codim)
    elif claim == "homog-lb":
        rep = verify.check_random_homogeneous_lb(
            args.n, args.d, parse_rational(args.delta), args.seed, mode=args.mode)
    elif claim == "composition":
        f_table, _ = _read_table(args.outer)
        g_table, _ = _read_table(args.inner)
        rep = verify.check_composition_theorem(f_table, g_table)
    elif claim == "extractor":
        table, _ = _read_table(args.table)
        delta = None if args.delta is None else parse_rational(args.delta)
        rep = verify.check_extractor_implies_regular(table, args.k, delta)
    elif claim == "granular-disperser":
        table, _ = _read_table(args.table)
        rep = verify.check_granular_disperser(table, args.d, parse_rational(args.g))
    else:
        raise argparse.ArgumentTypeError(f"unknown claim {claim!r}")
    elapsed = rep.get("elapsed_s")
    if elapsed is not None:
        sys.stderr.write(f"elapsed: {elapsed:.3f}s\n")
    rep["command"] = "verify"
    _emit_report(args, rep)
    holds = rep.get("holds")
    sys.stdout.write(json.dumps({k: v for k, v in rep.items()
                                 if k in ("claim", "holds")}) + "\n")
    return 0 if holds in (True, None) else 1


def _cmd_report(args) -> int:
    obj = json.loads(open(args.json).read())
    for key in sorted(obj):
        sys.stdout.write(f"{key}: {obj[key]}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="f2reg",
                                description="delta-regularity toolkit for functions on F2^n")
    p.add_argument("--threads", type=int, default=None,
                   help="cap internal numba parallelism")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="transform a table and query its spectrum")
    sp.add_argument("table", help="table file or - for stdin")
    sp.add_argument("--delta", help="regularity threshold P/Q")
    sp.add_argument("--scalar", choices=["dyadic", "float"], default="dyadic",
                    help="float opts in to non-exact regularity decisions")
    sp.add_argument("--report")
    sp.set_defaults(fn=_cmd_spectrum)

    fa = sub.add_parser("family", help="emit a generator family table")
    fa.add_argument("name", choices=["maj", "mos", "homog", "pkc", "granular"])
    fa.add_argument("--n", type=int)
    fa.add_argument("--d", type=int)
    fa.add_argument("--k", type=int, default=1)
    fa.add_argument("--g", default="1/2")
    fa.add_argument("--seed", type=int, default=0)
    fa.add_argument("--report")
    fa.set_defaults(fn=_cmd_family)

    rg = sub.add_parser("regularize", help="run a regularization algorithm")
    rg.add_argument("table")
    rg.add_argument("--algo", required=True,
                    choices=["greedy", "partition", "degree-d", "exact"])
    rg.add_argument("--delta", required=True, help="exact rational P/Q")
    rg.add_argument("--degree", type=int)
    rg.add_argument("--max-codim", type=int, default=None)
    rg.add_argument("--seed", type=int, default=None)
    rg.add_argument("--report")
    rg.set_defaults(fn=_cmd_regularize)

    pk = sub.add_parser("paritykill", help="exact parity kill number")
    pk.add_argument("table")
    pk.add_argument("--max-codim", type=int, default=None)
    pk.add_argument("--report")
    pk.set_defaults(fn=_cmd_paritykill)

    vf = sub.add_parser("verify", help="run a claim checker")
    vf.add_argument("claim", choices=["degree-one-lb", "majority-lb", "homog-lb",
                                      "composition", "extractor", "granular-disperser"])
    vf.add_argument("--n", type=int)
    vf.add_argument("--d", type=int)
    vf.add_argument("--k", type=int)
    vf.add_argument("--g", default="1/2")
    vf.add_argument("--delta")
    vf.add_argument("--seed", type=int, default=0)
    vf.add_argument("--max-codim", type=int, default=3)
    vf.add_argument("--mode", default="exhaustive", choices=["exhaustive", "sampled"])
    vf.add_argument("--outer", help="outer table path (composition)")
    vf.add_argument("--inner", help="inner table path (composition)")
    vf.add_argument("--table", help="input table path")
    vf.add_argument("--report")
    vf.set_defaults(fn=_cmd_verify)

    rp = sub.add_parser("report", help="render a JSON report as text")
    rp.add_argument("json")
    rp.set_defaults(fn=_cmd_report)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads:
        try:
            import numba

            numba.set_num_threads(max(1, args.threads))
        except ImportError:
            pass
    try:
        return args.fn(args)
    except CapExceeded as exc:
        sys.stderr.write(f"cap exceeded: {exc}\n")
        return 3
    except (argparse.ArgumentTypeError, F2RegError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except AssertionError:
        sys.stderr.write("internal invariant violation:\n")
        traceback.print_exc()
        return 4


if __name__ == "__main__":
    sys.exit(main())
