"""
netdesc: exponential network descriptors from the command line.

  netdesc compute graph.txt --lambda 0.5 --format table
  netdesc bounds --n 5 --lambda 0.3
  netdesc gen broom --n 5 --d 2 --out broom.txt
  netdesc verify --n 5 --lambda 0.3 --mode claims --jobs 4

Exit status: 0 on success, 1 if a verified claim is violated, 2 on bad
input.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .base import NetDescError
from .bounds import HALF_LAMBDA_NOTE, stationary_points, table1_bounds
from .descriptors import Lambda, aggregates, descriptor_table
from .generators import FAMILIES, FamilySpec
from .search import probe_conjecture, probe_open_problems, verify_claims
from .utils import dumps, format_edge_list, read_edge_list, write_edge_list
from .version import __version__

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_ERROR = 2


def _record(command: str, inputs: dict, results: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "results": results,
    }


def _emit(text: str, out: Optional[str]):
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")
        logger.info("wrote %s", out)


def _parse_offsets(text: Optional[str]) -> Optional[tuple]:
    if text is None:
        return None
    try:
        return tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise NetDescError(f"--offsets must be comma-separated integers, got {text!r}.")


############
# Commands #
############


def cmd_compute(args) -> int:
    lam = Lambda(args.lam)
    g, family = read_edge_list(args.graph, lenient=args.lenient)
    table = descriptor_table(g, lam, jobs=args.jobs)
    summary = aggregates(table)

    if args.edges:
        table.edges_frame().to_csv(args.edges, index=False)
        logger.info("wrote edge betweenness to %s", args.edges)

    if args.format == "csv":
        text = table.to_frame().to_csv()
    elif args.format == "table":
        text = table.summary() + "\n" + summary.summary()
    else:
        results = table.to_dict()
        results["aggregates"] = summary.to_dict()
        text = dumps(
            _record(
                "compute",
                {"graph": str(args.graph), "n": g.n, "lambda": lam.value, "family": family},
                results,
            )
        )
    _emit(text, args.out)
    return EXIT_OK


def cmd_bounds(args) -> int:
    lam = Lambda(args.lam)
    bounds = table1_bounds(args.n, lam)
    sp = stationary_points(args.n, lam)

    if args.format == "csv":
        text = bounds.table().to_csv()
    elif args.format == "table":
        text = bounds.summary()
    else:
        results = bounds.to_dict()
        results["stationary_points"] = {"S_lambda": sp.S_lambda, "D1": sp.D1, "D2": sp.D2}
        if lam.value >= 0.5:
            results["note"] = HALF_LAMBDA_NOTE
        text = dumps(_record("bounds", {"n": args.n, "lambda": lam.value}, results))
    _emit(text, args.out)
    return EXIT_OK


def cmd_gen(args) -> int:
    spec = FamilySpec(
        family=args.family, n=args.n, D=args.d, offsets=_parse_offsets(args.offsets)
    )
    g = spec.build()
    if args.out is None:
        sys.stdout.write(format_edge_list(g, family=str(spec)))
    else:
        write_edge_list(g, args.out, family=str(spec))
        logger.info("wrote %s with %d edges to %s", spec, g.n_edges, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    lam = Lambda(args.lam)
    run = {
        "claims": verify_claims,
        "conjecture": probe_conjecture,
        "open": probe_open_problems,
    }[args.mode]
    report = run(args.n, lam, jobs=args.jobs, allow_large=args.allow_large)

    if args.counterexamples and report.counterexamples:
        outdir = Path(args.counterexamples)
        outdir.mkdir(parents=True, exist_ok=True)
        for k, cx in enumerate(report.counterexamples):
            target = outdir / f"{cx.claim_id}_{k}.txt"
            text = f"# n={cx.n}\n# claim={cx.claim_id}\n"
            text += "".join(f"{u} {v}\n" for u, v in cx.edges)
            target.write_text(text)

    if args.format == "csv":
        text = report.to_frame().to_csv()
    elif args.format == "table":
        text = report.summary()
    else:
        text = dumps(
            _record(
                "verify",
                {"n": args.n, "lambda": lam.value, "mode": args.mode, "jobs": args.jobs},
                report.to_dict(),
            )
        )
    _emit(text, args.out)
    return EXIT_OK if report.ok else EXIT_VIOLATION


##########
# Parser #
##########


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="netdesc",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug"
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--lambda", dest="lam", required=True, help="decay in (0, 1)")
        p.add_argument("--format", choices=["json", "csv", "table"], default="json")
        p.add_argument("--out", default=None, help="write here instead of stdout")

    p = sub.add_parser("compute", help="descriptors of a graph")
    p.add_argument("graph", help="edge-list file")
    common(p)
    p.add_argument("--edges", default=None, help="also write edge betweenness CSV")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--lenient", action="store_true", help="drop loops and duplicates")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("bounds", help="closed-form extremal bounds")
    p.add_argument("--n", type=int, required=True)
    common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("gen", help="write an extremal family as an edge list")
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, default=None, help="broom diameter parameter")
    p.add_argument("--offsets", default=None, help="circulant offsets, e.g. 1,2")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="exhaustive check over small graphs")
    p.add_argument("--n", type=int, required=True)
    common(p)
    p.add_argument("--mode", choices=["claims", "conjecture", "open"], default="claims")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--allow-large", action="store_true", help="permit n = 8")
    p.add_argument(
        "--counterexamples", default=None, help="directory for counterexample edge lists"
    )
    p.set_defaults(func=cmd_verify)

    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)]
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    try:
        return args.func(args)
    except NetDescError as e:
        print(f"netdesc: error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as e:
        print(f"netdesc: error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
