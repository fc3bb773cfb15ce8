"""Command-line interface.

Exit codes: 0 success / feasible / all cases passed, 2 infeasible or a suite
failure, 3 invalid input (including unknown names and bad flags), 4
numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .classify import classify_contraction, spectral_report
from .domination import GridSpec, check_relation, harnack_constant_poisson
from .errors import InvalidInputError, NumericalFailure, SingularResolventError
from .io import load_operator, load_tolerances, operator_to_json, read_json, write_json
from .numerics import DEFAULT_TOLERANCE
from .operators import OperatorSpec, materialize, weighted_cyclic_shift
from .suites import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3, 4

SCOPE_NOTE = "verdicts are relative to the reported grid, block order and tolerances"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _complexes(text: str) -> list[complex]:
    try:
        return [complex(t.strip().replace(" ", "")) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated complex numbers, got {text!r}") from None


def _tol(args):
    return load_tolerances(args.tolerances) if args.tolerances else DEFAULT_TOLERANCE


def cmd_gen(args) -> int:
    tol = _tol(args)
    T = materialize(OperatorSpec.from_json(read_json(args.spec)), tol)
    write_json(args.out, operator_to_json(T))
    return EXIT_OK


def cmd_check(args) -> int:
    tol = _tol(args)
    T = load_operator(args.lhs, tol)
    Tp = load_operator(args.rhs, tol)
    if T.dim != Tp.dim:
        raise InvalidInputError(f"dimension mismatch: {T.dim} vs {Tp.dim}")
    grid = GridSpec(tuple(args.radii), args.angles, not args.no_zero)
    cert = check_relation(T.entries, Tp.entries, args.relation, grid, args.order, args.cap, tol)
    doc = cert.to_dict()
    doc.update(lhs=T.label, rhs=Tp.label, tolerances=tol.to_dict(), scope=SCOPE_NOTE, version=__version__)
    if args.relation == "moment":
        doc["grid"] = None
        doc["order"] = args.order
    write_json(args.out, doc)
    return EXIT_OK if cert.feasible else EXIT_FAIL


def cmd_classify(args) -> int:
    tol = _tol(args)
    T = load_operator(args.op, tol)
    doc = {
        "label": T.label,
        "dim": T.dim,
        "flags": classify_contraction(T, tol).to_dict(),
        "spectrum": spectral_report(T, tol).to_dict(),
        "tolerances": tol.to_dict(),
        "version": __version__,
    }
    write_json(args.out, doc)
    return EXIT_OK


def cmd_suite(args) -> int:
    if args.name not in SUITES:
        raise InvalidInputError(f"unknown suite {args.name!r}; expected one of {sorted(SUITES)}")
    report = run_suite(args.name, args.seed, args.cases, _tol(args))
    write_json(args.out, report)
    return EXIT_OK if report.all_passed else EXIT_FAIL


def _sweep_rows(args, tol):
    grid = GridSpec(tuple(args.radii), args.angles, not args.no_zero)
    heads = [f"c_r{r:g}" for r in grid.radii]
    if args.family == "t-alpha-family":
        ref = args.reference
        Tref = weighted_cyclic_shift(args.n, ref, tol).entries
        header = ["family", "n", "alpha_re", "alpha_im", "ref_re", "ref_im", "direction"] + heads
        rows = []
        for a in args.alphas:
            Ta = weighted_cyclic_shift(args.n, a, tol).entries
            for direction, (L, R) in (("forward", (Ta, Tref)), ("backward", (Tref, Ta))):
                cert = harnack_constant_poisson(L, R, grid, tol)
                consts = [p["constant"] for p in cert.profile if p["radius"] > 0]
                rows.append([args.family, args.n, a.real, a.imag, ref.real, ref.imag, direction] + consts)
        return header, rows
    if args.family == "scalar":
        header = ["family", "a_re", "a_im"] + heads
        rows = []
        for a in args.alphas:
            if abs(a) >= 1:
                raise InvalidInputError("scalar family needs |a| < 1")
            cert = harnack_constant_poisson(np.array([[a]]), np.zeros((1, 1)), grid, tol)
            rows.append([args.family, a.real, a.imag] + [p["constant"] for p in cert.profile if p["radius"] > 0])
        return header, rows
    raise InvalidInputError(f"unknown sweep family {args.family!r}; expected t-alpha-family or scalar")


def cmd_sweep(args) -> int:
    header, rows = _sweep_rows(args, _tol(args))
    with Path(args.out).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(x)) if isinstance(x, float) else x for x in row])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="harnack", description="Harnack and Z-domination of finite contractions")
    p.add_argument("--version", action="version", version=f"harnack {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--out", required=True, help="output file")
        sp.add_argument("--tolerances", help="JSON file overriding tolerance fields")

    def grid_flags(sp, radii="0.3,0.6,0.9,0.99"):
        sp.add_argument("--radii", type=_floats, default=_floats(radii), help="comma-separated radii in (0,1)")
        sp.add_argument("--angles", type=int, default=128, help="angles per radius")
        sp.add_argument("--no-zero", action="store_true", help="leave lam = 0 out of the grid")

    sp = sub.add_parser("gen", help="materialize an operator spec into a dense operator file")
    sp.add_argument("spec")
    common(sp)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("check", help="certify a domination relation between two operators")
    sp.add_argument("lhs")
    sp.add_argument("rhs")
    sp.add_argument("--relation", required=True, choices=["harnack", "z", "resolvent", "moment", "mobius"])
    grid_flags(sp)
    sp.add_argument("--order", type=int, default=32, help="block order for the moment relation")
    sp.add_argument("--cap", type=float, default=1e6, help="constants above this are reported infeasible")
    common(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("classify", help="class flags and spectral report of one operator")
    sp.add_argument("op")
    common(sp)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("suite", help="run a named property suite")
    sp.add_argument("--name", required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--cases", type=int, default=None)
    common(sp)
    sp.set_defaults(func=cmd_suite)

    sp = sub.add_parser("sweep", help="constants per radius over a parameter family (CSV)")
    sp.add_argument("--family", required=True)
    sp.add_argument("--n", type=int, default=64)
    sp.add_argument("--alphas", type=_complexes, default=_complexes("0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9"))
    sp.add_argument("--reference", type=complex, default=0j)
    grid_flags(sp)
    common(sp)
    sp.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidInputError as exc:
        print(f"harnack: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalFailure, SingularResolventError, np.linalg.LinAlgError) as exc:
        print(f"harnack: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"harnack: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
