"""Command-line front end: ``entrelax {solve,sweep,verify,state}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import classical as cl
from . import quantum as qu
from .statefile import StateFileError, read_state_file, write_state_file
from .states import bell_basis, horodecki, werner
from .structures import SolverConfig
from .sweep import MODES, SweepSpec, rows_to_csv, run_sweep
from .verify import run_all

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_NOT_CONVERGED = 3


def _solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--nalpha", type=int, default=None, help="ensemble size")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--restarts", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)


def _config(args) -> SolverConfig:
    return SolverConfig(tol=args.tol, max_iter=args.max_iter, restarts=args.restarts, seed=args.seed)


def _pairs(a: np.ndarray) -> list:
    return np.stack([a.real, a.imag], axis=-1).tolist()


def _decomposition(rep, mode: str) -> dict:
    if mode == "classical":
        return {"p": rep.ensemble.tolist(), "delta": rep.delta.tolist()}
    e = rep.ensemble
    out = {"weights": e.weights.tolist(), "delta": _pairs(rep.delta)}
    if mode == "pure":
        out["vectors"] = _pairs(e.pure_vectors())
    else:
        out["members"] = _pairs(e.members)
    return out


def cmd_solve(args) -> int:
    try:
        rho, dims = read_state_file(args.state)
    except StateFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    cfg = _config(args)
    if args.mode == "classical":
        target = np.real(np.diag(rho)).reshape(dims)
        rep = cl.classical_solve(target, args.nalpha or dims.d, cfg)
    else:
        solve = qu.pure_solve if args.mode == "pure" else qu.mixed_solve
        rep = solve(rho, dims, args.nalpha, cfg)
    summary = {
        "mode": args.mode,
        "entanglement_bits": rep.entanglement_bits,
        "delta_bits": rep.delta_bits,
        "iterations": rep.iterations,
        "residual": rep.residual,
        "converged": rep.converged,
        "breakdowns": getattr(rep, "breakdowns", 0),
    }
    if args.json:
        print(json.dumps(summary))
    else:
        print(f"E_{args.mode} = {rep.entanglement_bits:.8f} bits  (dual {rep.delta_bits:.8f})")
        print(f"iterations = {rep.iterations}  residual = {rep.residual:.3e}  converged = {rep.converged}")
    if args.out:
        Path(args.out).write_text(json.dumps({**summary, **_decomposition(rep, args.mode)}, indent=1))
    return EXIT_OK if rep.converged else EXIT_NOT_CONVERGED


def cmd_sweep(args) -> int:
    default = SweepSpec.default(args.family, args.mode)
    try:
        spec = SweepSpec(
            args.family,
            default.start if args.start is None else args.start,
            default.stop if args.stop is None else args.stop,
            default.step if args.step is None else args.step,
            default.nalpha if args.nalpha is None else args.nalpha,
            args.mode,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    rows = run_sweep(spec, _config(args), workers=args.workers)
    text = rows_to_csv(rows)
    if args.out in (None, "-"):
        sys.stdout.write(text)
        return EXIT_OK
    try:
        Path(args.out).write_text(text)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    return EXIT_OK


def cmd_verify(args) -> int:
    results = run_all(seed=args.seed, sizes=args.sizes, state=args.state, cases=args.cases)
    for r in results:
        status = "PASS" if r.ok else "FAIL"
        extra = f"  {r.message}" if r.message else ""
        print(f"{status}  {r.name:<26} {r.passed}/{r.total}{extra}")
    return EXIT_OK if all(r.ok for r in results) else EXIT_FAILED


def cmd_state(args) -> int:
    if args.family == "werner":
        rho, dims = werner(args.param), (2, 2)
    elif args.family == "horodecki":
        rho, dims = horodecki(args.param), (3, 3)
    else:
        b = bell_basis()[int(args.param)]
        rho, dims = np.outer(b, b.conj()), (2, 2)
    write_state_file(args.out, rho, dims)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entrelax", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one state file")
    p.add_argument("state")
    p.add_argument("--mode", choices=("pure", "mixed", "classical"), default="pure")
    _solver_flags(p)
    p.add_argument("--out", help="write the decomposition as JSON here")
    p.add_argument("--json", action="store_true", help="print a JSON summary")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="sweep a state family and write CSV")
    p.add_argument("--family", choices=("werner", "horodecki"), required=True)
    p.add_argument("--from", dest="start", type=float)
    p.add_argument("--to", dest="stop", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--mode", choices=MODES, default="both")
    _solver_flags(p)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run the self-check suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sizes", default="2x2,2x3", help="comma list like 2x2,2x3")
    p.add_argument("--cases", type=int, default=10)
    p.add_argument("--state", help="also parse this state file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("state", help="write a named state to a state file")
    p.add_argument("family", choices=("werner", "horodecki", "bell"))
    p.add_argument("param", type=float, help="F, alpha, or Bell index 0-3")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_state)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
