"""
Command-line front end.

Exit codes:
  0  the checked property holds (``check``: the distributions are comparable)
  1  the property fails (``check``: incomparable); a JSON failure record goes to stderr
  2  usage error: bad flags, malformed phase or distribution, bad QMAJ_TOL
  3  internal invariant breach
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .circuits import Phase
from .distmaj import DEFAULT_TOL, NON_INCREASING, Relation, as_distribution, compare
from .errors import DomainError, InvariantError, ValidationError
from .export import dumps, trace_to_csv, trace_to_json, write_lorenz
from .tracer import CLOSED_FORM_TOL, MAX_QUBITS, TraceOptions, run_grover_traced, run_pea_traced, run_qft_traced

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
TOL_ENV = "QMAJ_TOL"


class UsageError(Exception):
    pass


def _qubits(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not 1 <= n <= MAX_QUBITS:
        raise argparse.ArgumentTypeError(f"n must lie in [1, {MAX_QUBITS}], got {n}")
    return n


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not v > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return v


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _phase_arg(text: str) -> str:
    if text != "random":
        try:
            Phase.parse(text)
        except DomainError as exc:
            raise argparse.ArgumentTypeError(str(exc))
    return text


def _cut(text: str) -> tuple[int, ...]:
    try:
        return tuple(sorted({int(t) for t in text.split(",") if t.strip()}))
    except ValueError:
        raise argparse.ArgumentTypeError(f"cut must be comma-separated qubit indices: {text!r}")


def _numbers(text: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in text.replace(",", " ").split()], dtype=np.float64)
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed distribution: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmaj",
        description="Step-by-step majorization traces for phase estimation, the QFT and Grover search.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--n", type=_qubits, required=True, help=f"register size, 1..{MAX_QUBITS}")
        p.add_argument("--format", choices=("json", "csv", "lorenz"), default="json")
        p.add_argument("--output", type=Path, help="output file (json/csv) or directory (lorenz); default stdout")
        p.add_argument("--tol", type=_positive_float, help=f"majorization tolerance (env {TOL_ENV}, default {DEFAULT_TOL:g})")
        p.add_argument("--struct-tol", type=_positive_float, default=1e-12, help="H-pair and residual tolerance")
        p.add_argument("--cut", type=_cut, help="qubits on one side of the entropy cut, e.g. 0,1")
        p.add_argument("--seed", type=int, default=0, help="seed for --phase random")

    p = sub.add_parser("pea", help="phase-estimation register: preparation then the canonical QFT")
    common(p)
    p.add_argument("--phase", type=_phase_arg, required=True, help='eigenphase: decimal, k/2^m, or "random"')

    p = sub.add_parser("qft", help="canonical QFT on the prepared register state")
    common(p)
    p.add_argument("--phase", type=_phase_arg, required=True, help='eigenphase: decimal, k/2^m, or "random"')
    p.add_argument("--double", action="store_true", help="apply the QFT a second time")

    p = sub.add_parser("grover", help="Grover kernel iterations")
    common(p)
    p.add_argument("--iterations", type=_nonneg_int, required=True)
    p.add_argument("--marked", type=_nonneg_int, default=0)

    p = sub.add_parser("check", help="compare two distributions")
    p.add_argument("--x", type=_numbers)
    p.add_argument("--y", type=_numbers)
    p.add_argument("--x-file", type=Path)
    p.add_argument("--y-file", type=Path)
    p.add_argument("--tol", type=_positive_float)
    p.add_argument("--format", choices=("text", "json"), default="text")
    return parser


def _tolerance(args) -> float:
    if args.tol is not None:
        return args.tol
    env = os.environ.get(TOL_ENV)
    if env is None:
        return DEFAULT_TOL
    try:
        return _positive_float(env)
    except argparse.ArgumentTypeError as exc:
        raise UsageError(f"{TOL_ENV}: {exc}")


def _options(args) -> TraceOptions:
    if args.cut is not None:
        if not args.cut or len(args.cut) >= args.n or max(args.cut) >= args.n:
            raise UsageError("--cut must be a nonempty proper subset of the qubits")
    return TraceOptions(tol=_tolerance(args), struct_tol=args.struct_tol, entropy_cut=args.cut)


def _phase(args) -> Phase:
    if args.phase == "random":
        return Phase(float(np.random.default_rng(args.seed).random()))
    return Phase.parse(args.phase)


def _emit_trace(trace, args, out) -> None:
    if args.format == "lorenz":
        if args.output is None:
            raise UsageError("--format lorenz needs --output DIR")
        write_lorenz(trace, args.output)
        return
    text = trace_to_json(trace) if args.format == "json" else trace_to_csv(trace)
    if args.output is None:
        out.write(text)
    else:
        args.output.parent.mkdir(parents=True, exist_ok=True)
        args.output.write_text(text)


def _finish(command: str, trace, reasons: list[str], args, out, err) -> int:
    trace.meta.update(command=command, seed=args.seed)
    _emit_trace(trace, args, out)
    if reasons:
        err.write(dumps({"status": "fail", "command": command, "reasons": reasons, "summary": trace.summary}))
        return EXIT_FAIL
    return EXIT_OK


def _summary_line(trace, keys, err) -> None:
    parts = [f"{k}={trace.summary[k]}" for k in keys if k in trace.summary]
    err.write(" ".join(parts) + "\n")


def cmd_pea(args, out, err) -> int:
    trace = run_pea_traced(args.n, _phase(args), _options(args))
    reasons = []
    if not trace.summary["theorem_holds"]:
        reasons.append("a QFT step decreased the distribution in the majorization order")
    if not trace.summary["closed_form_ok"]:
        reasons.append(
            f"final distribution differs from the closed form by {trace.summary['closed_form_max_error']:.3e}"
        )
    _summary_line(trace, ("theorem_holds", "closed_form_max_error", "most_likely_estimate", "max_probability"), err)
    return _finish("pea", trace, reasons, args, out, err)


def cmd_qft(args, out, err) -> int:
    trace = run_qft_traced(args.n, _phase(args), double=args.double, options=_options(args))
    reasons = []
    if args.double:
        if not trace.summary["second_pass_minorizes"]:
            reasons.append("a second-pass step increased the distribution in the majorization order")
        if trace.summary["return_max_error"] > CLOSED_FORM_TOL:
            reasons.append(f"second pass ends {trace.summary['return_max_error']:.3e} from the starting distribution")
        keys = ("second_pass_minorizes", "return_max_error", "theorem_holds")
    else:
        if not trace.summary["theorem_holds"]:
            reasons.append("a QFT step decreased the distribution in the majorization order")
        if not trace.summary["closed_form_ok"]:
            reasons.append(f"closed-form mismatch {trace.summary['closed_form_max_error']:.3e}")
        keys = ("theorem_holds", "closed_form_max_error")
    _summary_line(trace, keys, err)
    return _finish("qft", trace, reasons, args, out, err)


def cmd_grover(args, out, err) -> int:
    if args.marked >= 1 << args.n:
        raise UsageError(f"--marked must be < 2^n = {1 << args.n}")
    trace = run_grover_traced(args.n, args.iterations, args.marked, _options(args))
    reasons = []
    if not trace.summary["theorem_holds"]:
        reasons.append("a step before the optimal iteration decreased the distribution")
    _summary_line(trace, ("kstar", "p_marked_max", "theorem_holds", "natural_steps"), err)
    return _finish("grover", trace, reasons, args, out, err)


def _read_distribution(inline, path, name):
    if (inline is None) == (path is None):
        raise UsageError(f"give exactly one of --{name} and --{name}-file")
    if path is not None:
        try:
            inline = _numbers(path.read_text())
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc}")
        except argparse.ArgumentTypeError as exc:
            raise UsageError(str(exc))
    try:
        return as_distribution(inline)
    except DomainError as exc:
        raise UsageError(f"--{name}: {exc}")


def cmd_check(args, out, err) -> int:
    x = _read_distribution(args.x, args.x_file, "x")
    y = _read_distribution(args.y, args.y_file, "y")
    if x.size != y.size:
        raise UsageError(f"length mismatch: {x.size} vs {y.size}")
    v = compare(x, y, _tolerance(args))
    if args.format == "json":
        out.write(dumps({
            "relation": str(v.relation),
            "max_violation": v.max_violation,
            "cumsum_x": v.cumsum_first,
            "cumsum_y": v.cumsum_second,
        }))
    else:
        out.write(f"relation: {v.relation}\n")
        out.write(f"max_violation: {v.max_violation:.17g}\n")
        out.write("cumsum_x: " + ",".join(f"{c:.17g}" for c in v.cumsum_first) + "\n")
        out.write("cumsum_y: " + ",".join(f"{c:.17g}" for c in v.cumsum_second) + "\n")
    return EXIT_FAIL if v.relation is Relation.INCOMPARABLE else EXIT_OK


COMMANDS = {"pea": cmd_pea, "qft": cmd_qft, "grover": cmd_grover, "check": cmd_check}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return COMMANDS[args.command](args, out, err)
    except UsageError as exc:
        err.write(f"qmaj {args.command}: error: {exc}\n")
        return EXIT_USAGE
    except (InvariantError, ValidationError, DomainError) as exc:
        err.write(dumps({"status": "internal_error", "command": args.command, "error": type(exc).__name__, "detail": str(exc)}))
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - every path maps to a documented exit code
        err.write(dumps({"status": "internal_error", "command": args.command, "error": type(exc).__name__, "detail": str(exc)}))
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
