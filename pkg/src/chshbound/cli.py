"""Command line: chshbound {state-info, bound, sweep-theta, sweep-lambda, verify}.

Exit codes: 0 success, 1 property failure (verify), 2 input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict
from typing import Sequence

from . import entanglement, optimizer, states, verification

EXIT_OK = 0
EXIT_PROPERTY = 1
EXIT_INPUT = 2

DEFAULT_CHIS = (0.0, math.pi / 2, math.pi, 3 * math.pi / 2)


class InputError(Exception):
    pass


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative: {text!r}")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _float_list(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None
    if not vals or not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"need at least one finite number: {text!r}")
    return vals


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", metavar="PATH", help="JSON state file")
    common.add_argument("--output", metavar="PATH", help="write here instead of standard output")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--starts", type=_positive_int, default=64, help="optimizer starts")
    common.add_argument("--tol", type=_positive_float, default=1e-10, help="simplex value tolerance")
    common.add_argument("--seed", type=_nonneg_int, default=0)
    common.add_argument("--grid-step", type=_positive_float, default=None)
    common.add_argument("--chi", type=_float_list, default=DEFAULT_CHIS, help="comma-separated chi values")

    parser = argparse.ArgumentParser(
        prog="chshbound",
        description="CHSH bounds under local vertical measurements for two-qubit states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("state-info", parents=[common], help="entanglement summary of a state")
    p = sub.add_parser("bound", parents=[common], help="bound of the Bell operator for a state")
    p.add_argument("--numeric", action="store_true", help="use the optimizer even for pure states")
    sub.add_parser("sweep-theta", parents=[common], help="pure-state bound against Schmidt angle")
    sub.add_parser("sweep-lambda", parents=[common], help="bound along the lambda family")
    p = sub.add_parser("verify", parents=[common], help="run the randomised property suites")
    p.add_argument("--samples", type=_positive_int, default=1000)
    return parser


# --- formatting -------------------------------------------------------------


def fmt_csv(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int, float)):
        return f"{float(value):.6g}" if isinstance(value, float) else str(value)
    return str(value)


def write_csv(columns: Sequence[str], rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt_csv(row[c]) for c in columns])
    return buf.getvalue()


def write_json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config(args) -> optimizer.OptimizerConfig:
    return optimizer.OptimizerConfig(num_starts=args.starts, f_tol=args.tol, seed=args.seed)


def _load(args):
    if not args.input:
        raise InputError("--input PATH is required")
    try:
        return states.load_state(args.input)
    except OSError as exc:
        raise InputError(f"cannot read {args.input}: {exc.strerror or exc}") from None
    except states.InvalidState as exc:
        raise InputError(f"invalid state: {exc}") from None


# --- commands ---------------------------------------------------------------


def state_info_record(state) -> dict:
    rho = states.as_density(state)
    rep = entanglement.entanglement_report(rho)
    pure = isinstance(state, states.PureState) or rho.is_pure()
    theta = None
    if pure:
        psi = state if isinstance(state, states.PureState) else rho.dominant_vector()
        theta = states.schmidt_angle(psi).theta
    return {
        "kind": "pure" if isinstance(state, states.PureState) else "density",
        "entropy": rep.entropy,
        "concurrence": rep.concurrence,
        "horodecki_M": rep.horodecki_M,
        "horodecki_max": rep.horodecki_max,
        "purity": rep.purity,
        "theta": theta,
    }


def cmd_state_info(args) -> int:
    rec = state_info_record(_load(args))
    text = write_json(rec) if args.format == "json" else write_csv(list(rec), [rec])
    _emit(text, args.output)
    return EXIT_OK


BOUND_COLUMNS = (
    "value",
    "verdict",
    "method",
    "starts_converged",
    "evaluations",
    "a_alpha",
    "a_beta",
    "a_gamma",
    "a_delta",
    "b_alpha",
    "b_beta",
    "b_gamma",
    "b_delta",
)


def bound_record(res: optimizer.BoundResult) -> dict:
    rec = {
        "value": res.value,
        "verdict": optimizer.verdict(res.value),
        "method": res.method,
        "starts_converged": res.starts_converged,
        "evaluations": res.evaluations,
    }
    u = res.best_params
    for side, params in (("a", u.a_params if u else None), ("b", u.b_params if u else None)):
        for name in ("alpha", "beta", "gamma", "delta"):
            rec[f"{side}_{name}"] = getattr(params, name) if params else None
    return rec


def cmd_bound(args) -> int:
    state = _load(args)
    cfg = _config(args)
    if args.numeric:
        cfg = optimizer.numeric_config(cfg)
    rec = bound_record(optimizer.maximize_bound(state, cfg))
    text = write_json(rec) if args.format == "json" else write_csv(BOUND_COLUMNS, [rec])
    _emit(text, args.output)
    return EXIT_OK


THETA_COLUMNS = ("theta", "chi", "bound_analytic", "bound_numeric", "entropy", "classical_bound")
LAMBDA_COLUMNS = ("lambda", "bound", "concurrence", "horodecki_max", "classical_bound")


def cmd_sweep_theta(args) -> int:
    step = args.grid_step or math.pi / 200
    rows = optimizer.sweep_theta(optimizer.theta_grid(step), _config(args), args.chi)
    recs = [dict(asdict(r), classical_bound=optimizer.CLASSICAL_BOUND) for r in rows]
    text = write_json({"rows": recs}) if args.format == "json" else write_csv(THETA_COLUMNS, recs)
    _emit(text, args.output)
    return EXIT_OK


def lambda_summary(rows, cfg, step) -> dict:
    try:
        onset = optimizer.find_onset(cfg=cfg, step=step, rows=rows)
        onset_c = entanglement.concurrence(states.lambda_state(onset))
    except optimizer.NoOnsetInRange:
        onset = onset_c = None
    turning = optimizer.find_turning_point(cfg=cfg, step=step, rows=rows)
    return {"onset": onset, "onset_concurrence": onset_c, "turning_point": turning}


def cmd_sweep_lambda(args) -> int:
    step = args.grid_step or 0.01
    cfg = _config(args)
    rows = optimizer.sweep_lambda(optimizer.lambda_grid(step), cfg)
    recs = [
        {
            "lambda": r.lam,
            "bound": r.bound,
            "concurrence": r.concurrence,
            "horodecki_max": r.horodecki_max,
            "classical_bound": optimizer.CLASSICAL_BOUND,
        }
        for r in rows
    ]
    summary = lambda_summary(rows, cfg, step)
    if args.format == "json":
        _emit(write_json({"rows": recs, "summary": summary}), args.output)
    else:
        _emit(write_csv(LAMBDA_COLUMNS, recs), args.output)
        sys.stderr.write(
            "summary: " + " ".join(f"{k}={fmt_csv(v)}" for k, v in summary.items()) + "\n"
        )
    return EXIT_OK


def cmd_verify(args) -> int:
    results = verification.run_all(seed=args.seed, samples=args.samples, cfg=_config(args))
    lines = []
    for r in results:
        status = "PASS" if r.ok else "FAIL"
        lines.append(f"{status} {r.name} {r.passed}/{r.total} {r.worst_label}={r.worst:.6g}")
        if not r.ok:
            lines.append("  counterexample: " + json.dumps(r.counterexample))
    failed = sum(not r.ok for r in results)
    lines.append(f"{len(results) - failed}/{len(results)} suites passed")
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_PROPERTY if failed else EXIT_OK


COMMANDS = {
    "state-info": cmd_state_info,
    "bound": cmd_bound,
    "sweep-theta": cmd_sweep_theta,
    "sweep-lambda": cmd_sweep_lambda,
    "verify": cmd_verify,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        sys.stderr.write(f"chshbound {args.command}: error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
