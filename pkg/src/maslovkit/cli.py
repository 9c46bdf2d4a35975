"""Command line interface.

    maslovkit run SCENARIO.json [--out DIR] [--step H]
    maslovkit model NAME [--n N] [--interval A B] [--step H] [--emit FILE]
    maslovkit props [--seed S] [--trials T] [--dims 1,2,3] [--counterexample FILE]

Exit codes: 0 when every asserted inequality holds, 1 on a violation (the
report is still written), 2 on malformed input.
"""
from __future__ import annotations

import argparse
import sys

from .errors import DriftError, InvalidInputError
from .properties import dump_counterexamples, property_suite
from .report import run_scenario
from .scenario import MODELS, Scenario, builtin_model

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _dims(text):
    try:
        dims = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}") from None
    if not dims or min(dims) < 1:
        raise argparse.ArgumentTypeError("dimensions must be positive integers")
    return dims


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("expected a positive number")
    return v


def build_parser():
    p = argparse.ArgumentParser(prog="maslovkit", description="Maslov indices along Jacobi flows.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a scenario file and write its report bundle")
    r.add_argument("scenario")
    r.add_argument("--out", default=None, help="output directory (default: report-<name>)")
    r.add_argument("--step", type=_positive_float, default=None, help="override the integration step")

    m = sub.add_parser("model", help="emit a bundled model as a scenario")
    m.add_argument("name", choices=MODELS)
    m.add_argument("--n", type=_positive_int, default=3)
    m.add_argument("--interval", type=float, nargs=2, metavar=("A", "B"), default=None)
    m.add_argument("--step", type=_positive_float, default=1e-3)
    m.add_argument("--emit", default=None, help="write the scenario JSON here instead of stdout")

    q = sub.add_parser("props", help="randomized property suite")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--trials", type=_positive_int, default=10)
    q.add_argument("--dims", type=_dims, default=(1, 2, 3))
    q.add_argument("--counterexample", default=None, help="write counterexamples (JSON) to this file")
    return p


def _cmd_run(args, out, err):
    try:
        scenario = Scenario.load(args.scenario)
        bundle = run_scenario(scenario, args.step)
    except OSError as e:
        print(f"error: {e}", file=err)
        return EXIT_INPUT
    except (InvalidInputError, DriftError) as e:
        print(f"error: {args.scenario}: {e}", file=err)
        return EXIT_INPUT
    out_dir = args.out or f"report-{scenario.name}"
    bundle.write(out_dir)
    print(f"{scenario.name}: {len(bundle.events)} conjugate, {len(bundle.focal_events)} focal instants", file=out)
    for v in bundle.verdicts:
        if not v.asserted:
            continue
        state = "ok  " if v.holds else "FAIL"
        if v.kind == "implication":
            triggered = v.left > v.right
            claim = f"premise {v.left:g} > {v.right:g} {'met' if triggered else 'not met'}"
            if triggered:
                claim += f", conclusion {'found' if v.conclusion else 'missing'}"
        else:
            claim = f"{v.left:g} <= {v.right:g}"
        print(f"  {state} {v.id}: {claim}", file=out)
    print(f"report written to {out_dir}", file=out)
    return bundle.exit_code


def _cmd_model(args, out, err):
    try:
        scenario = builtin_model(args.name, args.n, args.interval, args.step)
    except InvalidInputError as e:
        print(f"error: {e}", file=err)
        return EXIT_INPUT
    if args.emit:
        scenario.dump(args.emit)
        print(f"wrote {args.emit}", file=out)
    else:
        out.write(scenario.to_json())
    return EXIT_OK


def _cmd_props(args, out, err):
    summary = property_suite(args.seed, args.trials, args.dims)
    for line in summary.lines():
        print(line, file=out)
    if not summary.ok:
        text = dump_counterexamples(summary)
        if args.counterexample:
            with open(args.counterexample, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
            print(f"counterexamples written to {args.counterexample}", file=err)
        else:
            print(text, file=err)
    return summary.exit_code


def main(argv=None, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    handler = {"run": _cmd_run, "model": _cmd_model, "props": _cmd_props}[args.command]
    return handler(args, out, err)


if __name__ == "__main__":
    sys.exit(main())
