"""Command line front end.

Exit codes: 0 success, 1 failed verification, 2 bad input or unmet
precondition, 3 no fixpoint within --max-iter.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from fractions import Fraction

from . import catalog
from .crystal import (aut_is_crystallographic_check, analyze, construct_complete, iterate_fixpoint)
from .errors import CrystError, MaxIterExceeded, NormalizerNotFinite, NotCenterless
from .exact import RatVector
from .groupfile import FORMAT, GroupFileError, dump_group, group_to_dict, parse_group_file, report_to_dict
from .normalizer import NormalizerConfig

log = logging.getLogger("crystnorm")


def _config(args) -> NormalizerConfig:
    return NormalizerConfig(backend=args.backend, bound=args.bound, max_order=args.max_order,
                            diag_bound_factor=args.diag_bound_factor)


def load_group(source: str):
    """A path to a group file, or a built-in expression like ``gamma1^2*gamma2``."""
    if os.path.exists(source):
        with open(source, encoding="utf-8") as fh:
            return parse_group_file(fh.read())
    try:
        return catalog.parse_group_expression(source)
    except ValueError:
        raise GroupFileError(f"{source}: no such file and not a built-in group expression") from None


def _emit(args, payload: dict, text_lines: list[str]):
    blob = json.dumps(payload, indent=2) + "\n"
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(blob)
    if args.json:
        sys.stdout.write(blob)
    else:
        print("\n".join(text_lines))


def _report_lines(rep, prefix=""):
    d = report_to_dict(rep)
    return [f"{prefix}{k}: {v}" for k, v in d.items()]


def cmd_analyze(args) -> int:
    gamma = load_group(args.group)
    a = analyze(gamma, _config(args))
    payload = {"format": FORMAT, "command": "analyze", "group": group_to_dict(gamma),
               "report": report_to_dict(a.report)}
    if a.normalizer is not None and a.normalizer.is_finite:
        payload["aut_is_crystallographic"] = aut_is_crystallographic_check(gamma, a.normalizer)
    _emit(args, payload, _report_lines(a.report))
    return 0


def _history_payload(command, final, history, extra=None):
    payload = {"format": FORMAT, "command": command,
               "steps": len(history) - 1,
               "history": [report_to_dict(r) for r in history]}
    if final is not None:
        payload["group"] = group_to_dict(final)
    payload.update(extra or {})
    return payload


def _history_lines(history):
    lines = []
    for i, r in enumerate(history):
        lines.append(f"step {i}: |G|={r.point_group_order} |N|={r.normalizer_order} "
                     f"({r.normalizer_status}) |N_alpha|={r.n_alpha_order} "
                     f"H1={list(r.h1_invariants or [])} out={r.out_order}")
    return lines


def cmd_iterate(args) -> int:
    gamma = load_group(args.group)
    try:
        final, history = iterate_fixpoint(gamma, args.max_iter, _config(args))
    except MaxIterExceeded as e:
        payload = _history_payload("iterate", None, e.history, {"error": str(e)})
        sys.stdout.write(json.dumps(payload, indent=2) + "\n")
        print(f"error: {e}", file=sys.stderr)
        return 3
    payload = _history_payload("iterate", final, history)
    _emit(args, payload, _history_lines(history) + [f"fixpoint after {len(history) - 1} step(s)"])
    if args.group_out:
        with open(args.group_out, "w", encoding="utf-8") as fh:
            fh.write(dump_group(final))
    return 0


def cmd_construct(args) -> int:
    if args.dim < 2:
        print("error: --dim must be at least 2", file=sys.stderr)
        return 2
    try:
        final, history = construct_complete(args.dim, _config(args), args.max_iter)
    except MaxIterExceeded as e:
        payload = _history_payload("construct", None, e.history, {"error": str(e)})
        sys.stdout.write(json.dumps(payload, indent=2) + "\n")
        print(f"error: {e}", file=sys.stderr)
        return 3
    payload = _history_payload("construct", final, history, {"dimension": args.dim})
    _emit(args, payload, _history_lines(history)
          + [f"dimension {args.dim}: fixpoint after {len(history) - 1} step(s), "
             f"out_order {history[-1].out_order}, center trivial {history[-1].center_trivial}"])
    if args.group_out:
        with open(args.group_out, "w", encoding="utf-8") as fh:
            fh.write(dump_group(final))
    return 0


def example_checks(config: NormalizerConfig, corrupt: bool = False):
    """Yield (name, expected, observed) for the two planar/cubic example groups."""
    g1 = catalog.gamma1()
    if corrupt:
        # drop the reflection: leaves the rotation group of order 6
        from .crystal import make_cryst
        g1 = make_cryst(2, [(g, RatVector.zero(2)) for g in catalog.D12_GENERATORS[:2]])
    g2 = catalog.gamma2()
    for name, gamma, order in (("gamma1", g1, 12), ("gamma2", g2, 48)):
        a = analyze(gamma, config)
        r = a.report
        yield f"{name}: point group order", order, r.point_group_order
        yield f"{name}: center trivial", True, r.center_trivial
        yield f"{name}: normalizer equals point group", True, (
            a.normalizer is not None and a.normalizer.is_finite
            and a.normalizer.group == gamma.point_group)
        yield f"{name}: normalizer certified", "certified", r.normalizer_status
        yield f"{name}: H1 invariants", [], list(r.h1_invariants or [])
        yield f"{name}: out order", 1, r.out_order
    prod = catalog.parse_group_expression
    yield "gamma1^2: out order", 2, analyze(prod("gamma1^2"), config).report.out_order
    yield "gamma1*gamma2: out order", 1, analyze(prod("gamma1*gamma2"), config).report.out_order


def cmd_verify_examples(args) -> int:
    rows = []
    first_fail = None
    for name, expected, observed in example_checks(_config(args), corrupt=args.corrupt_builtin):
        ok = expected == observed
        rows.append({"check": name, "expected": str(expected), "observed": str(observed), "pass": ok})
        if not ok and first_fail is None:
            first_fail = name
    if args.json:
        sys.stdout.write(json.dumps({"format": FORMAT, "command": "verify-examples",
                                     "checks": rows, "all_pass": first_fail is None}, indent=2) + "\n")
    else:
        width = max(len(r["check"]) for r in rows)
        for r in rows:
            status = "PASS" if r["pass"] else "FAIL"
            print(f"{status}  {r['check']:<{width}}  expected {r['expected']:<10} observed {r['observed']}")
    if first_fail is not None:
        print(f"verification failed: {first_fail}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--backend", choices=("form", "brute", "both"), default="form")
    common.add_argument("--bound", type=int, default=3, help="brute-force entry bound")
    common.add_argument("--max-order", type=int, default=20000)
    common.add_argument("--max-iter", type=int, default=10)
    common.add_argument("--diag-bound-factor", type=Fraction, default=Fraction(4))
    common.add_argument("--json", action="store_true", help="write machine-readable output to stdout")
    common.add_argument("-o", "--output", help="also write the JSON report to this file")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="crystnorm", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="center, H1, normalizer and Out order")
    a.add_argument("group", help="group file or built-in expression (gamma1^k*gamma2^i)")
    a.set_defaults(func=cmd_analyze)

    it = sub.add_parser("iterate", parents=[common], help="iterate the affine normalizer to a fixpoint")
    it.add_argument("group")
    it.add_argument("--group-out", help="write the final group file here")
    it.set_defaults(func=cmd_iterate)

    c = sub.add_parser("construct", parents=[common], help="build a complete group of the given dimension")
    c.add_argument("--dim", type=int, required=True)
    c.add_argument("--group-out", help="write the final group file here")
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify-examples", parents=[common], help="check the built-in example claims")
    v.add_argument("--corrupt-builtin", action="store_true", help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_verify_examples)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    t0 = time.perf_counter()
    try:
        code = args.func(args)
    except (GroupFileError, NotCenterless, NormalizerNotFinite, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except CrystError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    log.info("done in %.2fs", time.perf_counter() - t0)
    return code


if __name__ == "__main__":
    sys.exit(main())
