"""Command-line interface.

Exit codes: 0 success, 1 diagnostics (parse/model/domain errors),
2 renormalization left divergent terms, 3 numeric-oracle failure.
"""

from __future__ import annotations

import argparse
import math
import re
import sys
from dataclasses import replace
from fractions import Fraction

from . import __version__
from .action import (
    DomainError,
    EffectiveAction,
    NotReducibleError,
    RenormalizationIncompleteError,
    assemble,
    check_quantization,
    eliminate_bf,
    renormalize,
)
from .dirac import ModelError
from .modelfile import ModelFileError, parse_model, parse_monomial
from .oracle import (
    DEFAULT_REP,
    dipole_trace_identity_checks,
    log_slope,
    quadrature_grid_max_relative_error,
    randomized_equivalence_suite,
)
from .render import (
    FIELD_STRENGTH,
    POTENTIAL,
    render_latex,
    render_structured_json,
    render_text,
)

_FORM_CHOICES = {"fs": FIELD_STRENGTH, "potential": POTENTIAL}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dipoleft",
        description="One-loop effective actions for dipole-coupled neutral fermions",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_output_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--form", choices=sorted(_FORM_CHOICES), default="fs")
        p.add_argument("--format", choices=["text", "latex", "structured"], default="text")
        p.add_argument(
            "--set",
            dest="assignments",
            action="append",
            default=[],
            metavar="NAME=MONOMIAL",
            help="substitute a finite constant, e.g. CF=-1/8*e^2*pi^-1",
        )

    p_compute = sub.add_parser("compute", help="assemble and renormalize a model file")
    p_compute.add_argument("file")
    p_compute.add_argument(
        "--keep-divergences",
        action="store_true",
        help="skip renormalization and print symbolic divergences",
    )
    add_output_flags(p_compute)

    p_reduce = sub.add_parser("reduce-bf", help="compute, then integrate out the multiplier 2-form")
    p_reduce.add_argument("file")
    add_output_flags(p_reduce)

    p_check = sub.add_parser("check-quantization", help="classify time-reversal behavior")
    p_check.add_argument("--theta", required=True, metavar="<q>pi", help="e.g. 1pi, 1/3pi, -2pi")
    p_check.add_argument("--nf", required=True, type=int, help="odd positive flavor number")

    p_self = sub.add_parser("selftest", help="run the numeric-oracle suites")
    p_self.add_argument("--seed", type=int, default=42)
    p_self.add_argument("--count", type=int, default=500)
    return parser


def _emit(action: EffectiveAction, args: argparse.Namespace) -> None:
    form = _FORM_CHOICES[args.form]
    if args.format == "text":
        text = render_text(action, form)
        if text:
            print(text)
    elif args.format == "latex":
        text = render_latex(action, form)
        if text:
            print(text)
    else:
        print(render_structured_json(action, form))


def _apply_assignments(action: EffectiveAction, args, model) -> EffectiveAction:
    if not args.assignments:
        return action
    declared = set(model.constants)
    declared |= {d.finite_name for d in model.absorb}
    declared |= {f.mass for f in model.flavors}
    terms = list(action.terms)
    for item in args.assignments:
        name, _, value_tok = item.partition("=")
        if not value_tok:
            raise ModelError(f"bad --set argument {item!r}; expected NAME=MONOMIAL")
        value = parse_monomial(value_tok, declared)
        terms = [replace(t, coeff=t.coeff.substitute_const(name, value)) for t in terms]
    return EffectiveAction(terms=tuple(terms), slots=action.slots)


def _run_compute(args: argparse.Namespace, reduce_multiplier: bool) -> int:
    with open(args.file, "r", encoding="utf-8") as handle:
        model = parse_model(handle.read())
    action = assemble(model)
    if not getattr(args, "keep_divergences", False):
        action = renormalize(action, model.absorb)
    if reduce_multiplier:
        action, reduced = eliminate_bf(action)
        if not reduced:
            print("note: no fundamental 2-form slot; action returned unchanged", file=sys.stderr)
    action = _apply_assignments(action, args, model)
    _emit(action, args)
    return 0


def _run_check(args: argparse.Namespace) -> int:
    m = re.fullmatch(r"(-?\d+(?:/\d+)?)pi", args.theta.strip())
    if not m:
        raise DomainError(f"bad --theta {args.theta!r}; expected a rational followed by 'pi'")
    result = check_quantization(Fraction(m.group(1)), args.nf)
    print(f"theta = {result.theta_over_pi} pi, Nf = {result.nf}")
    print(f"topological charge quantized in units of Nf^2 = {result.charge_multiplier}")
    print(f"classification: {result.classification}")
    return 0


def _run_selftest(args: argparse.Namespace) -> int:
    failed = False

    clifford = DEFAULT_REP.max_clifford_deviation()
    convention = abs(DEFAULT_REP.convention_trace() - (-4j))
    ok = clifford < 1e-12 and convention < 1e-12
    failed |= not ok
    print(f"{'ok' if ok else 'FAIL'}: gamma representation (clifford={clifford:.2e}, convention={convention:.2e})")

    report = randomized_equivalence_suite(seed=args.seed, count=args.count)
    failed |= not report.passed
    for line in report.lines():
        print(("ok: " if report.passed else "") + line if line.startswith("equivalence") else line)

    eps_dev, contracted_dev = dipole_trace_identity_checks()
    ok = eps_dev < 1e-10 and contracted_dev < 1e-10
    failed |= not ok
    print(
        f"{'ok' if ok else 'FAIL'}: dipole trace identities over 256 index tuples "
        f"(eps={eps_dev:.2e}, contracted={contracted_dev:.2e})"
    )

    grid_err = quadrature_grid_max_relative_error()
    ok = grid_err < 1e-8
    failed |= not ok
    print(f"{'ok' if ok else 'FAIL'}: radial quadrature vs closed form (max rel err {grid_err:.2e})")

    slope = log_slope()
    target = 1.0 / (8 * math.pi**2)
    ok = abs(slope - target) / target < 0.01
    failed |= not ok
    print(f"{'ok' if ok else 'FAIL'}: log-cutoff slope {slope:.6e} vs {target:.6e}")

    print("selftest: " + ("pass" if not failed else "fail"))
    return 3 if failed else 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "compute":
            return _run_compute(args, reduce_multiplier=False)
        if args.command == "reduce-bf":
            return _run_compute(args, reduce_multiplier=True)
        if args.command == "check-quantization":
            return _run_check(args)
        return _run_selftest(args)
    except ModelFileError as exc:
        for diag in exc.diagnostics:
            print(f"{getattr(args, 'file', '<input>')}:{diag}", file=sys.stderr)
        return 1
    except RenormalizationIncompleteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ModelError, NotReducibleError, DomainError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
