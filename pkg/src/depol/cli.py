"""Command-line surface: project, rate, sweep, twirl-mc, verify.

All commands read a spec file, validate it completely before computing, and
emit deterministic CSV (17 significant digits) to stdout or ``--out``.  The
report-producing commands optionally render a figure to a file with
``--plot``.  Exit codes: 0 success, 1 property failure (verify), 2 input
error.  The environment variable ``DEPOL_THREADS`` caps worker threads;
results do not depend on it.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

import numpy as np

from .cumulant import depolarization_rate
from .dynamics import RateUnderflowError, build_rate_report, exact_rate, full_propagator
from .linalg import is_trace_preserving
from .report import csv_text, fmt, write_output
from .specfile import LoadedSpec, SpecFileError, load_spec_file, load_superoperator_file
from .twirl import (
    DepolarizingParams,
    entanglement_fidelity,
    monte_carlo_twirl_curve,
    p_of,
    project,
)
from .verify import SUITES, run_suites


def _note(message: str) -> None:
    print(message, file=sys.stderr)


def _load(args) -> LoadedSpec:
    loaded = load_spec_file(args.spec)
    if loaded.gauge_shift > 0:
        _note(
            f"note: jump operators were gauge-normalized on load "
            f"(largest |Tr L_j| removed: {fmt(loaded.gauge_shift)})"
        )
    return loaded


def _seed(args, loaded: LoadedSpec) -> int:
    return loaded.seed if args.seed is None else args.seed


def cmd_project(args) -> int:
    loaded = _load(args)
    if args.channel_matrix:
        phi = load_superoperator_file(args.channel_matrix, expected_n=loaded.gksl.n)
    else:
        phi = full_propagator(loaded.gksl, loaded.t1, loaded.t0)

    n = loaded.gksl.n
    trace_preserving = is_trace_preserving(phi, args.tol)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        p = p_of(phi, args.tol)
        fidelity = entanglement_fidelity(phi, args.tol)
    params = DepolarizingParams(n, p)

    rows = [
        ("n", n),
        ("p_re", p.real),
        ("p_im", p.imag),
        ("entanglement_fidelity", fidelity),
        ("is_channel", params.is_channel),
        ("trace_preserving", trace_preserving),
    ]
    if args.mc_check:
        samples = args.samples or loaded.mc_samples or 10_000
        estimate = monte_carlo_twirl_curve(phi, [samples], _seed(args, loaded))[-1][1]
        distance = float(np.linalg.norm(estimate - project(phi)))
        rows.append(("mc_samples", samples))
        rows.append(("mc_distance", distance))
    write_output(csv_text(("quantity", "value"), rows), args.out)
    return 0


def cmd_rate(args) -> int:
    loaded = _load(args)
    report = build_rate_report(loaded.gksl, loaded.time_grid())
    header = (
        "t",
        "p_exact",
        "p_order2",
        "gamma_exact",
        "gamma_tilde_0",
        "gamma_tilde_1",
        "gamma_tilde_2",
        "residual",
        "status",
    )
    rows = [
        (
            report.times[i],
            report.p_exact[i],
            report.p_order2[i],
            report.gamma_exact[i],
            report.order0[i],
            report.order1[i],
            report.order2[i],
            report.residual[i],
            report.status[i],
        )
        for i in range(len(report.times))
    ]
    write_output(csv_text(header, rows), args.out)
    if args.plot:
        from .plotting import save_rate_figure

        save_rate_figure(report, args.plot)
    return 0


def _parse_lambda_list(text: str) -> list[float]:
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise SpecFileError(f"--lambda-list: {exc}") from exc
    if not values:
        raise SpecFileError("--lambda-list: empty list")
    if any(not np.isfinite(v) or v < 0 for v in values):
        raise SpecFileError("--lambda-list: values must be finite and >= 0")
    if any(a <= b for a, b in zip(values, values[1:])):
        raise SpecFileError("--lambda-list: values must be strictly decreasing")
    return values


def cmd_sweep(args) -> int:
    loaded = _load(args)
    lambdas = _parse_lambda_list(args.lambda_list)
    t, t0 = loaded.t1, loaded.t0

    residuals = []
    exacts = []
    tildes = []
    for lam in lambdas:
        spec = replace(loaded.gksl, coupling=lam)
        tilde = depolarization_rate(spec, t, t0).total
        try:
            exact = exact_rate(spec, t, t0)
            residual = abs(exact - tilde)
        except RateUnderflowError:
            exact, residual = float("nan"), float("nan")
        exacts.append(exact)
        tildes.append(tilde)
        residuals.append(residual)

    rows = []
    for i, lam in enumerate(lambdas):
        ratio = "" if i == 0 else _ratio(residuals[i - 1], residuals[i])
        rows.append((lam, exacts[i], tildes[i], residuals[i], ratio))
    write_output(csv_text(("lambda", "gamma_exact", "gamma_tilde", "residual", "ratio"), rows), args.out)
    if args.plot:
        from .plotting import save_sweep_figure

        save_sweep_figure(lambdas, residuals, args.plot)
    return 0


def _ratio(previous: float, current: float) -> str:
    if not np.isfinite(previous) or not np.isfinite(current):
        return "nan"
    if current == 0.0:
        return "inf"
    return fmt(previous / current)


def cmd_twirl_mc(args) -> int:
    loaded = _load(args)
    samples = args.samples or loaded.mc_samples
    if samples is None:
        raise SpecFileError("twirl-mc needs --samples or mc_samples in the spec file")
    if samples < 1:
        raise SpecFileError(f"--samples: expected a positive count, got {samples}")
    phi = full_propagator(loaded.gksl, loaded.t1, loaded.t0)
    checkpoints = sorted({max(1, samples // 100), max(1, samples // 10), samples})
    curve = monte_carlo_twirl_curve(phi, checkpoints, _seed(args, loaded))
    target = project(phi)
    rows = [(count, float(np.linalg.norm(est - target))) for count, est in curve]
    write_output(csv_text(("samples", "frobenius_distance"), rows), args.out)
    if args.plot:
        from .plotting import save_mc_figure

        save_mc_figure([r[0] for r in rows], [r[1] for r in rows], args.plot)
    return 0


def cmd_verify(args) -> int:
    loaded = _load(args)
    results = run_suites(loaded, args.suite, _seed(args, loaded))
    rows = [(r.suite, r.name, r.status, r.observed, r.bound) for r in results]
    write_output(csv_text(("suite", "check", "status", "observed", "bound"), rows), args.out)

    failed = [r for r in results if not r.passed]
    for r in results:
        _note(f"{r.status}  {r.suite}/{r.name}  observed={fmt(r.observed)} bound={fmt(r.bound)}")
    _note(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--spec", required=True, help="spec file (JSON, schema version 1)")
    parser.add_argument("--out", default=None, help="output file (default: stdout)")
    parser.add_argument("--seed", type=int, default=None, help="override the spec file seed")
    parser.add_argument("--tol", type=float, default=1e-10, help="validation tolerance")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="depol",
        description="Depolarizing dynamics, unitary twirling, and perturbative depolarization rates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("project", help="twirl a channel and report its depolarizing parameter")
    _add_common(p)
    p.add_argument("--channel-matrix", default=None, help="superoperator matrix file (default: spec propagator)")
    p.add_argument("--mc-check", action="store_true", help="cross-check with Monte-Carlo twirling")
    p.add_argument("--samples", type=int, default=None, help="Monte-Carlo sample count")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("rate", help="perturbative vs exact depolarization rate on the time grid")
    _add_common(p)
    p.add_argument("--plot", default=None, help="also render a figure to this file")
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("sweep", help="rate residuals over a decreasing coupling list")
    _add_common(p)
    p.add_argument("--lambda-list", required=True, help="comma-separated decreasing couplings")
    p.add_argument("--plot", default=None, help="also render a figure to this file")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("twirl-mc", help="Monte-Carlo twirl convergence of the spec propagator")
    _add_common(p)
    p.add_argument("--samples", type=int, default=None, help="total Monte-Carlo samples")
    p.add_argument("--plot", default=None, help="also render a figure to this file")
    p.set_defaults(func=cmd_twirl_mc)

    p = sub.add_parser("verify", help="run property suites; exit 0 iff everything passes")
    _add_common(p)
    p.add_argument("--suite", choices=SUITES, default="all")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpecFileError as exc:
        _note(f"error: {exc}")
        return 2
    except OSError as exc:
        _note(f"error: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
