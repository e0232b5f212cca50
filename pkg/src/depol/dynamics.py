"""Exact dynamics oracle and the solver for the projected master equation.

The full generator is time independent, so the exact propagator is a single
matrix exponential; everything perturbative in this library is ultimately
checked against it.  Under the twirl the propagator collapses to the
depolarizing family, so the projected state of the dynamics is one scalar
``p(t) = (tr Phi(t, t0) - 1) / (n**2 - 1)`` and the exact instantaneous
depolarization rate is ``-d/dt ln p(t)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cumulant import ORDER_CAP, RateOrders, cumulant_scalar_k, depolarization_rate, rate_coefficients
from .gksl import GKSLSpec, build_interaction_liouvillian, full_generator
from .linalg import expm, sop_trace
from .twirl import lambda_p

#: p values below this are treated as depolarized past resolvability: the
#: logarithmic derivative can no longer be extracted from double precision.
P_FLOOR = 1e-8


class RateUnderflowError(ValueError):
    """Raised when p(t) is too small (or nonpositive) to resolve a rate."""


@dataclass(frozen=True)
class Trajectory:
    """Projected-parameter trajectory p(t) on a time grid."""

    t0: float
    times: np.ndarray
    p_values: np.ndarray
    propagators: tuple[np.ndarray, ...] | None = None


def free_propagator(spec: GKSLSpec, t: float, t0: float = 0.0) -> np.ndarray:
    """Closed form of the free propagator: ``lambda_{exp(-(1-p) gamma (t-t0))}``."""
    return lambda_p(spec.n, np.exp(-spec.free_rate * (t - t0)))


def full_propagator(spec: GKSLSpec, t: float, t0: float = 0.0) -> np.ndarray:
    """Exact propagator ``expm((L0 + coupling L_I)(t - t0))``."""
    return expm(full_generator(spec) * (t - t0))


def exact_p(spec: GKSLSpec, t: float, t0: float = 0.0) -> float:
    """Exact projected parameter ``(tr Phi(t, t0) - 1) / (n**2 - 1)``.

    Computed from the superoperator trace of the propagator; no projection is
    performed, so there is no projection round-off.
    """
    n2 = spec.n * spec.n
    val = (sop_trace(full_propagator(spec, t, t0)) - 1.0) / (n2 - 1)
    return float(val.real)


def exact_p_trajectory(
    spec: GKSLSpec, times, store_propagators: bool = False
) -> Trajectory:
    """Exact p(t) on an increasing grid whose first point is t0."""
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 1 or np.any(np.diff(times) <= 0):
        raise ValueError("times must be a strictly increasing 1-d grid")
    t0 = float(times[0])
    props = tuple(full_propagator(spec, t, t0) for t in times)
    n2 = spec.n * spec.n
    p_vals = np.array([(sop_trace(m) - 1.0).real / (n2 - 1) for m in props])
    return Trajectory(
        t0=t0,
        times=times,
        p_values=p_vals,
        propagators=props if store_propagators else None,
    )


def _default_dt(spec: GKSLSpec) -> float:
    rate0 = spec.free_rate
    return 1e-3 / rate0 if rate0 > 0 else 1e-3


def exact_rate(spec: GKSLSpec, t: float, t0: float = 0.0, dt: float | None = None) -> float:
    """Exact instantaneous depolarization rate ``-d/dt ln p(t)``.

    Central finite difference of ln p with Richardson extrapolation over the
    two step sizes dt and dt/2 (error O(dt**4)).  The default step is 1e-3
    of the free characteristic time.
    """
    if dt is None:
        dt = _default_dt(spec)

    def logp(tt: float) -> float:
        p = exact_p(spec, tt, t0)
        if p <= P_FLOOR:
            raise RateUnderflowError(
                f"p({tt}) = {p:.3e} is below the resolvable floor {P_FLOOR:.0e}"
            )
        return np.log(p)

    def central(h: float) -> float:
        return -(logp(t + h) - logp(t - h)) / (2.0 * h)

    coarse = central(dt)
    fine = central(dt / 2.0)
    return (4.0 * fine - coarse) / 3.0


def _rate_polynomial_coefficients(spec: GKSLSpec, max_order: int) -> list[float]:
    """Coefficients c_k with rate(t) = c_0 + sum_k c_k (t-t0)**(k-1) * lam**k.

    Index k of the returned list is the coupling order; orders 0..2 use the
    closed-form rate, higher orders the composition-sum scalars.
    """
    if not 0 <= max_order <= ORDER_CAP:
        raise ValueError(f"max_order must be in [0, {ORDER_CAP}], got {max_order}")
    g0, g1, g2 = rate_coefficients(spec) if max_order >= 1 else (spec.free_rate, 0.0, 0.0)
    coeffs = [g0, g1, g2][: max_order + 1]
    if max_order > 2:
        li = build_interaction_liouvillian(spec)
        for k in range(3, max_order + 1):
            coeffs.append(-cumulant_scalar_k(li, k).real)
    return coeffs


def solve_projected_ode(spec: GKSLSpec, times, max_order: int = 2) -> Trajectory:
    """Solve ``dp/dt = -rate(t) p`` with p(t0) = 1 for the expanded rate.

    The expanded rate is polynomial in (t - t0), so the integral is exact:
    ``p(t) = exp(-sum_k c_k lam**k (t-t0)**k / k)`` plus the free term.  For
    a rate that is not polynomial use :func:`integrate_rate_ode`.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 1 or np.any(np.diff(times) <= 0):
        raise ValueError("times must be a strictly increasing 1-d grid")
    t0 = float(times[0])
    coeffs = _rate_polynomial_coefficients(spec, max_order)
    lam = spec.coupling
    delta = times - t0
    integral = coeffs[0] * delta
    for k in range(1, len(coeffs)):
        integral = integral + (lam**k * coeffs[k] / k) * delta**k
    return Trajectory(t0=t0, times=times, p_values=np.exp(-integral))


def integrate_rate_ode(rate_fn, times, substeps: int = 16) -> np.ndarray:
    """RK4 fallback for ``dp/dt = -rate(t) p`` with a general rate callable."""
    times = np.asarray(times, dtype=float)
    p = 1.0
    out = [p]
    for a, b in zip(times[:-1], times[1:]):
        h = (b - a) / substeps
        t = a
        for _ in range(substeps):
            k1 = -rate_fn(t) * p
            k2 = -rate_fn(t + h / 2) * (p + h / 2 * k1)
            k3 = -rate_fn(t + h / 2) * (p + h / 2 * k2)
            k4 = -rate_fn(t + h) * (p + h * k3)
            p = p + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            t += h
        out.append(p)
    return np.asarray(out)


@dataclass(frozen=True)
class RateReport:
    """Per-grid-point perturbative and exact depolarization rates.

    ``status`` is "ok" for resolvable rows and "p_underflow" where the exact
    rate could not be extracted; those rows carry NaN in the exact columns.
    """

    times: np.ndarray
    p_exact: np.ndarray
    p_order2: np.ndarray
    gamma_exact: np.ndarray
    order0: np.ndarray
    order1: np.ndarray
    order2: np.ndarray
    residual: np.ndarray
    status: tuple[str, ...]


def build_rate_report(spec: GKSLSpec, times, dt: float | None = None) -> RateReport:
    """Assemble the full rate report used by the command-line ``rate`` surface."""
    times = np.asarray(times, dtype=float)
    t0 = float(times[0])
    exact_traj = exact_p_trajectory(spec, times)
    order2_traj = solve_projected_ode(spec, times, max_order=2)

    rows0, rows1, rows2, exact, residual, status = [], [], [], [], [], []
    for t in times:
        orders: RateOrders = depolarization_rate(spec, t, t0)
        rows0.append(orders.order0)
        rows1.append(orders.order1)
        rows2.append(orders.order2)
        try:
            g = exact_rate(spec, float(t), t0, dt)
            exact.append(g)
            residual.append(g - orders.total)
            status.append("ok")
        except RateUnderflowError:
            exact.append(np.nan)
            residual.append(np.nan)
            status.append("p_underflow")
    return RateReport(
        times=times,
        p_exact=exact_traj.p_values,
        p_order2=order2_traj.p_values,
        gamma_exact=np.asarray(exact),
        order0=np.asarray(rows0),
        order1=np.asarray(rows1),
        order2=np.asarray(rows2),
        residual=np.asarray(residual),
        status=tuple(status),
    )
