"""Perturbative generators of the projected dynamics and the depolarization rate.

Twirling the propagator of ``L0 + coupling * L_I`` yields a one-parameter
(depolarizing) dynamics whose generator admits an asymptotic expansion in the
coupling.  Because the twirl of any power of a trace-annihilating generator
is a scalar multiple of the traceless projector Pi (and Pi is idempotent),
every expansion order collapses to ``scalar * Pi``; this module computes the
scalars three independent ways:

* :func:`cumulant_generator_k` - the order-k composition sum in closed form,
* :func:`second_order_generator_quadrature` - the order-2 time integral by
  composite Simpson quadrature, kept as a cross-check,
* :func:`depolarization_rate` - orders 0..2 from operator trace identities
  alone, with no superoperator ever built.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .gksl import GKSLSpec, analytic_traces, build_free_liouvillian, build_interaction_liouvillian
from .linalg import expm, sop_trace, superop_dim
from .twirl import projected_generator_scalar, traceless_projector

#: Largest supported expansion order: the composition sum has 2**(k-1) terms
#: with factorial coefficients, and double precision offers no verification
#: oracle beyond this.
ORDER_CAP = 12


def compositions(k: int) -> list[tuple[int, ...]]:
    """All ordered tuples of positive integers summing to k, lexicographic.

    There are exactly 2**(k-1) of them.
    """
    if not 1 <= k <= ORDER_CAP:
        raise ValueError(f"order must be in [1, {ORDER_CAP}], got {k}")
    out: list[tuple[int, ...]] = []

    def extend(prefix: tuple[int, ...], remaining: int) -> None:
        if remaining == 0:
            out.append(prefix)
            return
        for part in range(1, remaining + 1):
            extend(prefix + (part,), remaining - part)

    extend((), k)
    return out


@dataclass(frozen=True)
class CumulantTerm:
    """One composition term of the order-k generator.

    The term contributes ``sign * coefficient`` times the product of the
    projected powers listed in ``factor_powers``.
    """

    order: int
    sign: int
    coefficient: float
    factor_powers: tuple[int, ...]


def cumulant_terms(k: int) -> list[CumulantTerm]:
    """Signed, weighted composition terms of the order-k generator.

    A composition (k0, ..., kq) of k carries sign (-1)**q and coefficient
    1 / ((k0 - 1)! * k1! * ... * kq!); the first part is distinguished
    because it enters through the time derivative of the leading moment.
    """
    terms = []
    for parts in compositions(k):
        q = len(parts) - 1
        denom = factorial(parts[0] - 1)
        for part in parts[1:]:
            denom *= factorial(part)
        terms.append(CumulantTerm(order=k, sign=(-1) ** q, coefficient=1.0 / denom, factor_powers=parts))
    return terms


def _kahan_sum(values) -> complex:
    total = 0.0 + 0.0j
    comp = 0.0 + 0.0j
    for v in values:
        y = v - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def cumulant_scalar_k(li: np.ndarray, k: int) -> complex:
    """Time-independent scalar s.t. the order-k generator is
    ``(t - t0)**(k-1) * scalar * Pi``.

    With ``s_m = tr(L_I**m) / (n**2 - 1)`` the composition sum reduces to a
    signed sum of products of the s_m, accumulated in lexicographic order
    with compensated summation.
    """
    n = superop_dim(li)
    # cached powers of the interaction generator up to the requested order
    powers = [None, np.asarray(li, dtype=complex)]
    for _ in range(2, k + 1):
        powers.append(powers[-1] @ li)
    s = [None] + [sop_trace(powers[m]) / (n * n - 1) for m in range(1, k + 1)]

    def term_values():
        for term in cumulant_terms(k):
            prod = term.sign * term.coefficient
            for part in term.factor_powers:
                prod = prod * s[part]
            yield prod

    return _kahan_sum(term_values())


def cumulant_generator_k(
    li: np.ndarray, k: int, t: float, t0: float = 0.0
) -> tuple[np.ndarray, complex]:
    """Order-k generator of the projected dynamics and its Pi-coefficient.

    Returns ``(matrix, scalar)`` with ``matrix = scalar * Pi`` and
    ``scalar = (t - t0)**(k-1) * cumulant_scalar_k(li, k)``.  Requires a
    trace-annihilating interaction generator.
    """
    n = superop_dim(li)
    projected_generator_scalar(li)  # validates trace annihilation
    scalar = (t - t0) ** (k - 1) * cumulant_scalar_k(li, k)
    return scalar * traceless_projector(n), scalar


def simpson_matrix(f, a: float, b: float, panels: int) -> np.ndarray:
    """Composite Simpson quadrature of a matrix-valued function.

    Each of the ``panels`` parabolic segments spans two of the 2*panels
    uniform subintervals; the error decays as panels**-4 for smooth f.
    """
    if panels < 1:
        raise ValueError("panels must be >= 1")
    nodes = 2 * panels
    h = (b - a) / nodes
    total = np.asarray(f(a), dtype=complex) + np.asarray(f(b), dtype=complex)
    for i in range(1, nodes):
        w = 4.0 if i % 2 else 2.0
        total = total + w * np.asarray(f(a + i * h), dtype=complex)
    return total * (h / 3.0)


def second_order_generator_quadrature(
    l0: np.ndarray,
    li: np.ndarray,
    t: float,
    t0: float = 0.0,
    steps: int = 256,
) -> np.ndarray:
    """Order-2 generator as the explicit time integral, by Simpson quadrature.

    Integrates over t1 in [t0, t] the twirl of
    ``L_I e^{L0 (t - t1)} L_I e^{-L0 (t - t1)}`` minus the product of the
    twirls of its two factors.  For a depolarizing L0 the integrand is
    constant in t1 and the integral reproduces the closed-form order-2
    generator; the quadrature is kept as an independent cross-check of that
    collapse.
    """
    l0 = np.asarray(l0, dtype=complex)
    li = np.asarray(li, dtype=complex)

    def integrand(t1: float) -> np.ndarray:
        tau = t - t1
        forward = expm(l0 * tau)
        backward = expm(-l0 * tau)
        if not (np.all(np.isfinite(forward)) and np.all(np.isfinite(backward))):
            raise ValueError(f"free propagation is numerically singular at tau={tau}")
        dressed = forward @ li @ backward
        n = superop_dim(li)
        pi = traceless_projector(n)
        first = projected_generator_scalar(li @ dressed) * pi
        second = (projected_generator_scalar(li) * projected_generator_scalar(dressed)) * pi
        return first - second

    return simpson_matrix(integrand, t0, t, steps)


@dataclass(frozen=True)
class RateOrders:
    """Contributions of coupling orders 0, 1, 2 to the depolarization rate.

    ``order2`` carries the secular factor (t - t0); ``order0`` is the free
    rate (1 - p) * gamma and does not depend on time.
    """

    order0: float
    order1: float
    order2: float

    @property
    def total(self) -> float:
        return self.order0 + self.order1 + self.order2


def rate_coefficients(spec: GKSLSpec) -> tuple[float, float, float]:
    """Coupling-order coefficients (g0, g1, g2) of the depolarization rate.

    The rate at time t is ``g0 + coupling * g1 + coupling**2 * g2 * (t - t0)``
    up to third order.  All three come from :func:`analytic_traces`; with
    n2 = n**2:

        g0 = (1 - p) * gamma
        g1 = n2/(n2-1) * <G>
        g2 = n2/(n2-1) * (2 (<H^2> - <H>^2) - sum |<L_j L_k>|^2
                          - (1/2)<G^2> - (1/2)<G>^2)
             + n2**2/(n2-1)**2 * <G>^2
    """
    ids = analytic_traces(spec)
    n2 = spec.n * spec.n
    c = n2 / (n2 - 1.0)
    g0 = spec.free_rate
    g1 = c * ids.mean_g
    g2 = (
        c * (2.0 * ids.variance_h - ids.sum_abs_lj_lk - 0.5 * ids.mean_g2 - 0.5 * ids.mean_g**2)
        + c * c * ids.mean_g**2
    )
    return g0, g1, g2


def depolarization_rate(spec: GKSLSpec, t: float, t0: float = 0.0) -> RateOrders:
    """Per-order contributions to the depolarization rate at time t.

    Requires a gauge-normalized spec (enforced by the trace identities).
    """
    g0, g1, g2 = rate_coefficients(spec)
    lam = spec.coupling
    return RateOrders(order0=g0, order1=lam * g1, order2=lam * lam * g2 * (t - t0))


def assemble_projected_generator(
    spec: GKSLSpec, t: float, t0: float = 0.0, max_order: int = 2
) -> np.ndarray:
    """Projected generator ``L0 + sum_k coupling**k K_k(t)`` through max_order.

    Orders 0..2 use the closed-form rate (no superoperator products); higher
    orders add the composition-sum generators, up to the order cap.
    """
    if not 0 <= max_order <= ORDER_CAP:
        raise ValueError(f"max_order must be in [0, {ORDER_CAP}], got {max_order}")
    pi = traceless_projector(spec.n)
    if max_order == 0:
        return build_free_liouvillian(spec)
    if max_order <= 2:
        orders = depolarization_rate(spec, t, t0)
        rate = orders.order0 + orders.order1 + (orders.order2 if max_order == 2 else 0.0)
        return -rate * pi
    li = build_interaction_liouvillian(spec)
    total = -depolarization_rate(spec, t, t0).order0 * pi
    lam = spec.coupling
    for k in range(1, max_order + 1):
        _, scalar = cumulant_generator_k(li, k, t, t0)
        total = total + (lam**k * scalar) * pi
    return total
