"""Composition enumeration, cumulant generators, quadrature, and the rate formula."""

import numpy as np
import pytest

from depol.cumulant import (
    RateOrders,
    assemble_projected_generator,
    compositions,
    cumulant_generator_k,
    cumulant_scalar_k,
    cumulant_terms,
    depolarization_rate,
    rate_coefficients,
    second_order_generator_quadrature,
    simpson_matrix,
)
from depol.gksl import (
    GKSLSpec,
    build_free_liouvillian,
    build_interaction_liouvillian,
)
from depol.linalg import expm, sop_trace
from depol.random_ops import random_gksl, random_operator
from depol.twirl import project, project_generator, traceless_projector

from test_gksl import SIGMA_MINUS, two_level_spec


# ---------------------------------------------------------------------------
# compositions
# ---------------------------------------------------------------------------


def test_compositions_small_orders():
    assert compositions(1) == [(1,)]
    assert compositions(2) == [(1, 1), (2,)]
    assert compositions(3) == [(1, 1, 1), (1, 2), (2, 1), (3,)]


@pytest.mark.parametrize("k", [1, 2, 3, 5, 8, 12])
def test_compositions_count_and_order(k):
    comps = compositions(k)
    assert len(comps) == 2 ** (k - 1)
    assert len(set(comps)) == len(comps)
    assert comps == sorted(comps)
    assert all(sum(c) == k and min(c) >= 1 for c in comps)


def test_compositions_rejects_out_of_range():
    for bad in (0, -1, 13):
        with pytest.raises(ValueError):
            compositions(bad)


def test_cumulant_terms_order_two():
    terms = cumulant_terms(2)
    by_parts = {t.factor_powers: t for t in terms}
    assert by_parts[(2,)].sign == 1 and by_parts[(2,)].coefficient == pytest.approx(1.0)
    assert by_parts[(1, 1)].sign == -1 and by_parts[(1, 1)].coefficient == pytest.approx(1.0)


def test_cumulant_terms_coefficients_are_positive():
    for k in (3, 6):
        assert all(t.coefficient > 0 and t.sign in (-1, 1) for t in cumulant_terms(k))


# ---------------------------------------------------------------------------
# cumulant generators
# ---------------------------------------------------------------------------


def test_cumulant_k1_is_projected_generator():
    rng = np.random.default_rng(0)
    spec = random_gksl(2, rng)
    li = build_interaction_liouvillian(spec)
    mat, scalar = cumulant_generator_k(li, 1, t=2.3, t0=1.0)
    np.testing.assert_allclose(mat, project_generator(li), atol=1e-12)
    assert scalar == pytest.approx(sop_trace(li) / 3, abs=1e-12)


def test_cumulant_k2_closed_form():
    rng = np.random.default_rng(1)
    spec = random_gksl(3, rng)
    li = build_interaction_liouvillian(spec)
    t, t0 = 1.7, 0.4
    mat, _ = cumulant_generator_k(li, 2, t, t0)
    expected = (t - t0) * (project_generator(li @ li) - project_generator(li) @ project_generator(li))
    np.testing.assert_allclose(mat, expected, atol=1e-11)


def test_cumulant_scalars_vanish_when_projections_factorize():
    # if tr(L^k) = (tr L)**k / (n^2-1)**(k-1) the dynamics is effectively
    # scalar and every order beyond the first must vanish; the depolarizing
    # generator itself realizes this
    from depol.twirl import lambda_p

    l0 = 1.0 * (lambda_p(2, 0.3) - np.eye(4))
    for k in (2, 3, 4):
        assert abs(cumulant_scalar_k(l0, k)) < 1e-12


def test_projected_powers_lie_on_projector_line():
    rng = np.random.default_rng(2)
    spec = random_gksl(2, rng)
    li = build_interaction_liouvillian(spec)
    pi = traceless_projector(2)
    power = li.copy()
    for _ in range(4):
        projected = project(power)
        coeff = sop_trace(projected @ pi) / sop_trace(pi @ pi)
        assert np.linalg.norm(projected - coeff * pi) <= 1e-11
        power = power @ li


def test_cumulant_rejects_non_annihilating_input():
    rng = np.random.default_rng(3)
    with pytest.raises(ValueError):
        cumulant_generator_k(random_operator(4, rng), 2, 1.0)


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------


def test_simpson_converges_at_fourth_order():
    rng = np.random.default_rng(4)
    a = random_operator(3, rng)
    b = random_operator(3, rng)

    def f(t):
        return expm(a * np.sin(t)) @ b @ expm(-a * np.sin(t))

    reference = simpson_matrix(f, 0.0, 1.0, 4096)
    err = lambda panels: np.linalg.norm(simpson_matrix(f, 0.0, 1.0, panels) - reference)
    ratio = err(32) / err(64)
    assert 12.0 <= ratio <= 20.0


def test_quadrature_zero_interaction():
    spec = GKSLSpec(n=2, hamiltonian=np.zeros((2, 2)), jumps=(), coupling=0.0, gamma=1.0, p=0.1)
    out = second_order_generator_quadrature(
        build_free_liouvillian(spec), np.zeros((4, 4), dtype=complex), t=1.0, t0=0.0, steps=8
    )
    np.testing.assert_allclose(out, np.zeros((4, 4)), atol=1e-14)


def test_quadrature_matches_closed_form_amplitude_damping():
    spec = GKSLSpec(n=2, hamiltonian=np.zeros((2, 2)), jumps=(SIGMA_MINUS,), coupling=0.1, gamma=1.0, p=0.2)
    li = build_interaction_liouvillian(spec)
    l0 = build_free_liouvillian(spec)
    t, t0 = 0.9, 0.1
    quad = second_order_generator_quadrature(l0, li, t, t0, steps=64)
    closed, _ = cumulant_generator_k(li, 2, t, t0)
    assert np.linalg.norm(quad - closed) <= 1e-9


@pytest.mark.parametrize("n", [2, 3])
def test_quadrature_matches_closed_form_random(n):
    rng = np.random.default_rng(5)
    for _ in range(3):
        spec = random_gksl(n, rng)
        li = build_interaction_liouvillian(spec)
        l0 = build_free_liouvillian(spec)
        quad = second_order_generator_quadrature(l0, li, t=1.0, t0=0.0, steps=256)
        closed, _ = cumulant_generator_k(li, 2, 1.0, 0.0)
        assert np.linalg.norm(quad - closed) <= 1e-8


def test_collapse_property_inside_twirl():
    # twirl of e^{L0 a} L e^{L0 b} L e^{L0 c} with a+b+c = 0 equals the twirl
    # of L^2, independent of the split
    rng = np.random.default_rng(6)
    spec = random_gksl(2, rng)
    li = build_interaction_liouvillian(spec)
    l0 = build_free_liouvillian(spec)
    base = project(li @ li)
    for a, b in [(0.3, 0.5), (-0.4, 1.1), (0.0, -0.7)]:
        c = -a - b
        chain = expm(l0 * a) @ li @ expm(l0 * b) @ li @ expm(l0 * c)
        np.testing.assert_allclose(project(chain), base, atol=1e-11)


# ---------------------------------------------------------------------------
# depolarization rate
# ---------------------------------------------------------------------------


def test_rate_free_case():
    spec = GKSLSpec(n=2, hamiltonian=np.zeros((2, 2)), jumps=(), coupling=0.0, gamma=2.0, p=0.5)
    orders = depolarization_rate(spec, t=3.0, t0=1.0)
    assert orders == RateOrders(order0=1.0, order1=0.0, order2=0.0)


def test_rate_two_level_closed_form():
    # frozen closed form for the qubit model, derived from the trace
    # identities and confirmed against the exact propagator oracle:
    #   order1 coefficient = (4/3) (gamma0 (N + 1/2) + gamma_ph)
    #   order2 coefficient = [12 w0^2 - 16 gph^2 - g0^2 (2N+1)^2
    #                         + 8 (2N+1) g0 gph] / 18
    rng = np.random.default_rng(7)
    for _ in range(100):
        w0 = rng.uniform(-2, 2)
        g0, n_th, gph = rng.uniform(0, 2, size=3)
        lam = rng.uniform(0.01, 0.3)
        t, t0 = 1.9, 0.7
        spec = two_level_spec(w0, g0, n_th, gph, coupling=lam, gamma=1.0, p=0.0)
        orders = depolarization_rate(spec, t, t0)
        order1 = lam * (4.0 / 3.0) * (g0 * (n_th + 0.5) + gph)
        coef2 = (12 * w0**2 - 16 * gph**2 - g0**2 * (2 * n_th + 1) ** 2
                 + 8 * (2 * n_th + 1) * g0 * gph) / 18.0
        order2 = lam**2 * coef2 * (t - t0)
        assert orders.order0 == pytest.approx(1.0)
        assert orders.order1 == pytest.approx(order1, rel=1e-12, abs=1e-15)
        assert orders.order2 == pytest.approx(order2, rel=1e-12, abs=1e-15)


def test_rate_first_nonzero_correction_positive():
    rng = np.random.default_rng(8)
    for _ in range(50):
        kind = rng.integers(0, 3)
        spec = random_gksl(
            3,
            rng,
            jump_count=0 if kind == 0 else 2,
            hamiltonian_scale=0.0 if kind == 1 else 1.0,
        )
        orders = depolarization_rate(spec, t=1.5, t0=0.5)
        if orders.order1 > 0:
            continue
        assert orders.order1 == 0.0
        assert orders.order2 > 0.0


def test_rate_requires_normalized_gauge():
    spec = GKSLSpec(n=2, hamiltonian=np.zeros((2, 2)), jumps=(np.eye(2),), coupling=0.1)
    with pytest.raises(ValueError):
        depolarization_rate(spec, 1.0)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_rate_equals_superoperator_route(n):
    # same scalar from trace identities and from explicit twirled products
    rng = np.random.default_rng(9 + n)
    for _ in range(10):
        spec = random_gksl(n, rng, coupling=0.07)
        t, t0 = 1.3, 0.2
        li = build_interaction_liouvillian(spec)
        pi = traceless_projector(n)
        k1 = project_generator(li)
        k2 = (t - t0) * (project_generator(li @ li) - k1 @ k1)
        total = build_free_liouvillian(spec) + spec.coupling * k1 + spec.coupling**2 * k2
        scalar = -(sop_trace(total @ pi) / sop_trace(pi @ pi)).real
        assert depolarization_rate(spec, t, t0).total == pytest.approx(scalar, rel=1e-10)


# ---------------------------------------------------------------------------
# assembled projected generator
# ---------------------------------------------------------------------------


def test_assemble_order_zero_is_free_generator():
    rng = np.random.default_rng(13)
    spec = random_gksl(2, rng)
    np.testing.assert_allclose(
        assemble_projected_generator(spec, 1.0, 0.0, max_order=0),
        build_free_liouvillian(spec),
        atol=1e-12,
    )


def test_assemble_order_two_matches_rate_scalar():
    rng = np.random.default_rng(14)
    spec = random_gksl(3, rng, coupling=0.2)
    t, t0 = 2.0, 0.5
    gen = assemble_projected_generator(spec, t, t0, max_order=2)
    rate = depolarization_rate(spec, t, t0).total
    np.testing.assert_allclose(gen, -rate * traceless_projector(3), atol=1e-12)


def test_assemble_higher_order_extends_series():
    rng = np.random.default_rng(15)
    spec = random_gksl(2, rng, coupling=0.1)
    t, t0 = 1.0, 0.0
    li = build_interaction_liouvillian(spec)
    order2 = assemble_projected_generator(spec, t, t0, max_order=2)
    order3 = assemble_projected_generator(spec, t, t0, max_order=3)
    _, s3 = cumulant_generator_k(li, 3, t, t0)
    np.testing.assert_allclose(order3 - order2, (0.1**3 * s3) * traceless_projector(2), atol=1e-12)


def test_assemble_rejects_orders_beyond_cap():
    rng = np.random.default_rng(16)
    spec = random_gksl(2, rng)
    with pytest.raises(ValueError):
        assemble_projected_generator(spec, 1.0, 0.0, max_order=13)


def test_rate_coefficients_time_structure():
    # order-0 is constant in t, order-1 constant, order-2 linear in (t - t0)
    rng = np.random.default_rng(17)
    spec = random_gksl(2, rng, coupling=0.11)
    g0, g1, g2 = rate_coefficients(spec)
    for t in (0.5, 1.5):
        orders = depolarization_rate(spec, t, t0=0.25)
        assert orders.order0 == pytest.approx(g0)
        assert orders.order1 == pytest.approx(0.11 * g1)
        assert orders.order2 == pytest.approx(0.11**2 * g2 * (t - 0.25))
