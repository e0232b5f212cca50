"""The seeded generators deliver what they promise."""

import numpy as np

from depol.linalg import is_cptp, is_trace_annihilating, is_trace_preserving
from depol.random_ops import (
    random_cptp,
    random_density,
    random_gksl,
    random_hermitian,
    random_trace_annihilating,
    random_trace_preserving,
    random_traceless,
)


def test_generators_are_seed_deterministic():
    a = random_cptp(3, np.random.default_rng(5))
    b = random_cptp(3, np.random.default_rng(5))
    assert np.array_equal(a, b)


def test_random_cptp_is_cptp():
    rng = np.random.default_rng(1)
    for n in (2, 3, 4):
        assert is_cptp(random_cptp(n, rng))


def test_random_trace_preserving_is_tp_not_cp():
    rng = np.random.default_rng(2)
    m = random_trace_preserving(3, rng, generator_weight=1.0)
    assert is_trace_preserving(m, 1e-10)


def test_random_trace_annihilating():
    rng = np.random.default_rng(3)
    assert is_trace_annihilating(random_trace_annihilating(4, rng), 1e-12)


def test_random_hermitian_and_traceless():
    rng = np.random.default_rng(4)
    h = random_hermitian(3, rng)
    assert np.allclose(h, h.conj().T)
    l = random_traceless(3, rng)
    assert abs(np.trace(l)) < 1e-14


def test_random_density_is_a_state():
    rng = np.random.default_rng(5)
    rho = random_density(3, rng)
    assert np.trace(rho) == 1.0 or abs(np.trace(rho) - 1) < 1e-14
    assert np.linalg.eigvalsh(rho).min() > -1e-14


def test_random_gksl_is_normalized_with_bounded_params():
    rng = np.random.default_rng(6)
    spec = random_gksl(3, rng)
    assert spec.is_gauge_normalized
    assert spec.gamma > 0
    assert -1.0 / 8.0 <= spec.p <= 1.0
