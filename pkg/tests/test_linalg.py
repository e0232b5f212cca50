"""Vectorization, sandwich maps, trace functionals, and the matrix exponential."""

import numpy as np
import pytest
import scipy.linalg

from depol.linalg import (
    apply_superop,
    chaotic_average,
    choi_matrix,
    expm,
    identity_superop,
    is_completely_positive,
    is_cptp,
    is_trace_preserving,
    op_trace_of_image,
    sandwich,
    sop_trace,
    unvec,
    vec,
)
from depol.random_ops import random_cptp, random_operator
from depol.twirl import lambda_p

SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)


def test_vec_identity_column_stacking():
    assert np.array_equal(vec(np.eye(2)), np.array([1, 0, 0, 1]))


def test_vec_single_matrix_unit():
    # |0><1| has its single entry at row 0, column 1: column stacking puts it
    # at index 0 + 2*1 = 2
    e01 = np.zeros((2, 2))
    e01[0, 1] = 1.0
    assert np.array_equal(vec(e01), np.array([0, 0, 1, 0]))


@pytest.mark.parametrize("n", [2, 3, 5])
def test_vec_round_trip_exact(n):
    rng = np.random.default_rng(7)
    x = random_operator(n, rng)
    assert np.array_equal(unvec(vec(x)), x)


def test_sandwich_identity_is_identity_superop():
    eye = np.eye(3)
    assert np.array_equal(sandwich(eye, eye), identity_superop(3))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_sandwich_matches_direct_product(n):
    rng = np.random.default_rng(11)
    a, b, x = (random_operator(n, rng) for _ in range(3))
    np.testing.assert_allclose(apply_superop(sandwich(a, b), x), a @ x @ b, atol=1e-13)
    np.testing.assert_allclose(sandwich(a, b), np.kron(b.T, a), atol=0)


def test_sandwich_dimension_mismatch():
    with pytest.raises(ValueError):
        sandwich(np.eye(2), np.eye(3))


def test_sop_trace_of_identity():
    assert sop_trace(identity_superop(2)) == pytest.approx(4.0)


@pytest.mark.parametrize("n,p", [(2, 0.3), (3, -0.1 + 0.2j), (4, 1.0)])
def test_sop_trace_of_depolarizing(n, p):
    assert sop_trace(lambda_p(n, p)) == pytest.approx(p * n * n + (1 - p), abs=1e-13)


def test_sop_trace_of_sandwich_is_trace_product():
    rng = np.random.default_rng(13)
    a, b = random_operator(3, rng), random_operator(3, rng)
    assert sop_trace(sandwich(a, b)) == pytest.approx(np.trace(a) * np.trace(b), abs=1e-12)
    assert sop_trace(sandwich(b, b.conj().T)) == pytest.approx(abs(np.trace(b)) ** 2, abs=1e-12)


def test_sop_trace_elementwise_definition():
    # sum_{k,m} <k| Phi(|k><m|) |m> computed literally
    rng = np.random.default_rng(17)
    n = 3
    m = random_operator(n * n, rng)
    total = 0.0
    for k in range(n):
        for mm in range(n):
            unit = np.zeros((n, n), dtype=complex)
            unit[k, mm] = 1.0
            total += apply_superop(m, unit)[k, mm]
    assert sop_trace(m) == pytest.approx(total, abs=1e-12)


def test_sop_trace_of_composition_is_matrix_product_trace():
    rng = np.random.default_rng(19)
    a = random_operator(9, rng)
    b = random_operator(9, rng)
    assert sop_trace(a @ b) == pytest.approx(np.trace(a @ b), abs=1e-12)


def test_op_trace_of_image():
    assert op_trace_of_image(identity_superop(3)) == pytest.approx(3.0)
    assert op_trace_of_image(lambda_p(4, 0.37)) == pytest.approx(4.0, abs=1e-13)
    rng = np.random.default_rng(23)
    a, b = random_operator(3, rng), random_operator(3, rng)
    assert op_trace_of_image(sandwich(a, b)) == pytest.approx(np.trace(a @ b), abs=1e-12)


def test_chaotic_average():
    assert chaotic_average(np.eye(4)) == pytest.approx(1.0)
    assert chaotic_average(SIGMA_Z) == pytest.approx(0.0)
    # sigma_+ sigma_- = diag(1, 0)
    assert chaotic_average(np.diag([1.0, 0.0])) == pytest.approx(0.5)


def test_expm_zero_and_diagonal():
    assert np.array_equal(expm(np.zeros((3, 3))), np.eye(3))
    d = expm(np.diag([0.3, -1.2 + 0.4j]))
    np.testing.assert_allclose(np.diag(d), np.exp([0.3, -1.2 + 0.4j]), rtol=1e-14)


@pytest.mark.parametrize("scale", [0.1, 1.0, 10.0, 60.0])
def test_expm_matches_scipy(scale):
    rng = np.random.default_rng(29)
    m = scale * random_operator(6, rng)
    ours = expm(m)
    reference = scipy.linalg.expm(m)
    np.testing.assert_allclose(ours, reference, rtol=1e-11, atol=1e-11 * np.linalg.norm(reference))


def test_expm_scalar_shift_property():
    rng = np.random.default_rng(31)
    m = random_operator(4, rng)
    c = 0.7 - 0.3j
    lhs = expm(m + c * np.eye(4))
    rhs = np.exp(c) * expm(m)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-10)


def test_expm_rejects_nonsquare_and_nonfinite():
    with pytest.raises(ValueError):
        expm(np.ones((2, 3)))
    bad = np.full((2, 2), np.inf)
    with pytest.raises(ValueError):
        expm(bad)


def test_is_trace_preserving():
    assert is_trace_preserving(lambda_p(3, 0.4 + 1.1j))
    rng = np.random.default_rng(37)
    a = random_operator(2, rng)
    assert not is_trace_preserving(sandwich(a, np.eye(2)))


def test_cptp_of_random_channel():
    rng = np.random.default_rng(41)
    m = random_cptp(3, rng)
    assert is_cptp(m)
    assert is_completely_positive(m)


def test_choi_blocks_are_images_of_matrix_units():
    rng = np.random.default_rng(43)
    n = 3
    m = random_operator(n * n, rng)
    choi = choi_matrix(m)
    unit = np.zeros((n, n), dtype=complex)
    unit[1, 2] = 1.0
    np.testing.assert_allclose(choi[n : 2 * n, 2 * n : 3 * n], apply_superop(m, unit), atol=1e-14)
