"""Depolarizing channels and twirling over the full unitary group.

The depolarizing family ``lambda_p``, ``X -> p X + (1-p) (I/n) Tr X``, is the
image of every trace-preserving superoperator under the Haar twirl

    project(Phi) = integral over U(n) of  U^dag Phi(U . U^dag) U  dU,

which has the closed two-coefficient form implemented by :func:`project`.
``monte_carlo_twirl`` estimates the same integral by sampling Haar unitaries
and is the independent check on the closed form.

A note on commutators with generators: for a trace-annihilating L the two
composition rules are ``lambda_p . L = p L`` and
``L . lambda_p = p L + (1-p) (L(I)/n) Tr(.)``, hence

    [L, lambda_p] = (1-p) (L(I)/n) Tr(.).

A prefactor of p(1-p) is sometimes quoted for this commutator; it is
inconsistent with the two composition rules above, and the tests here pin
the (1-p) form.
"""

from __future__ import annotations

import concurrent.futures
import os
import warnings
from dataclasses import dataclass

import numpy as np

from .linalg import (
    DEFAULT_ATOL,
    apply_superop,
    identity_superop,
    is_completely_positive,
    is_hermitian,
    is_trace_annihilating,
    is_trace_preserving,
    op_trace_of_image,
    sop_trace,
    superop_dim,
    vec_identity,
)

#: Number of Monte-Carlo samples drawn per RNG block.  Blocks have their own
#: deterministically spawned seeds, so results do not depend on thread count.
_MC_BLOCK = 1024


def channel_p_range(n: int) -> tuple[float, float]:
    """Range of p for which lambda_p is a channel: [-1/(n**2-1), 1]."""
    return (-1.0 / (n * n - 1), 1.0)


@dataclass(frozen=True)
class DepolarizingParams:
    """The scalar parameter and dimension that fully describe a twirled map."""

    dim: int
    p: complex

    @property
    def is_channel(self) -> bool:
        lo, hi = channel_p_range(self.dim)
        return abs(self.p.imag) <= DEFAULT_ATOL and lo - DEFAULT_ATOL <= self.p.real <= hi + DEFAULT_ATOL

    def to_superoperator(self) -> np.ndarray:
        return lambda_p(self.dim, self.p)


def mixing_map(n: int) -> np.ndarray:
    """Superoperator of ``X -> (I/n) Tr X`` (the completely depolarizing map)."""
    vi = vec_identity(n)
    return np.outer(vi, vi).astype(complex) / n


def traceless_projector(n: int) -> np.ndarray:
    """The idempotent ``identity - mixing_map``; kernel of every projected generator."""
    return identity_superop(n) - mixing_map(n)


def lambda_p(n: int, p: complex) -> np.ndarray:
    """Matrix of the depolarizing map ``X -> p X + (1-p) (I/n) Tr X``.

    p may be any complex number; whether the map is a channel is a separate
    question answered by :class:`DepolarizingParams`.
    """
    if not 2 <= n:
        raise ValueError(f"dimension must be >= 2, got {n}")
    return p * identity_superop(n) + (1.0 - p) * mixing_map(n)


def lambda_compose(a: DepolarizingParams, b: DepolarizingParams) -> DepolarizingParams:
    """Semigroup composition: lambda_p . lambda_q == lambda_{p q}."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return DepolarizingParams(a.dim, a.p * b.p)


def project(m: np.ndarray) -> np.ndarray:
    """Twirl of a superoperator over the full unitary group, in closed form.

    project(Phi) X = a (Tr X) I + b X  with

        a = (n Tr(Phi(I)) - tr Phi) / (n (n**2 - 1)),
        b = (n tr Phi - Tr(Phi(I))) / (n (n**2 - 1)),

    where tr is the superoperator trace.  The form is total: it applies to
    arbitrary superoperators, and reduces to ``lambda_p(n, p_of(Phi))`` for
    trace-preserving input.
    """
    n = superop_dim(m)
    tr_s = sop_trace(m)
    tr_img = op_trace_of_image(m)
    denom = n * (n * n - 1)
    a = (n * tr_img - tr_s) / denom
    b = (n * tr_s - tr_img) / denom
    return b * identity_superop(n) + (a * n) * mixing_map(n)


def p_of(m: np.ndarray, tol: float = DEFAULT_ATOL) -> complex:
    """Depolarizing parameter ``(tr Phi - 1) / (n**2 - 1)`` of the twirl.

    Warns (but still answers) when Phi is not trace preserving, since the
    two-coefficient form of :func:`project` remains valid there while the
    single-parameter description does not.
    """
    n = superop_dim(m)
    if not is_trace_preserving(m, tol):
        warnings.warn(
            "p_of called on a superoperator that is not trace preserving; "
            "project() still applies but its image is not lambda_p",
            stacklevel=2,
        )
    return (sop_trace(m) - 1.0) / (n * n - 1)


def project_generator(m: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Twirl of a trace-annihilating generator.

    For Tr L(X) == 0 the closed form collapses to a rank-deficient multiple
    of the traceless projector:

        project(L) = (tr L / (n**2 - 1)) * (identity - mixing_map).

    Rejects input that does not annihilate traces.
    """
    n = superop_dim(m)
    scale = max(1.0, float(np.max(np.abs(m))))
    if not is_trace_annihilating(m, tol * scale):
        raise ValueError("project_generator requires a trace-annihilating superoperator")
    return (sop_trace(m) / (n * n - 1)) * traceless_projector(n)


def projected_generator_scalar(m: np.ndarray, tol: float = 1e-8) -> complex:
    """Coefficient of the traceless projector in :func:`project_generator`."""
    n = superop_dim(m)
    scale = max(1.0, float(np.max(np.abs(m))))
    if not is_trace_annihilating(m, tol * scale):
        raise ValueError("projected_generator_scalar requires a trace-annihilating superoperator")
    return sop_trace(m) / (n * n - 1)


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def haar_sample(n: int, rng) -> np.ndarray:
    """One Haar-distributed unitary: Ginibre matrix, QR, R-diagonal phase fix.

    Plain QR of a Ginibre matrix is not Haar; multiplying each column of Q by
    the phase of the corresponding diagonal entry of R makes the
    decomposition unique and the distribution exactly Haar.
    """
    return haar_samples(n, 1, rng)[0]


def haar_samples(n: int, count: int, rng) -> np.ndarray:
    """Stack of ``count`` independent Haar unitaries, shape (count, n, n)."""
    gen = _as_rng(rng)
    z = (gen.standard_normal((count, n, n)) + 1j * gen.standard_normal((count, n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.einsum("aii->ai", r)
    phases = np.where(np.abs(d) > 0, d / np.abs(np.where(np.abs(d) > 0, d, 1.0)), 1.0)
    return q * phases[:, None, :]


def _kron_batch(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    count, n = a.shape[0], a.shape[1]
    return np.einsum("aij,akl->aikjl", a, b).reshape(count, n * n, n * n)


def _twirl_block_sum(m: np.ndarray, count: int, seed_seq: np.random.SeedSequence) -> np.ndarray:
    """Sum over ``count`` samples of U^dag Phi(U . U^dag) U as matrices."""
    n = superop_dim(m)
    gen = np.random.Generator(np.random.PCG64(seed_seq))
    total = np.zeros_like(np.asarray(m, dtype=complex))
    # chunk the batched kron products to cap the working set at ~64 MB
    chunk = max(1, (1 << 22) // (16 * n**4))
    done = 0
    while done < count:
        take = min(chunk, count - done)
        u = haar_samples(n, take, gen)
        udag = u.conj().transpose(0, 2, 1)
        left = _kron_batch(u.transpose(0, 2, 1), udag)  # sandwich(U^dag, U)
        right = _kron_batch(u.conj(), u)  # sandwich(U, U^dag)
        total += np.einsum("aij,jk,akl->il", left, m, right, optimize=True)
        done += take
    return total


def _thread_count(threads: int | None) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("DEPOL_THREADS")
    if env:
        return max(1, int(env))
    return 1


def monte_carlo_twirl_curve(
    m: np.ndarray,
    checkpoints,
    seed: int,
    threads: int | None = None,
) -> list[tuple[int, np.ndarray]]:
    """Running Monte-Carlo twirl estimates at the given sample counts.

    One sample stream is used; the estimate at checkpoint N averages its
    first N samples.  The stream is split into blocks with sub-seeds spawned
    deterministically from ``seed``; blocks may be evaluated on a thread pool
    but are reduced in block order, so the result depends only on
    (checkpoints, seed).
    """
    counts = sorted({int(c) for c in checkpoints})
    if not counts or counts[0] < 1:
        raise ValueError("checkpoints must be positive sample counts")
    edges = [0]
    for c in counts:
        while edges[-1] < c:
            edges.append(min(edges[-1] + _MC_BLOCK, c))
    blocks = [(edges[i], edges[i + 1]) for i in range(len(edges) - 1)]
    seeds = np.random.SeedSequence(seed).spawn(len(blocks))

    workers = _thread_count(threads)
    if workers == 1:
        partials = [_twirl_block_sum(m, hi - lo, s) for (lo, hi), s in zip(blocks, seeds)]
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(lambda args: _twirl_block_sum(m, args[0][1] - args[0][0], args[1]), zip(blocks, seeds)))

    out = []
    running = np.zeros_like(np.asarray(m, dtype=complex))
    want = iter(counts)
    target = next(want)
    for (lo, hi), part in zip(blocks, partials):
        running = running + part
        while hi == target:
            out.append((target, running / target))
            target = next(want, None)
            if target is None:
                break
        if target is None:
            break
    return out


def monte_carlo_twirl(m: np.ndarray, n_samples: int, seed: int, threads: int | None = None) -> np.ndarray:
    """Monte-Carlo estimate of :func:`project` from ``n_samples`` Haar draws."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    return monte_carlo_twirl_curve(m, [n_samples], seed, threads)[-1][1]


def entanglement_fidelity(m: np.ndarray, tol: float = DEFAULT_ATOL) -> float:
    """Entanglement fidelity ``<Omega| (Phi x I)(|Omega><Omega|) |Omega>``.

    Built from the maximally entangled state directly, which gives an
    independent route to the identity ``tr Phi = n**2 F_e``.  Warns on input
    that is not completely positive.
    """
    n = superop_dim(m)
    m = np.asarray(m)
    if not is_completely_positive(m, tol):
        warnings.warn("entanglement fidelity of a non-CP superoperator", stacklevel=2)
    # (Phi x I)(|Omega><Omega|) = (1/n) sum_{k,m} Phi(E_km) (x) E_km
    w = np.zeros((n * n, n * n), dtype=complex)
    for k in range(n):
        for mm in range(n):
            img = m[:, k + n * mm].reshape((n, n), order="F")
            w[k * n : (k + 1) * n, mm * n : (mm + 1) * n] += img
    w /= n
    omega = np.zeros(n * n, dtype=complex)
    omega[:: n + 1] = 1.0 / np.sqrt(n)
    # index k*n + k of the first-factor-major layout above
    val = omega.conj() @ (w @ omega)
    return float(val.real)


def _check_density(rho: np.ndarray, tol: float) -> None:
    if not is_hermitian(rho, np.sqrt(tol)):
        raise ValueError("state is not Hermitian")
    if abs(np.trace(rho) - 1.0) > np.sqrt(tol):
        raise ValueError("state does not have unit trace")
    eigs = np.linalg.eigvalsh((rho + rho.conj().T) / 2.0)
    if eigs.min() < -tol:
        raise ValueError("state is not positive semidefinite")


def twirled_correlation(
    y: np.ndarray,
    x: np.ndarray,
    rho0: np.ndarray,
    m: np.ndarray,
    tol: float = DEFAULT_ATOL,
) -> complex:
    """Basis-averaged two-time correlation ``Tr(Y project(Phi)(X rho0))``.

    This is what remains of the regression-formula correlation
    ``Tr(Y Phi(X rho0))`` when both measurements are performed in a shared
    uniformly random basis.  rho0 must be a density matrix.
    """
    _check_density(np.asarray(rho0), tol)
    return complex(np.trace(np.asarray(y) @ apply_superop(project(m), np.asarray(x) @ np.asarray(rho0))))
