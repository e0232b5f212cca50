"""Seeded random operators, channels, and GKSL specs for tests and verification."""

from __future__ import annotations

import numpy as np

from .gksl import GKSLSpec, gauge_normalize
from .linalg import vec_identity


def as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def random_operator(n: int, rng, scale: float = 1.0) -> np.ndarray:
    gen = as_rng(rng)
    return scale * (gen.standard_normal((n, n)) + 1j * gen.standard_normal((n, n))) / np.sqrt(2.0)


def random_hermitian(n: int, rng, scale: float = 1.0) -> np.ndarray:
    a = random_operator(n, rng, scale)
    return (a + a.conj().T) / 2.0


def random_traceless(n: int, rng, scale: float = 1.0) -> np.ndarray:
    a = random_operator(n, rng, scale)
    return a - np.trace(a) / n * np.eye(n)


def random_density(n: int, rng) -> np.ndarray:
    a = random_operator(n, rng)
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def random_cptp(n: int, rng, kraus: int | None = None) -> np.ndarray:
    """Random channel from a normalized Kraus set (Ginibre + whitening)."""
    gen = as_rng(rng)
    k = kraus if kraus is not None else n
    ops = [random_operator(n, gen) for _ in range(k)]
    s = sum(a.conj().T @ a for a in ops)
    vals, vecs = np.linalg.eigh(s)
    whiten = vecs @ np.diag(1.0 / np.sqrt(vals)) @ vecs.conj().T
    m = np.zeros((n * n, n * n), dtype=complex)
    for a in ops:
        ka = a @ whiten
        m += np.kron(ka.conj(), ka)
    return m


def random_trace_annihilating(n: int, rng, scale: float = 1.0) -> np.ndarray:
    """Random superoperator with Tr L(X) = 0 for every X (not GKSL in general)."""
    gen = as_rng(rng)
    m = scale * (gen.standard_normal((n * n, n * n)) + 1j * gen.standard_normal((n * n, n * n)))
    vi = vec_identity(n)
    return m - np.outer(vi, vi @ m) / n


def random_trace_preserving(n: int, rng, generator_weight: float = 0.5) -> np.ndarray:
    """Random trace-preserving superoperator (a channel plus a generator part)."""
    gen = as_rng(rng)
    return random_cptp(n, gen) + generator_weight * random_trace_annihilating(n, gen)


def random_gksl(
    n: int,
    rng,
    jump_count: int = 2,
    coupling: float = 0.05,
    gamma: float | None = None,
    p: float | None = None,
    hamiltonian_scale: float = 1.0,
    jump_scale: float = 1.0,
    traceless_jumps: bool = True,
) -> GKSLSpec:
    """Random GKSL spec with O(1) operator norms, gauge normalized by default."""
    gen = as_rng(rng)
    h = random_hermitian(n, gen, hamiltonian_scale)
    if traceless_jumps:
        jumps = tuple(random_traceless(n, gen, jump_scale) for _ in range(jump_count))
    else:
        jumps = tuple(random_operator(n, gen, jump_scale) for _ in range(jump_count))
    spec = GKSLSpec(
        n=n,
        hamiltonian=h,
        jumps=jumps,
        coupling=coupling,
        gamma=gamma if gamma is not None else float(gen.uniform(0.5, 2.0)),
        p=p if p is not None else float(gen.uniform(0.0, 0.5)),
    )
    return gauge_normalize(spec) if traceless_jumps else spec
