"""Dense complex operator and superoperator linear algebra.

Conventions (fixed once here, inherited by every other module):

* An *operator* is an ``(n, n)`` complex ndarray acting on an n-dimensional
  Hilbert space, ``2 <= n <= 32``.
* A *superoperator* is an ``(n**2, n**2)`` complex ndarray acting on
  column-stacked operators: ``vec`` stacks columns, so the map
  ``X -> A @ X @ B`` is represented by ``kron(B.T, A)`` and
  ``vec(A @ X @ B) == kron(B.T, A) @ vec(X)``.

Two trace functionals appear throughout:

* ``sop_trace`` is the superoperator trace
  ``sum_{k,m} <k| Phi(|k><m|) |m>``, which in this vectorization equals the
  ordinary matrix trace of the representation matrix.
* ``op_trace_of_image`` is ``Tr(Phi(I))``, the trace of the image of the
  identity operator.
"""

from __future__ import annotations

import numpy as np

#: Hard cap on the Hilbert-space dimension; the superoperator is dense with
#: n**4 complex entries, so this is a desk-scale library by design.
DIM_CAP = 32

#: Default absolute tolerance for scalar and entrywise comparisons.
DEFAULT_ATOL = 1e-10


def operator_dim(a: np.ndarray) -> int:
    """Dimension n of an operator, validating shape and the dimension cap."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"operator must be square, got shape {a.shape}")
    n = a.shape[0]
    if not 2 <= n <= DIM_CAP:
        raise ValueError(f"operator dimension must be in [2, {DIM_CAP}], got {n}")
    return n


def superop_dim(m: np.ndarray) -> int:
    """Hilbert-space dimension n of an (n**2, n**2) superoperator matrix."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"superoperator must be square, got shape {m.shape}")
    n = int(round(np.sqrt(m.shape[0])))
    if n * n != m.shape[0]:
        raise ValueError(f"superoperator side {m.shape[0]} is not a perfect square")
    if not 2 <= n <= DIM_CAP:
        raise ValueError(f"dimension must be in [2, {DIM_CAP}], got {n}")
    return n


def vec(x: np.ndarray) -> np.ndarray:
    """Column-stack an operator into a length n**2 vector."""
    return np.asarray(x).reshape(-1, order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    """Inverse of :func:`vec`; exact round trip for all finite inputs."""
    v = np.asarray(v)
    n = int(round(np.sqrt(v.size)))
    if n * n != v.size:
        raise ValueError(f"vector of length {v.size} is not a stacked square matrix")
    return v.reshape((n, n), order="F")


def vec_identity(n: int) -> np.ndarray:
    """vec(I_n); doubles as the trace functional: vec_identity(n) @ vec(X) == Tr X."""
    return vec(np.eye(n))


def identity_superop(n: int) -> np.ndarray:
    """The identity superoperator on n-dimensional operators."""
    return np.eye(n * n, dtype=complex)


def dagger(a: np.ndarray) -> np.ndarray:
    return np.asarray(a).conj().T


def sandwich(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Superoperator of the map ``X -> A @ X @ B``.

    ``sop_trace(sandwich(A, B)) == Tr(A) * Tr(B)``, a fact used repeatedly by
    the analytic trace identities.
    """
    na = operator_dim(a)
    nb = operator_dim(b)
    if na != nb:
        raise ValueError(f"dimension mismatch: {na} vs {nb}")
    return np.kron(np.asarray(b).T, np.asarray(a))


def apply_superop(m: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Apply a superoperator matrix to an operator."""
    return unvec(np.asarray(m) @ vec(x))


def compose(*ms: np.ndarray) -> np.ndarray:
    """Composition of superoperators, leftmost acting last (matrix product)."""
    out = np.asarray(ms[0])
    for m in ms[1:]:
        out = out @ np.asarray(m)
    return out


def sop_trace(m: np.ndarray) -> complex:
    """Superoperator trace ``sum_{k,m} <k| Phi(|k><m|) |m>``.

    In column-stacking vectorization this is exactly the matrix trace of the
    representation matrix: the (k, m) matrix unit vectorizes to the basis
    vector with index k + n*m, and the (k, m) element of the image is the
    same index, so the sum walks the diagonal.
    """
    superop_dim(m)
    return complex(np.trace(m))


def op_trace_of_image(m: np.ndarray) -> complex:
    """``Tr(Phi(I))`` for a superoperator Phi."""
    n = superop_dim(m)
    vi = vec_identity(n)
    return complex(vi @ (np.asarray(m) @ vi))


def chaotic_average(a: np.ndarray) -> complex:
    """Average ``Tr(A) / n`` with respect to the maximally mixed state I/n."""
    n = operator_dim(a)
    return complex(np.trace(a)) / n


def expm(m: np.ndarray) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a truncated Taylor core.

    The input is scaled until its 1-norm is at most 0.5, the exponential of
    the scaled matrix is evaluated by a degree-20 Horner-form Taylor
    polynomial (truncation error below 1e-20 at that norm), and the result is
    squared back up.  Relative accuracy is comfortably below 1e-12 for the
    norms this library produces (||M|| <= 1e2).
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expm needs a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("expm: input has non-finite entries")
    dim = m.shape[0]
    norm1 = np.max(np.sum(np.abs(m), axis=0)) if dim else 0.0
    squarings = max(0, int(np.ceil(np.log2(norm1 / 0.5)))) if norm1 > 0.5 else 0
    a = m / (2.0**squarings)
    eye = np.eye(dim, dtype=complex)
    out = eye.copy()
    for k in range(20, 0, -1):
        out = eye + (a @ out) / k
    for _ in range(squarings):
        out = out @ out
    return out


def is_hermitian(a: np.ndarray, tol: float = 1e-12) -> bool:
    a = np.asarray(a)
    return bool(np.max(np.abs(a - a.conj().T)) <= tol)


def is_trace_preserving(m: np.ndarray, tol: float = DEFAULT_ATOL) -> bool:
    """True iff ``Tr(Phi(X)) == Tr(X)`` on the matrix-unit basis, within tol.

    Equivalent matrix statement: the row vector vec(I)^T is a left fixed
    point of the representation matrix.
    """
    n = superop_dim(m)
    vi = vec_identity(n)
    return bool(np.max(np.abs(vi @ np.asarray(m) - vi)) <= tol)


def is_trace_annihilating(m: np.ndarray, tol: float = DEFAULT_ATOL) -> bool:
    """True iff ``Tr(L(X)) == 0`` on the matrix-unit basis, within tol."""
    n = superop_dim(m)
    vi = vec_identity(n)
    return bool(np.max(np.abs(vi @ np.asarray(m))) <= tol)


def choi_matrix(m: np.ndarray) -> np.ndarray:
    """Unnormalized Choi matrix ``sum_{k,m} |k><m| (x) Phi(|k><m|)``.

    Block (k, m) of the result is Phi applied to the (k, m) matrix unit,
    which in column stacking is just column k + n*m of the representation
    matrix, unstacked.
    """
    n = superop_dim(m)
    m = np.asarray(m)
    out = np.empty((n * n, n * n), dtype=complex)
    for k in range(n):
        for mm in range(n):
            out[k * n : (k + 1) * n, mm * n : (mm + 1) * n] = unvec(m[:, k + n * mm])
    return out


def is_completely_positive(m: np.ndarray, tol: float = DEFAULT_ATOL) -> bool:
    """Choi-matrix positivity check with an eigenvalue floor of -tol."""
    choi = choi_matrix(m)
    herm_defect = np.max(np.abs(choi - choi.conj().T))
    if herm_defect > np.sqrt(tol):
        return False
    eigs = np.linalg.eigvalsh((choi + choi.conj().T) / 2.0)
    return bool(eigs.min() >= -tol)


def is_cptp(m: np.ndarray, tol: float = DEFAULT_ATOL) -> bool:
    return is_trace_preserving(m, tol) and is_completely_positive(m, tol)
