"""GKSL (Lindblad) generators: construction, traceless gauge, trace identities.

A :class:`GKSLSpec` bundles the perturbation data ``(H, {L_j})`` with the
coupling strength and the free depolarizing parameters ``(gamma, p)``.  The
full generator of the dynamics is

    L = L0 + coupling * L_I,
    L0  = gamma * (lambda_p - identity),
    L_I = -i [H, .] + sum_j ( L_j . L_j^dag - (1/2) {L_j^dag L_j, .} ).

The GKSL form is invariant under ``L_j -> L_j + c_j I`` with the matching
Hamiltonian shift; :func:`gauge_normalize` uses that freedom to make every
jump operator traceless, which the analytic trace identities require.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .linalg import identity_superop, is_hermitian, operator_dim, sandwich
from .twirl import channel_p_range, lambda_p

#: Absolute tolerance on Hermiticity of H and on jump-operator traces in the
#: normalized gauge.
GAUGE_TOL = 1e-12


@dataclass(frozen=True)
class GKSLSpec:
    """Free depolarizing generator plus a GKSL perturbation.

    ``p`` must lie in the channel range [-1/(n**2-1), 1] and ``gamma`` must be
    positive; the coupling is the dimensionless strength multiplying the
    interaction generator.
    """

    n: int
    hamiltonian: np.ndarray
    jumps: tuple[np.ndarray, ...]
    coupling: float
    gamma: float = 1.0
    p: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "hamiltonian", np.asarray(self.hamiltonian, dtype=complex))
        object.__setattr__(self, "jumps", tuple(np.asarray(L, dtype=complex) for L in self.jumps))
        n = operator_dim(self.hamiltonian)
        if n != self.n:
            raise ValueError(f"hamiltonian is {n}x{n} but n={self.n}")
        if not is_hermitian(self.hamiltonian, GAUGE_TOL):
            raise ValueError("hamiltonian is not Hermitian (|H - H^dag| > 1e-12)")
        for j, L in enumerate(self.jumps):
            if operator_dim(L) != self.n:
                raise ValueError(f"jump operator {j} has wrong dimension")
        if not np.isfinite(self.gamma) or self.gamma <= 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        lo, hi = channel_p_range(self.n)
        if not np.isfinite(self.p) or not lo <= self.p <= hi:
            raise ValueError(f"p={self.p} outside the channel range [{lo}, {hi}]")
        if not np.isfinite(self.coupling) or self.coupling < 0:
            raise ValueError(f"coupling must be >= 0, got {self.coupling}")

    @property
    def free_rate(self) -> float:
        """Free depolarization rate (1 - p) * gamma."""
        return (1.0 - self.p) * self.gamma

    @property
    def is_gauge_normalized(self) -> bool:
        return all(abs(np.trace(L)) <= GAUGE_TOL for L in self.jumps)


@dataclass(frozen=True)
class TraceIdentities:
    """Chaotic-state averages that determine the superoperator traces of L_I.

    For traceless jumps, with G = sum_j L_j^dag L_j and <A> = Tr(A)/n:

        tr(L_I)   / n**2 = -<G>
        tr(L_I^2) / n**2 = -2 (<H^2> - <H>^2) + sum_{j,k} |<L_j L_k>|^2
                           + (1/2) <G^2> + (1/2) <G>^2
    """

    mean_g: float
    tr_li_over_n2: float
    tr_li2_over_n2: float
    variance_h: float
    sum_abs_lj_lk: float
    mean_g2: float


def gauge_normalize(spec: GKSLSpec) -> GKSLSpec:
    """Shift every jump operator traceless, compensating in the Hamiltonian.

    Uses ``c_j = -Tr(L_j)/n`` in ``L_j -> L_j + c_j I`` together with
    ``H -> H + (1/2i) sum_j (c_j^* L_j - c_j L_j^dag)``; the interaction
    Liouvillian is unchanged to rounding.
    """
    if spec.is_gauge_normalized:
        return spec
    n = spec.n
    shifts = [-np.trace(L) / n for L in spec.jumps]
    new_jumps = tuple(L + c * np.eye(n) for L, c in zip(spec.jumps, shifts))
    dh = sum(
        (np.conj(c) * L - c * L.conj().T for L, c in zip(spec.jumps, shifts)),
        np.zeros((n, n), dtype=complex),
    ) / 2j
    new_h = spec.hamiltonian + dh
    # dh is Hermitian up to rounding; resymmetrize so the constructor check holds
    new_h = (new_h + new_h.conj().T) / 2.0
    return replace(spec, hamiltonian=new_h, jumps=new_jumps)


def build_interaction_liouvillian(spec: GKSLSpec) -> np.ndarray:
    """Superoperator matrix of the GKSL perturbation L_I (coupling excluded)."""
    n = spec.n
    eye = np.eye(n)
    h = spec.hamiltonian
    m = -1j * (sandwich(h, eye) - sandwich(eye, h))
    for L in spec.jumps:
        g = L.conj().T @ L
        m = m + sandwich(L, L.conj().T) - 0.5 * (sandwich(g, eye) + sandwich(eye, g))
    return m


def build_free_liouvillian(spec: GKSLSpec) -> np.ndarray:
    """Superoperator matrix of L0 = gamma * (lambda_p - identity)."""
    return spec.gamma * (lambda_p(spec.n, spec.p) - identity_superop(spec.n))


def full_generator(spec: GKSLSpec) -> np.ndarray:
    """L0 + coupling * L_I."""
    return build_free_liouvillian(spec) + spec.coupling * build_interaction_liouvillian(spec)


def analytic_traces(spec: GKSLSpec) -> TraceIdentities:
    """Trace identities of L_I from operator traces only (no superoperator built).

    Refuses jump operators that are not traceless, since the identities assume
    Tr L_j = 0; call :func:`gauge_normalize` first.
    """
    if not spec.is_gauge_normalized:
        raise ValueError("analytic_traces requires traceless jumps; call gauge_normalize first")
    n = spec.n
    h = spec.hamiltonian
    avg = lambda a: (np.trace(a) / n).real

    g = sum((L.conj().T @ L for L in spec.jumps), np.zeros((n, n), dtype=complex))
    mean_g = avg(g)
    mean_g2 = avg(g @ g)
    variance_h = avg(h @ h) - avg(h) ** 2
    sum_abs = float(
        sum(abs(np.trace(Lj @ Lk) / n) ** 2 for Lj in spec.jumps for Lk in spec.jumps)
    )
    tr_li_over_n2 = -mean_g
    tr_li2_over_n2 = -2.0 * variance_h + sum_abs + 0.5 * mean_g2 + 0.5 * mean_g**2
    return TraceIdentities(
        mean_g=mean_g,
        tr_li_over_n2=tr_li_over_n2,
        tr_li2_over_n2=tr_li2_over_n2,
        variance_h=variance_h,
        sum_abs_lj_lk=sum_abs,
        mean_g2=mean_g2,
    )
