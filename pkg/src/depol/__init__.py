"""Depolarizing dynamics, full-unitary twirling, and perturbative rates."""

from .cumulant import (
    CumulantTerm,
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
from .dynamics import (
    RateReport,
    RateUnderflowError,
    Trajectory,
    build_rate_report,
    exact_p,
    exact_p_trajectory,
    exact_rate,
    free_propagator,
    full_propagator,
    integrate_rate_ode,
    solve_projected_ode,
)
from .gksl import (
    GKSLSpec,
    TraceIdentities,
    analytic_traces,
    build_free_liouvillian,
    build_interaction_liouvillian,
    full_generator,
    gauge_normalize,
)
from .linalg import (
    DEFAULT_ATOL,
    DIM_CAP,
    apply_superop,
    chaotic_average,
    choi_matrix,
    compose,
    dagger,
    expm,
    identity_superop,
    is_completely_positive,
    is_cptp,
    is_hermitian,
    is_trace_annihilating,
    is_trace_preserving,
    op_trace_of_image,
    sandwich,
    sop_trace,
    unvec,
    vec,
    vec_identity,
)
from .twirl import (
    DepolarizingParams,
    channel_p_range,
    entanglement_fidelity,
    haar_sample,
    haar_samples,
    lambda_compose,
    lambda_p,
    mixing_map,
    monte_carlo_twirl,
    monte_carlo_twirl_curve,
    p_of,
    project,
    project_generator,
    projected_generator_scalar,
    traceless_projector,
    twirled_correlation,
)

__version__ = "0.1.0"
