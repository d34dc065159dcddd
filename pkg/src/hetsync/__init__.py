"""Synchronization of heterogeneous oscillator networks under combined
linear-diffusive and sign (sliding-mode-like) coupling: simulation, critical
coupling gains, and empirical verification of boundedness and convergence.
"""

from .certify import (
    GainCertificate,
    HypothesisViolationError,
    certificate_to_dict,
    certify_network,
    critical_gains,
)
from .dynamics import (
    ErrorDecomposition,
    NodeModel,
    average_field,
    build_model,
    decompose_errors,
    make_vdp,
    split_state,
    stack_states,
)
from .graph import (
    Graph,
    GraphValidationError,
    algebraic_connectivity,
    build_graph,
    complete_graph,
    incidence,
    is_connected,
    laplacian,
    minimum_density,
)
from .measures import (
    FieldEvaluationError,
    JacobianBounds,
    estimate_mismatch_bound,
    estimate_quad_sampled,
    lambda_min_sym,
    mu_inf_minus,
    quad_from_jacobian_bounds,
    semipassivity_residual,
    spectral_norm,
    sym_part,
)
from .simulate import (
    BlowUpError,
    BoundEstimate,
    NetworkSystem,
    NotSynchronizedError,
    Trajectory,
    coupling_input,
    default_ic_batch,
    estimate_ultimate_bound,
    integrate,
    make_network,
    stacked_coupling,
    synchronization_summary,
    verify_average_dynamics,
    write_trajectory_csv,
)

__version__ = "0.1.0"

__all__ = [
    "BlowUpError",
    "BoundEstimate",
    "ErrorDecomposition",
    "FieldEvaluationError",
    "GainCertificate",
    "Graph",
    "GraphValidationError",
    "HypothesisViolationError",
    "JacobianBounds",
    "NetworkSystem",
    "NodeModel",
    "NotSynchronizedError",
    "Trajectory",
    "algebraic_connectivity",
    "average_field",
    "build_graph",
    "build_model",
    "certificate_to_dict",
    "certify_network",
    "complete_graph",
    "coupling_input",
    "critical_gains",
    "decompose_errors",
    "default_ic_batch",
    "estimate_mismatch_bound",
    "estimate_quad_sampled",
    "estimate_ultimate_bound",
    "incidence",
    "integrate",
    "is_connected",
    "lambda_min_sym",
    "laplacian",
    "make_network",
    "make_vdp",
    "minimum_density",
    "mu_inf_minus",
    "quad_from_jacobian_bounds",
    "semipassivity_residual",
    "spectral_norm",
    "split_state",
    "stack_states",
    "stacked_coupling",
    "sym_part",
    "synchronization_summary",
    "verify_average_dynamics",
    "write_trajectory_csv",
]
