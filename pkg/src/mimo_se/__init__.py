"""Spectral efficiency of co-located and distributed massive MIMO downlinks.

Library layout:

- params:      system parameters, deployment topologies, validation
- correlation: exponential antenna correlation, Jacobi eigensolver,
               limiting eigenvalue density, eigenmode power coupling
- stochastic:  reproducible substreams, CSCG fading, Gamma shadowing
- channel:     channel realizations, reduced target matrix, log-det SE
- asymptotic:  closed-form large-receive-array limits and scheme comparison
- circular:    ring deployments, distance moment, disk averages, optimal radius
- montecarlo:  seeded trial engine, concentration diagnostics, axis sweeps
- cli:         the `mimo-se` command
"""

from .errors import NumericError, ValidationError
from .params import (
    Centralized,
    Circular,
    DistributedExplicit,
    SystemParams,
    Topology,
    validate,
)
from .correlation import (
    coupling_matrix,
    eig_sym,
    exp_corr_spectrum,
    exp_correlation,
    max_eigenvalue_bound,
    szego_eigen_density,
)
from .stochastic import RandomStream, sample_cscg, sample_shadowing
from .channel import (
    ChannelRealization,
    draw_realization,
    large_scale_diag,
    spectral_efficiency,
    spectral_efficiency_direct,
    target_matrix,
)
from .asymptotic import (
    asymptotic_diag,
    compare_schemes,
    delta_sum,
    se_cmimo_asymptotic,
    se_dmimo_asymptotic,
    se_high_snr,
)
from .circular import (
    RingGeometry,
    antenna_angles,
    avg_se_urban,
    legendre_p,
    optimal_ring_radius,
    ring_distance_moment,
    sample_user_radius,
    se_circular_cmimo,
    se_circular_dmimo,
    user_antenna_distances,
)
from .montecarlo import (
    SEEstimate,
    SweepTable,
    TargetMatrixStats,
    estimate_target_matrix,
    lln_weighted_check,
    run_trials,
    sweep,
)

__version__ = "0.1.0"

__all__ = [
    "Centralized",
    "ChannelRealization",
    "Circular",
    "DistributedExplicit",
    "NumericError",
    "RandomStream",
    "RingGeometry",
    "SEEstimate",
    "SweepTable",
    "SystemParams",
    "TargetMatrixStats",
    "Topology",
    "ValidationError",
    "antenna_angles",
    "asymptotic_diag",
    "avg_se_urban",
    "compare_schemes",
    "coupling_matrix",
    "delta_sum",
    "draw_realization",
    "eig_sym",
    "estimate_target_matrix",
    "exp_corr_spectrum",
    "exp_correlation",
    "large_scale_diag",
    "legendre_p",
    "lln_weighted_check",
    "max_eigenvalue_bound",
    "optimal_ring_radius",
    "ring_distance_moment",
    "run_trials",
    "sample_cscg",
    "sample_shadowing",
    "sample_user_radius",
    "se_circular_cmimo",
    "se_circular_dmimo",
    "se_cmimo_asymptotic",
    "se_dmimo_asymptotic",
    "se_high_snr",
    "spectral_efficiency",
    "spectral_efficiency_direct",
    "sweep",
    "szego_eigen_density",
    "target_matrix",
    "user_antenna_distances",
    "validate",
]
