"""Sharp sup-norm regression with random design.

Optimal-recovery kernels, data-driven local bandwidths, a hybrid
Nadaraya-Watson / local-polynomial estimator and inhomogeneous
confidence bands, plus a Monte Carlo harness.
"""

from .band import ConfidenceBand, calibrate_from_critical, make_band, simultaneous_cover
from .bandwidth import Grid, bandwidth, deterministic_bandwidths, interval_at, make_grid
from .design import (
    Dataset,
    DesignDensity,
    TargetFunction,
    edge_quadratic_density,
    emp_inner_product,
    empirical_mass,
    generate_dataset,
    holder_check,
    sample_design,
    triangle,
    uniform_density,
)
from .estimator import FittedEstimator, fit, sup_risk
from .local_poly import boundary_estimate, derivative_estimates, lpa_fit, reference_gram
from .lower_bound import CubicalFamily, build_family, verify_membership
from .optimal_recovery import KernelFamily, kernel_value, make_family, minimax_error, phi_value

__all__ = [
    "ConfidenceBand", "CubicalFamily", "Dataset", "DesignDensity", "FittedEstimator", "Grid",
    "KernelFamily", "TargetFunction", "bandwidth", "boundary_estimate", "build_family",
    "calibrate_from_critical", "derivative_estimates", "deterministic_bandwidths",
    "edge_quadratic_density", "emp_inner_product", "empirical_mass", "fit", "generate_dataset",
    "holder_check", "interval_at", "kernel_value", "lpa_fit", "make_band", "make_family",
    "make_grid", "minimax_error", "phi_value", "reference_gram", "sample_design",
    "simultaneous_cover", "sup_risk", "triangle", "uniform_density", "verify_membership",
]
