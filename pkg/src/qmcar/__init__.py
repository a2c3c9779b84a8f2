"""Deterministic acceptance-rejection sampling with low-discrepancy drivers."""

from .criterion import (
    CriterionResult,
    FrequencyVector,
    default_R_for_fibonacci,
    exp_sum,
    qr_fibonacci,
    qr_general,
    weight,
)
from .density import CurvatureReport, Density, cdf, check_curvature, default_bound, from_config, make_builtin
from .discrepancy import (
    DiscrepancyResult,
    grid_oracle_1d,
    grid_oracle_2d,
    local_discrepancy,
    star_discrepancy_1d,
    star_discrepancy_2d_uniform,
)
from .driver import (
    CubicBasis,
    DriverSet,
    Point2,
    fibonacci_lattice,
    fibonacci_number,
    kronecker,
    make_driver,
    random_driver,
    regular_grid,
    root_of_cubic,
)
from .errors import CostCapError, DomainError, QuadratureError
from .experiments import ConvergenceReport, ExperimentConfig, fit_slope, reproduce_figures, run_convergence
from .integration import IntegrationReport, Integrand, hk_variation, qmc_estimate, reference_integral
from .sampler import SampleSet, ar_deterministic, ar_randomized

__version__ = "0.1.0"
