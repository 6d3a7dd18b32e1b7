"""
Threshold eigenvalues of a waveguide Π = Ω × R perturbed by a shrinking
potential h^{-alpha} V(x / h).

Modules:
- `cross_section`: transverse Dirichlet modes of Ω (interval or rectangle).
- `potential`: potentials, scaling and moment functionals.
- `threshold_solver`: the scalar equation 2k + eps F_eps(k) = 0 and its root.
- `asymptotics`: regime predictors and condition checks.
- `oracle_galerkin`: independent truncated-cylinder eigensolver.
- `experiment`: configs, sweeps, verification and writers.
- `catalog`, `settings`, `errors`, `quadrature`: supporting pieces.

Usage:
    from wguide import CrossSection, build_potential, solve_k
"""
from .asymptotics import (
    check_conditions,
    predict_critical,
    predict_de,
    predict_main,
    predict_strip_critical,
    strip_bvp,
)
from .catalog import FIXTURES, build_potential
from .cross_section import CrossSection
from .errors import (
    BranchError,
    ConfigError,
    ConvergenceError,
    DomainError,
    NotApplicableError,
    SeriesDivergenceError,
    SingularArgumentError,
    SingularSystemError,
    WaveguideError,
)
from .experiment import (
    ExperimentConfig,
    SweepReport,
    mode_table,
    predict,
    run_oracle,
    run_sweep,
    verify,
)
from .oracle_galerkin import TruncatedProblem, lowest_eigenvalue, refine
from .potential import compute_moments, tensor_potential
from .settings import Settings
from .threshold_solver import DiscretizationConfig, ThresholdProblem, f_eps, solve_k

__all__ = [
    "BranchError", "ConfigError", "ConvergenceError", "CrossSection",
    "DiscretizationConfig", "DomainError", "ExperimentConfig", "FIXTURES",
    "NotApplicableError", "SeriesDivergenceError", "Settings", "SingularArgumentError",
    "SingularSystemError", "SweepReport", "ThresholdProblem", "TruncatedProblem",
    "WaveguideError", "build_potential", "check_conditions", "compute_moments",
    "f_eps", "lowest_eigenvalue", "mode_table", "predict", "predict_critical",
    "predict_de", "predict_main", "predict_strip_critical", "refine", "run_oracle",
    "run_sweep", "solve_k", "strip_bvp", "tensor_potential", "verify",
]
