"""Numerical toolkit for semilinear diffusion driven by the fractional Laplacian.

Covers the stable heat kernel and its semigroup, Riesz potentials and
principal-value operator application, Dirichlet problems on balls with
monotone iteration, mild-solution time stepping with blow-up detection,
Riemann-Liouville fractional calculus, and a reproducible experiment
harness tying them together.
"""

from .errors import ConfigurationError, DomainError, NumericError, PreconditionError
from .spectral import (
    Field,
    GridSpec,
    apply_multiplier,
    convolve,
    frac_laplacian_quadrature,
    frac_laplacian_spectral,
    make_grid,
    pv_constant,
    riesz_constant,
)
from .heatkernel import (
    KernelSpec,
    check_two_sided_bound,
    estimate_tail_constant,
    kernel_eval,
    kernel_field,
    kernel_mass,
    semigroup_apply,
    stable_profile,
)
from .potential import (
    PropertyHReport,
    WeightSpec,
    check_property_H,
    minimal_solution_via_balls,
    riesz_potential,
)
from .elliptic import (
    BallProblem,
    EigenPair,
    LadderResult,
    assemble_dirichlet_operator,
    exponent_ladder,
    liouville_bootstrap_probe,
    monotone_iterate,
    principal_eigenpair,
    solve_linear_dirichlet,
    uniqueness_check,
    whole_space_sublinear_solve,
)
from .evolution import (
    EvolutionTrace,
    ProblemSpec,
    critical_mass_growth_probe,
    fujita_sweep,
    integrate,
    step_mild,
    weissler_bound,
)
from .timefrac import (
    TimeFracSpec,
    TimeMesh,
    confident_mask,
    rl_derivative,
    rl_integral,
    separable_blowup_demo,
    solve_rl_quadratic,
)
from .harness import list_experiments, parse_config, run, run_kind

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError", "DomainError", "NumericError", "PreconditionError",
    "Field", "GridSpec", "apply_multiplier", "convolve",
    "frac_laplacian_quadrature", "frac_laplacian_spectral", "make_grid",
    "pv_constant", "riesz_constant",
    "KernelSpec", "check_two_sided_bound", "estimate_tail_constant",
    "kernel_eval", "kernel_field", "kernel_mass", "semigroup_apply",
    "stable_profile",
    "PropertyHReport", "WeightSpec", "check_property_H",
    "minimal_solution_via_balls", "riesz_potential",
    "BallProblem", "EigenPair", "LadderResult", "assemble_dirichlet_operator",
    "exponent_ladder", "liouville_bootstrap_probe", "monotone_iterate",
    "principal_eigenpair", "solve_linear_dirichlet", "uniqueness_check",
    "whole_space_sublinear_solve",
    "EvolutionTrace", "ProblemSpec", "critical_mass_growth_probe",
    "fujita_sweep", "integrate", "step_mild", "weissler_bound",
    "TimeFracSpec", "TimeMesh", "confident_mask", "rl_derivative",
    "rl_integral", "separable_blowup_demo", "solve_rl_quadratic",
    "list_experiments", "parse_config", "run", "run_kind",
    "__version__",
]
