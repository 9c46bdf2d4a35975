"""Maslov, Hörmander and Kashiwara indices; Jacobi-flow Lagrangian paths; conjugate and focal instants."""
from .comparison import (
    ComparisonReport,
    ShiftedLagrangian,
    check_shifted_criteria,
    run_comparison,
    shifted_start_lagrangian,
)
from .jacobi import (
    FocalEvent,
    JacobiSystem,
    SubmanifoldData,
    detect_focal_instants,
    endpoint_contributions,
    integrate_flow,
    lagrangian_from_submanifold,
    lagrangian_path_from_flow,
)
from .lagrangian import (
    Chart,
    LagrangianFrame,
    PSData,
    SymplecticSpace,
    chart_apply,
    chart_invert,
    intersection_dimension,
    lagrangian_from_ps,
    ps_from_lagrangian,
    random_lagrangian,
    span,
    standard_space,
    transition_reference,
)
from .maslov import (
    HormanderQuery,
    LagrangianPath,
    MaslovResult,
    check_estimates,
    hormander_index,
    kashiwara_index,
    maslov_index,
    maslov_index_crossings,
)
from .scenario import Scenario, builtin_model
from .symforms import (
    Inertia,
    SymmetricForm,
    check_difference_bound,
    check_perturbation_bounds,
    inertia,
    kernel_basis,
    restrict_form,
)

__version__ = "0.1.0"
