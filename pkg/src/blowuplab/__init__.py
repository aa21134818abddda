"""Numerical laboratory for the reaction-diffusion equation
u_t = lap(u^m) + |x|^sigma u^p with 1 <= p < m and sigma > 0."""

from .core import (
    InitialDataSpec,
    Problem,
    SimilarityExponents,
    adb_tail_norm,
    evaluate_initial_data,
    fujita_exponent,
    nonexistence_time_bound,
    sharp_survival_time,
    similarity_exponents,
)
from .pde_solver import (
    OrderingReport,
    RadialGrid,
    RadialState,
    RunReport,
    estimate_blowup_time,
    evolve,
    evolve_pair,
    make_grid,
    radial_mass,
    sample_initial_data,
    support_radius,
    verify_ordering,
)
from .selfsimilar import (
    SelfSimilarFunction,
    SelfSimilarProfile,
    build_fsp_supersolution,
    find_compact_profile_by_slope,
    find_compact_subsolution_profile,
    find_decreasing_supersolution_profile,
    integrate_profile_from_origin,
    profile_residual,
    selfsimilar_eval,
)
from .stationary_phase import (
    CriticalPoint,
    OrbitAsymptotics,
    PhaseOrbit,
    StationaryProfile,
    check_orbit_asymptotics,
    integrate_stationary_profile,
    majorizing_stationary,
    phase_critical_points,
    phase_map,
    phase_orbit_from_P0,
    rescale_stationary,
    stationary_residual,
    unit_stationary_profile,
)
from .scenarios import (
    ScenarioResult,
    run_blowup_scenario,
    run_comparison_scenario,
    run_fsp_scenario,
    run_no_localization_scenario,
    run_threshold_scenario,
)

__version__ = "0.1.0"
