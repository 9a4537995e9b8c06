"""Weighted regular trees, their Cantor boundaries, dyadic energies, and the
trace/extension operators between them, with a verification harness."""

from .params import SpaceParams, c_lower_bound, load_params
from .tree import (
    EdgeRef,
    VertexPath,
    boundary_distance,
    dist_to_boundary,
    metric_distance,
    segment_length,
)
from .measures import (
    AhlforsResult,
    BallSpec,
    MeasureEstimate,
    ahlfors_check,
    ball_measure,
    boundary_ball_nu,
    boundary_ball_nu_counting,
    doubling_scan,
    edge_measure,
    half_ball_measure,
    mu_total,
    mu_truncated,
    nu_cylinder,
    weight_integral,
)
from .boundary import (
    AlphaSequence,
    BoundaryFn,
    alpha_energy,
    build_pyramid,
    double_integral_energy,
    dyadic_energy,
    indicator_fn,
    lipschitz_approximation,
    lp_norm,
    random_martingale_fn,
    random_sign_function,
    random_uniform_fn,
    read_boundary_fn,
    write_boundary_fn,
)
from .treefn import (
    NewtonianNorm,
    TreeFn,
    constant_treefn,
    from_levels,
    gradient_power_sum,
    log_example,
    newtonian_norm,
    random_treefn,
    read_treefn,
    trace,
    trace_majorant,
    write_treefn,
)
from .extension import (
    DepthTooSmallError,
    LayerSchedule,
    alpha_extend,
    alpha_gradient_l1_mass,
    gagliardo_extend,
    lemma_layer_checks,
    whitney_extend,
)
from .reporting import EnergyReport
from .suites import ExperimentConfig, SuiteResult, emit_report, run_suite, SUITE_NAMES

__version__ = "0.1.0"
