"""matchpool: dynamic paired-exchange matching on sparse random pools."""

from .analysis import (
    RegionPoint,
    ResidualStats,
    condition_lhs,
    count_pi_paths,
    count_simple_aug_paths,
    delta_half_bound,
    er_perfect_matching_rate,
    estimate_alpha,
    region_scan,
    residual_bound,
    residual_stats,
)
from .cycles import (
    CycleSet,
    brute_force_packing,
    count_short_cycles,
    enumerate_cycles,
    max_cycle_packing,
)
from .harness import (
    GapEstimate,
    PolicyConfig,
    RunRow,
    ScenarioConfig,
    paired_gaps,
    run_scenario,
    scaling_study,
    scenario_from_json,
    trend_verdict,
    trial_seed,
)
from .matching import (
    CapacityError,
    Matching,
    brute_force_matching,
    count_unmatched_by_type,
    max_matching,
    two_stage_matching,
)
from .model import (
    GraphState,
    ModelParams,
    ModelError,
    NodeType,
    StateError,
    UndirectedView,
    final_pool_view,
    new_pool,
)
from .policies import (
    ChainState,
    PolicySpec,
    SpecError,
    TrialTrace,
    run_cm2,
    run_cm3,
    run_online_chain,
    run_policy,
)
from .rng import derive_seed

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
