"""Belief-dynamics toolkit for absorbing zero-sum games with two-sided
incomplete information: simplex triangulation and splitting, vertex-game
value iteration, information-transform machinery for mixed actions, an
exact truncated-game oracle, and coupled Monte Carlo verification."""

from .beliefs import (
    Belief,
    MixedAction,
    action_marginal,
    bayes_posterior,
    belief_transition,
    in_frontier,
    posterior_table,
    stage_payoff,
)
from .games import (
    AbsorbingInfo,
    GameFormatError,
    GameSpec,
    ValidationReport,
    augment_safety,
    big_match,
    classify_states,
    load_spec,
    random_absorbing_game,
    random_game,
    save_spec,
    validate_game,
)
from .oracle import BudgetExceededError, OracleResult, discounted_value, n_stage_value, value_shape_probe
from .simulate import (
    CoupledTrace,
    CouplingStats,
    GreedyConciseStrategy,
    LiftedStrategy,
    PairedPayoffStats,
    RevealingStats,
    paired_value_sim,
    simulate_coupling,
    simulate_revealing,
    type_independent_strategy,
    uniform_strategy,
)
from .transforms import (
    ConvexificationWitness,
    NRPartition,
    classify_actions,
    concise_ambiguous_check,
    eps0_of,
    in_translation_domain,
    jump_bounds_check,
    make_convexification_witness,
    nr_stability_check,
    silent_map,
    translation_map,
    verify_convexification,
)
from .triangulation import (
    FlatnessCertificate,
    SimplexTriangulation,
    Splitting,
    build_triangulation,
    cell_count,
    certify_flatness,
    vertex_count,
)
from .values import (
    ActionGrid,
    FiniteBeliefGame,
    IterationCapExceeded,
    MatrixGameSolution,
    ValueFunction,
    action_grid,
    build_vertex_game,
    frontier_gap_check,
    limit_value_table,
    matrix_game_value,
    optimal_stage_solutions,
    separable_decomposition_check,
    shapley_operator,
    solve_discounted,
    split_option_stage_check,
)

__version__ = "0.1.0"
