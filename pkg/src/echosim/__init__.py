"""Deterministic bounded-confidence opinion dynamics.

Simulation of confidence-interval averaging on [0, 1], influence-graph
structure analysis, targeted injection of moderate agents, population
generators, and a sweep harness that regenerates the headline results
at desk scale.
"""

from .core import (
    Agent,
    DynamicsConfig,
    Mindedness,
    Population,
    Rule,
    SimulationResult,
    classify,
    cluster_labels,
    count_clusters,
    neighborhood,
    simulate,
    step_hk,
    step_hk_mod,
    write_trajectory_csv,
)
from .graph import (
    InfluenceGraph,
    PullDecomposition,
    build_graph,
    export_graph,
    in_degrees,
    out_degrees,
    parse_graph_json,
    pendant_in_vertices,
    pull,
    pulls_all,
    regular_degree_check,
    strongly_connected_components,
)
from .harness import (
    SweepKind,
    SweepRecord,
    SweepSpec,
    aggregate_means,
    dump_trajectories,
    read_sweep_csv,
    record_count,
    run_epsilon_sweep,
    run_placement_compare,
    run_sweep,
    run_transform_sweep,
    spearman_rank_correlation,
    write_means_csv,
    write_sweep_csv,
)
from .placement import (
    PlacementConfig,
    PlacementEvent,
    Side,
    Strategy,
    budget_spent,
    compute_injection,
    find_converging_pairs,
    run_with_placement,
    write_events_csv,
)
from .popgen import (
    MixtureSpec,
    OpinionDist,
    class_counts,
    clipped_normal_mixture,
    evenly_spaced,
    read_population_csv,
    round_half_up,
    transform,
    write_population_csv,
)

__version__ = "0.1.0"

__all__ = [
    "Agent",
    "DynamicsConfig",
    "InfluenceGraph",
    "Mindedness",
    "MixtureSpec",
    "OpinionDist",
    "PlacementConfig",
    "PlacementEvent",
    "Population",
    "PullDecomposition",
    "Rule",
    "Side",
    "SimulationResult",
    "Strategy",
    "SweepKind",
    "SweepRecord",
    "SweepSpec",
    "aggregate_means",
    "budget_spent",
    "build_graph",
    "class_counts",
    "classify",
    "clipped_normal_mixture",
    "cluster_labels",
    "compute_injection",
    "count_clusters",
    "dump_trajectories",
    "evenly_spaced",
    "export_graph",
    "find_converging_pairs",
    "in_degrees",
    "neighborhood",
    "out_degrees",
    "parse_graph_json",
    "pendant_in_vertices",
    "pull",
    "pulls_all",
    "read_population_csv",
    "read_sweep_csv",
    "record_count",
    "regular_degree_check",
    "round_half_up",
    "run_epsilon_sweep",
    "run_placement_compare",
    "run_sweep",
    "run_transform_sweep",
    "run_with_placement",
    "simulate",
    "spearman_rank_correlation",
    "step_hk",
    "step_hk_mod",
    "strongly_connected_components",
    "transform",
    "write_events_csv",
    "write_means_csv",
    "write_population_csv",
    "write_sweep_csv",
    "write_trajectory_csv",
]
