"""Seeded graph matching on correlated Erdos-Renyi graph pairs."""

from .graph import (
    Graph,
    build_graph,
    gamma_k,
    graph_and,
    graph_or,
    n_k,
    remove_vertices,
)
from .model import (
    CorrelatedInstance,
    Permutation,
    SeedMap,
    sample_instance,
    sample_seeds,
    sample_seeds_fixed,
)
from .flows import (
    build_joint_network,
    count_disjoint_paths_to_set,
    joint_path_count,
    max_flow,
)
from .matchers import (
    MatchResult,
    ParamSet,
    compute_pair_witness,
    compute_witness,
    derive_d,
    derive_params_alg1,
    derive_params_alg3,
    match_alg1,
    match_alg2,
    match_alg3,
    match_high_degree_alg1,
    match_seedless,
    propagate_low_degree,
)
from .metrics import (
    accuracy,
    check_graph_properties,
    converse_certificate,
    expansion_stats,
    qap_objective,
)

__all__ = [
    "Graph", "build_graph", "gamma_k", "n_k", "remove_vertices",
    "graph_and", "graph_or",
    "CorrelatedInstance", "Permutation", "SeedMap",
    "sample_instance", "sample_seeds", "sample_seeds_fixed",
    "build_joint_network", "max_flow", "joint_path_count",
    "count_disjoint_paths_to_set",
    "MatchResult", "ParamSet",
    "derive_params_alg1", "derive_params_alg3", "derive_d",
    "match_alg1", "match_alg2", "match_alg3", "match_seedless",
    "match_high_degree_alg1", "propagate_low_degree",
    "compute_witness", "compute_pair_witness",
    "qap_objective", "accuracy", "converse_certificate",
    "check_graph_properties", "expansion_stats",
]

__version__ = "0.1.0"
