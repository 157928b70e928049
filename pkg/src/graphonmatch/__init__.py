"""Unseeded matching of networks sampled from a shared smooth graphon."""

from .assignment import (Permutation, brute_force_assignment, compose,
                         solve_assignment)
from .evaluation import (BaselineSummary, MatchQuality, baseline_losses,
                         evaluate_match, matching_loss)
from .graphons import (CouplingMode, Graphon, block_graphon,
                       build_probability_matrix, constant_graphon,
                       couple_latents, eval_graphon, gradient_graphon,
                       graphon_from_function, make_graphon, sample_adjacency,
                       sample_latents, sinusoidal_graphon, validate_graphon)
from .harness import (ExperimentConfig, ExperimentRecord, parse_config,
                      read_records, run_experiment, serialize_config,
                      write_records)
from .matcher import (MatcherConfig, MatchResult, SeedSet, UnequalMatchResult,
                      align_to_seeds, apply_matching, block_cost_tensor,
                      choose_seeds, enumerate_block_permutation,
                      expand_block_permutation, match_graphs, match_unequal,
                      seed_groups)
from .rng import SeedStream, stream
from .smoothing import SmoothingConfig, column_dissimilarity, estimate_probabilities
from .wasserstein import (oracle_latent_permutation, replicate_sample,
                          w2_distance)

__version__ = "0.1.0"

__all__ = [
    "Permutation", "brute_force_assignment", "compose", "solve_assignment",
    "BaselineSummary", "MatchQuality", "baseline_losses", "evaluate_match",
    "matching_loss",
    "CouplingMode", "Graphon", "block_graphon", "build_probability_matrix",
    "constant_graphon", "couple_latents", "eval_graphon", "gradient_graphon",
    "graphon_from_function", "make_graphon", "sample_adjacency",
    "sample_latents", "sinusoidal_graphon", "validate_graphon",
    "ExperimentConfig", "ExperimentRecord", "parse_config", "read_records",
    "run_experiment", "serialize_config", "write_records",
    "MatcherConfig", "MatchResult", "SeedSet", "UnequalMatchResult",
    "align_to_seeds", "apply_matching", "block_cost_tensor", "choose_seeds",
    "enumerate_block_permutation", "expand_block_permutation", "match_graphs",
    "match_unequal", "seed_groups",
    "SeedStream", "stream",
    "SmoothingConfig", "column_dissimilarity", "estimate_probabilities",
    "oracle_latent_permutation", "replicate_sample", "w2_distance",
    "__version__",
]
