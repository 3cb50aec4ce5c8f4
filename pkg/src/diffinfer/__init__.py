"""Diffusion network inference from probabilistic infection observations."""

from .am_solver import SolverConfig, alternate_maximize
from .cascade_sim import ObservationMatrix, read_observations, write_observations
from .graph_io import Graph, generate_random_graph, load_graph, save_graph
from .likelihood import LikelihoodModel, RelaxedState
from .mi_prune import CandidateMap, build_candidate_sets
from .rounding import InferredNetwork, select_best_sample

__version__ = "0.1.0"
