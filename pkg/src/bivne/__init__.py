"""Fragmentation-aware bilevel virtual network embedding for MEC over elastic optical links."""

from .acs import AcsParams, PheromoneMatrix, bivne_embed, reduce_candidates, sorted_vnodes
from .baselines import BaselineConfig, greedy_sp_ff, lrc_sp_ff, pl_ksp_ff
from .errors import AllocationError, ConfigError, DomainError, UnknownNodeError
from .fragcost import FragConfig, PriceTable, fitness, link_cost, loi, loi_increase, new_fragment_slots, \
    node_cost, profit, revenue
from .harness import ExperimentConfig, ExperimentReport, load_config, run_experiment
from .lower import embed_links, exact_fit_slots, prune_working_graph, shortest_path
from .solution import EmbeddingSolution, RouteAssignment
from .substrate import (FreeRun, OpticalLink, SubstrateNetwork, SubstrateNode, SubstratePath, allocate,
                        available_degree, free_runs, generate_random, load_topology, path_free_runs, release)
from .validation import validate
from .vnr import RequestProfile, VirtualNode, VirtualRequest, candidate_nodes, generate_requests

__version__ = "0.1.0"

__all__ = [
    "AcsParams", "allocate", "AllocationError", "available_degree", "BaselineConfig", "bivne_embed",
    "candidate_nodes", "ConfigError", "DomainError", "embed_links", "EmbeddingSolution", "exact_fit_slots",
    "ExperimentConfig", "ExperimentReport", "fitness", "FragConfig", "free_runs", "FreeRun",
    "generate_random", "generate_requests", "greedy_sp_ff", "link_cost", "load_config", "load_topology",
    "loi", "loi_increase", "lrc_sp_ff", "new_fragment_slots", "node_cost", "OpticalLink", "path_free_runs",
    "PheromoneMatrix", "pl_ksp_ff", "PriceTable", "profit", "prune_working_graph", "reduce_candidates",
    "release", "RequestProfile", "revenue", "RouteAssignment", "run_experiment", "shortest_path",
    "sorted_vnodes", "SubstrateNetwork", "SubstrateNode", "SubstratePath", "UnknownNodeError", "validate",
    "VirtualNode", "VirtualRequest",
]
