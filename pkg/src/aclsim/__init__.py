"""Simulated ego-networks, community-based ACL prediction and leak analysis under diffusion."""

from .acl import AclPrediction, best_fit_cluster, evaluate_acl, predict_acl, select_untrusted
from .community import CommunityCover, Method, detect, modularity
from .diffusion import (
    DiffusionOutcome,
    edge_infection_probability,
    gatekeepers,
    remove_top_gatekeepers,
    run_diffusion,
    run_independent_cascade,
    select_seeds,
)
from .graph import AttributedGraph, AttributeSchema, default_schema, load_graph, save_graph
from .netgen import GeneratorConfig, OpennessMatrix, generate_network, total_homophily

__version__ = "0.1.0"
