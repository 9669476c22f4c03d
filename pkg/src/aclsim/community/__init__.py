"""Community detection: Multilevel (MC), Leading Eigenvector (LE), Links in Context (LiC)."""

from ..graph import AttributedGraph
from .cover import CommunityCover, CoverError, Method, load_cover, save_cover
from .eigenvector import leading_eigenvector_communities
from .linkcomm import (
    LinkCluster,
    cluster_links,
    link_context,
    links_in_context_communities,
    partition_density,
)
from .modularity import modularity
from .multilevel import multilevel_communities

_DETECTORS = {
    Method.MC: multilevel_communities,
    Method.LE: leading_eigenvector_communities,
    Method.LIC: links_in_context_communities,
}


def detect(g: AttributedGraph, method: Method | str) -> CommunityCover:
    if not isinstance(method, Method):
        method = Method.parse(method)
    return _DETECTORS[method](g)


__all__ = [
    "CommunityCover",
    "CoverError",
    "LinkCluster",
    "Method",
    "cluster_links",
    "detect",
    "leading_eigenvector_communities",
    "link_context",
    "links_in_context_communities",
    "load_cover",
    "modularity",
    "multilevel_communities",
    "partition_density",
    "save_cover",
]
