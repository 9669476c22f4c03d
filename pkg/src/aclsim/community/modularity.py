from __future__ import annotations

from ..graph import AttributedGraph
from .cover import CommunityCover, CoverError


def modularity(g: AttributedGraph, partition: CommunityCover) -> float:
    """Newman modularity ``sum_c (e_c/M - (d_c/2M)^2)`` of a disjoint cover."""
    if partition.overlapping:
        raise CoverError("modularity requires a partition")
    if not partition.is_partition_of(g):
        raise CoverError("modularity requires a partition covering every node exactly once")
    m = g.number_of_edges()
    if m == 0:
        raise CoverError("modularity is undefined on a graph without edges")
    member = partition.membership()
    intra = [0] * len(partition)
    tot = [0] * len(partition)
    for u, v in g.edges:
        if member[u] == member[v]:
            intra[member[u]] += 1
    for n, k in g.degrees().items():
        tot[member[n]] += k
    return sum(e / m - (d / (2.0 * m)) ** 2 for e, d in zip(intra, tot))
