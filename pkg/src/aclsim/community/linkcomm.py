"""Links in Context: attribute-aware link clustering.

The context of a link is the set of (attribute, value) pairs its two endpoints
share. Two links meeting at a node are compared only when their contexts
intersect (links with an empty context are comparable only with each other);
their similarity is the Jaccard index of the inclusive neighborhoods of the
two non-shared endpoints. Links are merged by single linkage in order of
decreasing similarity; whatever remains disconnected is joined in a final
level so the dendrogram always has a single root. The dendrogram is cut at
the level of maximum partition density and each link cluster becomes the node
set of its endpoints, so nodes may belong to several clusters.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from ..graph import AttributedGraph, GraphError
from .cover import CommunityCover, CoverError, Method


@dataclass(frozen=True)
class LinkCluster:
    edges: frozenset[int]
    context: frozenset[tuple[str, str]] = field(default_factory=frozenset)


def link_context(g: AttributedGraph, edge: tuple[int, int]) -> frozenset[tuple[str, str]]:
    u, v = edge
    if not g.has_edge(u, v):
        raise GraphError(f"edge not found: ({u}, {v})")
    pu, pv = g.profile(u), g.profile(v)
    return frozenset((a, x) for a, x, y in zip(g.schema.names, pu, pv) if x == y)


def _density_term(m_c: int, n_c: int) -> float:
    if n_c <= 2:
        return 0.0
    return max(0.0, m_c * (m_c - (n_c - 1)) / ((n_c - 2) * (n_c - 1)))


def partition_density(g: AttributedGraph, link_clusters: Sequence[LinkCluster]) -> float:
    """Partition density of a partition of the edge set, contributions clamped at 0."""
    m = g.number_of_edges()
    seen: set[int] = set()
    total = 0
    for lc in link_clusters:
        if seen & lc.edges:
            raise CoverError("link clusters overlap")
        seen |= lc.edges
    if seen != set(range(m)):
        raise CoverError("link clusters must cover every edge exactly once")
    if m == 0:
        return 0.0
    for lc in link_clusters:
        nodes = {x for e in lc.edges for x in g.edges[e]}
        total += _density_term(len(lc.edges), len(nodes))
    return 2.0 * total / m


def _similarities(g: AttributedGraph, contexts: list[frozenset]) -> list[tuple[float, int, int]]:
    """(similarity, edge id, edge id) for every comparable pair of adjacent links."""
    edge_id = {e: i for i, e in enumerate(g.edges)}
    inclusive = {n: frozenset(g.neighbors(n)) | {n} for n in g.nodes}
    out = []
    for k in g.nodes:
        nbrs = g.neighbors(k)
        for i, j in combinations(nbrs, 2):
            e1 = edge_id[(k, i) if k < i else (i, k)]
            e2 = edge_id[(k, j) if k < j else (j, k)]
            c1, c2 = contexts[e1], contexts[e2]
            if c1 or c2:
                if not c1 & c2:
                    continue
            ni, nj = inclusive[i], inclusive[j]
            sim = len(ni & nj) / len(ni | nj)
            a, b = (e1, e2) if e1 < e2 else (e2, e1)
            out.append((sim, a, b))
    out.sort(key=lambda t: (-t[0], t[1], t[2]))
    return out


@dataclass
class LinkDendrogram:
    """Result of single-linkage link clustering.

    ``levels`` holds the partition density after each merge level;
    ``best_level`` indexes the maximum (0 means every link on its own).
    """

    labels: list[int]
    contexts: list[frozenset]
    levels: list[float]
    best_level: int

    def clusters(self) -> list[LinkCluster]:
        groups: dict[int, list[int]] = {}
        for e, lab in enumerate(self.labels):
            groups.setdefault(lab, []).append(e)
        out = []
        for edges in groups.values():
            ctx = frozenset.intersection(*(self.contexts[e] for e in edges))
            out.append(LinkCluster(frozenset(edges), ctx))
        return out


def cluster_links(g: AttributedGraph) -> LinkDendrogram:
    m = g.number_of_edges()
    contexts = [link_context(g, e) for e in g.edges]
    parent = list(range(m))
    nodes_of = [set(e) for e in g.edges]
    edges_of = [1] * m

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    score = 0.0  # sum of density terms over current clusters
    levels = [0.0]
    best_score, best_level = 0.0, 0
    best_labels = list(range(m))

    def union(a: int, b: int) -> None:
        nonlocal score
        ra, rb = find(a), find(b)
        if ra == rb:
            return
        if len(nodes_of[ra]) < len(nodes_of[rb]):
            ra, rb = rb, ra
        score -= _density_term(edges_of[ra], len(nodes_of[ra]))
        score -= _density_term(edges_of[rb], len(nodes_of[rb]))
        parent[rb] = ra
        nodes_of[ra] |= nodes_of[rb]
        edges_of[ra] += edges_of[rb]
        nodes_of[rb] = set()
        score += _density_term(edges_of[ra], len(nodes_of[ra]))

    def close_level() -> None:
        nonlocal best_score, best_level, best_labels
        d = 2.0 * score / m
        levels.append(d)
        if d > best_score + 1e-12:
            best_score, best_level = d, len(levels) - 1
            best_labels = [find(e) for e in range(m)]

    sims = _similarities(g, contexts)
    i = 0
    while i < len(sims):
        s = sims[i][0]
        changed = False
        while i < len(sims) and sims[i][0] == s:
            _, a, b = sims[i]
            if find(a) != find(b):
                union(a, b)
                changed = True
            i += 1
        if changed:
            close_level()

    roots = sorted({find(e) for e in range(m)})
    if len(roots) > 1:
        for r in roots[1:]:
            union(roots[0], r)
        close_level()

    return LinkDendrogram(best_labels, contexts, levels, best_level)


def links_in_context_communities(g: AttributedGraph) -> CommunityCover:
    if len(g) == 0:
        return CommunityCover.build([], overlapping=True, method=Method.LIC)
    clusters: list[set[int]] = []
    if g.number_of_edges():
        dendro = cluster_links(g)
        for lc in dendro.clusters():
            clusters.append({x for e in lc.edges for x in g.edges[e]})
    isolated = [[n] for n in g.nodes if g.degree(n) == 0]
    return CommunityCover.build(clusters + isolated, overlapping=True, method=Method.LIC)
