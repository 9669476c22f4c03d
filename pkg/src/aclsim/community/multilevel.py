"""Multilevel (Louvain-style) modularity optimization.

Local moving sweeps nodes in ascending id order and moves each to the
neighboring community with the largest strictly positive gain; communities are
then collapsed into super-nodes and the process repeats until a full round
improves modularity by no more than ``GAIN_TOL``.
"""

from __future__ import annotations

from ..graph import AttributedGraph
from .cover import CommunityCover, Method

GAIN_TOL = 1e-10


def _one_level(adj: list[dict[int, float]], loops: list[float], m2: float) -> tuple[list[int], bool]:
    n = len(adj)
    strength = [sum(nb.values()) + loops[i] for i, nb in enumerate(adj)]
    comm = list(range(n))
    tot = strength[:]
    improved = False
    moved = True
    while moved:
        moved = False
        for i in range(n):
            ci = comm[i]
            ki = strength[i]
            links: dict[int, float] = {}
            for j, w in adj[i].items():
                links[comm[j]] = links.get(comm[j], 0.0) + w
            tot[ci] -= ki
            # gain of joining c (up to a constant factor): k_i,in(c) - tot(c) k_i / 2M
            best = ci
            best_gain = links.get(ci, 0.0) - tot[ci] * ki / m2
            for c in sorted(links):
                gain = links[c] - tot[c] * ki / m2
                if gain > best_gain + GAIN_TOL * m2:
                    best, best_gain = c, gain
            tot[best] += ki
            if best != ci:
                comm[i] = best
                moved = True
                improved = True
    # renumber in order of first appearance
    relabel: dict[int, int] = {}
    out = [relabel.setdefault(c, len(relabel)) for c in comm]
    return out, improved


def multilevel_communities(g: AttributedGraph) -> CommunityCover:
    nodes = g.nodes
    if not nodes:
        return CommunityCover.build([], method=Method.MC)
    index = {n: i for i, n in enumerate(nodes)}
    adj: list[dict[int, float]] = [dict() for _ in nodes]
    for u, v in g.edges:
        adj[index[u]][index[v]] = 1.0
        adj[index[v]][index[u]] = 1.0
    loops = [0.0] * len(nodes)
    m2 = 2.0 * g.number_of_edges()
    members: list[list[int]] = [[n] for n in nodes]
    if m2 == 0:
        return CommunityCover.build(members, method=Method.MC)

    while True:
        comm, improved = _one_level(adj, loops, m2)
        if not improved:
            break
        k = max(comm) + 1
        new_members: list[list[int]] = [[] for _ in range(k)]
        new_adj: list[dict[int, float]] = [dict() for _ in range(k)]
        new_loops = [0.0] * k
        for i, c in enumerate(comm):
            new_members[c].extend(members[i])
            new_loops[c] += loops[i]
            for j, w in adj[i].items():
                d = comm[j]
                if d == c:
                    new_loops[c] += w  # each internal edge seen from both ends
                else:
                    new_adj[c][d] = new_adj[c].get(d, 0.0) + w
        adj, loops, members = new_adj, new_loops, new_members
    return CommunityCover.build(members, method=Method.MC)
