"""Attribute-weighted Independent Cascade with gatekeeper removal.

An infected node v gets one chance to infect each inactive neighbor u, with
probability ``beta * shared(v, u) / n_attributes``. Gatekeepers are trusted
nodes adjacent to the ACL; removing the highest-degree ones cuts the channels
through which a post can leak into the ACL.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .graph import AttributedGraph, GraphError


class DiffusionError(ValueError):
    pass


def as_fraction(x: float | str | Fraction) -> Fraction:
    """Parse ``"1/3"``, ``0.5`` etc.; floats are snapped to the nearest small fraction."""
    if isinstance(x, Fraction):
        f = x
    elif isinstance(x, str):
        f = Fraction(x.strip())
    else:
        f = Fraction(float(x)).limit_denominator(1000)
    if not 0 <= f <= 1:
        raise DiffusionError(f"fraction must lie in [0, 1], got {x}")
    return f


def gatekeepers(g: AttributedGraph, acl: Iterable[int]) -> frozenset[int]:
    acl = set(acl)
    out = set()
    for u in acl:
        for v in g.neighbors(u):
            if v not in acl:
                out.add(v)
    return frozenset(out)


def round_half_away(x: Fraction) -> int:
    return int(math.floor(x + Fraction(1, 2))) if x >= 0 else -int(math.floor(-x + Fraction(1, 2)))


def remove_top_gatekeepers(
    g: AttributedGraph, acl: Iterable[int], fraction: float | str | Fraction
) -> tuple[AttributedGraph, frozenset[int]]:
    """Delete the ``round(fraction * |gatekeepers|)`` highest-degree gatekeepers in one batch."""
    frac = as_fraction(fraction)
    gk = gatekeepers(g, acl)
    k = round_half_away(frac * len(gk))
    if k == 0:
        return g, frozenset()
    ranked = sorted(gk, key=lambda v: (-g.degree(v), v))
    removed = frozenset(ranked[:k])
    return g.without_nodes(removed), removed


def select_seeds(
    g: AttributedGraph, acl: Iterable[int], s: int, rng: np.random.Generator
) -> frozenset[int]:
    """``s`` nodes drawn uniformly without replacement from outside the ACL."""
    acl = set(acl)
    eligible = [v for v in g.nodes if v not in acl]
    if s < 0:
        raise DiffusionError("seed count must be >= 0")
    if s > len(eligible):
        raise DiffusionError(
            f"cannot draw {s} seeds: only {len(eligible)} eligible nodes "
            f"({len(g)} nodes, {len(acl & set(g.nodes))} in the ACL)"
        )
    if s == 0:
        return frozenset()
    picks = rng.choice(len(eligible), size=s, replace=False)
    return frozenset(eligible[i] for i in picks)


def edge_infection_probability(g: AttributedGraph, v: int, u: int, beta: float) -> float:
    if not g.has_edge(v, u):
        raise GraphError(f"nodes {v} and {u} are not adjacent")
    return g.shared_attribute_count(v, u) / g.schema.n_attributes * beta


@dataclass
class DiffusionOutcome:
    seeds: frozenset[int]
    infected: frozenset[int]
    trace: list[tuple[int, int, int]]  # (step, infected node, infecting node)
    rounds: int
    removed_gatekeepers: frozenset[int] = frozenset()
    gatekeeper_total: int = 0
    acl: frozenset[int] = field(default_factory=frozenset)

    @property
    def infected_acl_count(self) -> int:
        return len(self.infected & self.acl)

    @property
    def infected_acl_fraction(self) -> float:
        return self.infected_acl_count / len(self.acl) if self.acl else 0.0


def directed_edge_index(g: AttributedGraph) -> dict[tuple[int, int], int]:
    """Slot of each ordered attempt v->u in the uniform-draw vector: 2e for low->high, 2e+1 back."""
    idx = {}
    for e, (a, b) in enumerate(g.edges):
        idx[(a, b)] = 2 * e
        idx[(b, a)] = 2 * e + 1
    return idx


def run_independent_cascade(
    g: AttributedGraph,
    seeds: Iterable[int],
    beta: float,
    rng: np.random.Generator | None = None,
    uniforms: Sequence[float] | None = None,
) -> DiffusionOutcome:
    """Synchronous IC from ``seeds``.

    One uniform draw is attached to every ordered attempt v->u up front (see
    ``directed_edge_index``), and an attempt succeeds when its draw is below
    ``p_vu``. Passing the same ``uniforms`` at two values of ``beta`` couples
    the runs, so the infected set grows monotonically with ``beta``.
    """
    if not 0.0 <= beta <= 1.0:
        raise DiffusionError(f"beta must lie in [0, 1], got {beta}")
    seeds = frozenset(seeds)
    for v in seeds:
        if v not in g:
            raise GraphError(f"node not found: {v}")
    slot = directed_edge_index(g)
    if uniforms is None:
        if rng is None:
            raise DiffusionError("either rng or uniforms is required")
        uniforms = rng.random(2 * g.number_of_edges())
    elif len(uniforms) != 2 * g.number_of_edges():
        raise DiffusionError("uniforms must have one entry per ordered edge")
    scale = beta / g.schema.n_attributes

    infected = set(seeds)
    frontier = sorted(seeds)
    trace: list[tuple[int, int, int]] = []
    step = 0
    while frontier:
        step += 1
        fresh = []
        for v in frontier:
            pv = g.profile(v)
            for u in g.neighbors(v):
                if u in infected:
                    continue
                shared = sum(a == b for a, b in zip(pv, g.profile(u)))
                if uniforms[slot[(v, u)]] < shared * scale:
                    infected.add(u)
                    fresh.append(u)
                    trace.append((step, u, v))
        frontier = sorted(fresh)
    # the final round infected nobody
    return DiffusionOutcome(seeds, frozenset(infected), trace, rounds=step - 1 if step else 0)


def run_diffusion(
    g: AttributedGraph,
    acl: Iterable[int],
    seed_count: int,
    removal_fraction: float | str | Fraction,
    beta: float,
    rng: np.random.Generator,
) -> DiffusionOutcome:
    """Gatekeeper removal, then seeding outside the ACL, then one cascade."""
    acl = frozenset(acl)
    total = len(gatekeepers(g, acl))
    g2, removed = remove_top_gatekeepers(g, acl, removal_fraction)
    seeds = select_seeds(g2, acl, seed_count, rng)
    out = run_independent_cascade(g2, seeds, beta, rng)
    out.removed_gatekeepers = removed
    out.gatekeeper_total = total
    out.acl = acl
    return out
