"""Homophily-driven preferential attachment.

Nodes belong to one group per attribute value they hold. Pairs of groups carry
an openness factor in [0, 1] (1 inside a group), and the total homophily of two
nodes is the product of the factors over every pair of their groups. Newcomers
attach to node i with probability proportional to ``k_i * H``; internal links
between existing nodes are drawn proportionally to ``k_i * k_j * H``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .graph import AttributedGraph, AttributeSchema, GraphError, default_schema

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


class OpennessMatrix:
    """Symmetric group-openness factors over every (attribute, value) group.

    Groups are indexed in schema order. The diagonal is fixed at 1; unspecified
    off-diagonal entries default to 1.
    """

    def __init__(self, schema: AttributeSchema, overrides: Iterable[tuple[str, str, float]] = ()):
        self.schema = schema
        self.groups: list[tuple[str, str]] = schema.all_values()
        self._index: dict[str, int] = {}
        for i, (_, value) in enumerate(self.groups):
            if value in self._index:
                raise ConfigError(
                    f"value name {value!r} appears under several attributes; openness needs unique names"
                )
            self._index[value] = i
        n = len(self.groups)
        self.values = np.ones((n, n))
        self.overrides: list[tuple[str, str, float]] = []
        for a, b, lam in overrides:
            self.set(a, b, lam)

    def index(self, value: str) -> int:
        try:
            return self._index[value]
        except KeyError:
            raise GraphError(f"value not in openness matrix: {value!r}") from None

    def set(self, a: str, b: str, lam: float) -> None:
        i, j = self.index(a), self.index(b)
        lam = float(lam)
        if not 0.0 <= lam <= 1.0:
            raise ConfigError(f"openness factor for ({a}, {b}) must lie in [0, 1], got {lam}")
        if i == j:
            if lam != 1.0:
                raise ConfigError(f"openness of group {a!r} with itself is fixed at 1")
            return
        self.values[i, j] = self.values[j, i] = lam
        self.overrides.append((a, b, lam))

    def __getitem__(self, pair: tuple[str, str]) -> float:
        a, b = pair
        return float(self.values[self.index(a), self.index(b)])

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


def total_homophily(p: Sequence[str], q: Sequence[str], openness: OpennessMatrix) -> float:
    """Product of openness factors over all group pairs (p_i, q_j)."""
    pi = [openness.index(v) for v in p]
    qi = [openness.index(v) for v in q]
    return float(np.prod(openness.values[np.ix_(pi, qi)]))


def assign_attributes(rng: np.random.Generator, schema: AttributeSchema) -> tuple[str, ...]:
    return tuple(
        values[rng.choice(len(values), p=np.asarray(prior))]
        for (_, values), prior in zip(schema.attributes, schema.priors)
    )


def _normalize(weights: np.ndarray) -> np.ndarray:
    total = weights.sum()
    if total <= 0:
        return np.full(len(weights), 1.0 / len(weights))
    return weights / total


def newcomer_attachment_distribution(
    g: AttributedGraph, new_profile: Sequence[str], openness: OpennessMatrix
) -> dict[int, float]:
    """Probability that a newcomer with ``new_profile`` links to each existing node.

    Falls back to uniform (with a warning) when every weight is zero.
    """
    nodes = g.nodes
    if not nodes:
        raise GraphError("cannot attach to an empty graph")
    weights = np.array(
        [g.degree(n) * total_homophily(g.profile(n), new_profile, openness) for n in nodes]
    )
    if weights.sum() <= 0:
        log.warning("all attachment weights are zero; attaching uniformly")
    return dict(zip(nodes, _normalize(weights).tolist()))


def internal_edge_distribution(
    g: AttributedGraph, openness: OpennessMatrix
) -> dict[tuple[int, int], float]:
    """Probability of each non-adjacent pair (i < j, both with degree >= 1) gaining a link.

    Empty when no candidate pair exists.
    """
    nodes = [n for n in g.nodes if g.degree(n) >= 1]
    pairs = []
    weights = []
    for a, i in enumerate(nodes):
        for j in nodes[a + 1:]:
            if g.has_edge(i, j):
                continue
            pairs.append((i, j))
            weights.append(
                g.degree(i) * g.degree(j) * total_homophily(g.profile(i), g.profile(j), openness)
            )
    if not pairs:
        return {}
    return dict(zip(pairs, _normalize(np.array(weights)).tolist()))


@dataclass
class GeneratorConfig:
    n_nodes: int = 500
    m: int = 3
    m0: int | None = None
    internal_edges_per_step: int = 1
    schema: AttributeSchema = field(default_factory=default_schema)
    openness: OpennessMatrix | None = None
    rng_seed: int = 0

    def __post_init__(self):
        if self.m0 is None:
            self.m0 = self.m
        if self.openness is None:
            self.openness = OpennessMatrix(self.schema)

    def validate(self) -> None:
        if not 1 <= self.m <= self.m0 <= self.n_nodes:
            raise ConfigError(
                f"need 1 <= m <= m0 <= N, got m={self.m}, m0={self.m0}, N={self.n_nodes}"
            )
        if self.internal_edges_per_step < 0:
            raise ConfigError("internal_edges_per_step must be >= 0")
        if self.openness.schema != self.schema:
            raise ConfigError("openness matrix was built for a different schema")


# Step observer: (kind, degrees, excluded, chosen). ``kind`` is "newcomer" or
# "internal"; for internal links ``chosen`` is the pair and ``excluded`` empty.
StepObserver = Callable[[str, np.ndarray, frozenset, object], None]


class _Builder:
    """Mutable state during growth. Node ids are dense 0..n-1."""

    def __init__(self, n_max: int, openness: OpennessMatrix, n_attributes: int):
        self.openness = openness
        self.deg = np.zeros(n_max, dtype=np.int64)
        self.adj = np.zeros((n_max, n_max), dtype=bool)
        self.groups = np.zeros((n_max, n_attributes), dtype=np.int64)
        # Homophily between nodes, filled lazily as nodes appear.
        self.h = np.zeros((n_max, n_max))
        self.n = 0
        self.edges: list[tuple[int, int]] = []

    def add_node(self, profile: Sequence[str]) -> int:
        i = self.n
        self.groups[i] = [self.openness.index(v) for v in profile]
        self.n += 1
        lam = self.openness.values
        row = lam[np.ix_(self.groups[i], self.groups[: self.n].ravel())]
        # product over all group pairs, per existing node
        row = row.reshape(len(self.groups[i]), self.n, -1).prod(axis=(0, 2))
        self.h[i, : self.n] = row
        self.h[: self.n, i] = row
        return i

    def link(self, i: int, j: int) -> None:
        self.adj[i, j] = self.adj[j, i] = True
        self.deg[i] += 1
        self.deg[j] += 1
        self.edges.append((i, j) if i < j else (j, i))


def generate_network(
    cfg: GeneratorConfig,
    rng: np.random.Generator | None = None,
    observer: StepObserver | None = None,
) -> AttributedGraph:
    """Grow an attributed scale-free graph of ``cfg.n_nodes`` nodes.

    Starts from an ``m0``-clique; each growth step adds a newcomer with ``m``
    links (targets drawn without replacement, renormalizing after each draw)
    and then attempts ``internal_edges_per_step`` links between existing nodes.
    """
    cfg.validate()
    if rng is None:
        rng = np.random.Generator(np.random.PCG64(cfg.rng_seed))
    n_total = cfg.n_nodes
    b = _Builder(n_total, cfg.openness, cfg.schema.n_attributes)
    profiles: list[tuple[str, ...]] = []

    for _ in range(cfg.m0):
        profiles.append(assign_attributes(rng, cfg.schema))
        b.add_node(profiles[-1])
    for i in range(cfg.m0):
        for j in range(i + 1, cfg.m0):
            b.link(i, j)

    while b.n < n_total:
        profile = assign_attributes(rng, cfg.schema)
        n_old = b.n
        new = b.add_node(profile)
        profiles.append(profile)
        base = b.deg[:n_old] * b.h[new, :n_old]
        if base.sum() <= 0:
            log.warning("newcomer %d has zero attachment weight everywhere; attaching uniformly", new)
        weights = base.astype(float)
        available = np.ones(n_old, dtype=bool)
        targets = []
        for _ in range(cfg.m):
            w = np.where(available, weights, 0.0)
            total = w.sum()
            if total > 0:
                p = w / total
            else:
                p = available / available.sum()
            t = int(rng.choice(n_old, p=p))
            if observer is not None:
                observer("newcomer", b.deg[:n_old].copy(), frozenset(targets), t)
            targets.append(t)
            available[t] = False
        for t in targets:
            b.link(new, t)

        for _ in range(cfg.internal_edges_per_step):
            pair = _draw_internal_pair(b, rng)
            if pair is None:
                break
            if observer is not None:
                observer("internal", b.deg[: b.n].copy(), frozenset(), pair)
            b.link(*pair)

    return AttributedGraph(cfg.schema, dict(enumerate(profiles)), b.edges)


def _draw_internal_pair(b: _Builder, rng: np.random.Generator) -> tuple[int, int] | None:
    n = b.n
    k = b.deg[:n].astype(float)
    w = np.outer(k, k) * b.h[:n, :n]
    w[b.adj[:n, :n]] = 0.0
    iu = np.triu_indices(n, 1)
    cand = ~b.adj[:n, :n][iu] & (k[iu[0]] > 0) & (k[iu[1]] > 0)
    if not cand.any():
        return None
    flat = np.where(cand, w[iu], 0.0)
    total = flat.sum()
    p = flat / total if total > 0 else cand / cand.sum()
    idx = int(rng.choice(len(p), p=p))
    return int(iu[0][idx]), int(iu[1][idx])
