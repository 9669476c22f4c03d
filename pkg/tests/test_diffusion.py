from fractions import Fraction

import numpy as np
import pytest

from aclsim.diffusion import (
    DiffusionError,
    as_fraction,
    directed_edge_index,
    edge_infection_probability,
    gatekeepers,
    remove_top_gatekeepers,
    round_half_away,
    run_diffusion,
    run_independent_cascade,
    select_seeds,
)
from aclsim.graph import GraphError

from conftest import SAME, make_graph, random_graph
from oracles import exact_expected_infected


def star_acl():
    # ACL {0, 1}; gatekeepers 2, 3, 4, 5 with degrees 3, 2, 1, 1
    return make_graph(8, [(0, 1), (0, 2), (1, 3), (0, 4), (1, 5), (2, 6), (2, 7), (3, 6)])


def test_gatekeeper_examples():
    g = star_acl()
    assert gatekeepers(g, {0, 1}) == {2, 3, 4, 5}
    assert gatekeepers(g, set(g.nodes)) == frozenset()
    assert gatekeepers(make_graph(3, [(1, 2)]), {0}) == frozenset()


def test_fraction_parsing_and_rounding():
    assert as_fraction("1/3") == Fraction(1, 3)
    assert as_fraction(0.5) == Fraction(1, 2)
    assert as_fraction(1 / 3) == Fraction(1, 3)
    with pytest.raises(DiffusionError):
        as_fraction("3/2")
    assert round_half_away(Fraction(1, 2)) == 1
    assert round_half_away(Fraction(3, 2)) == 2
    assert round_half_away(Fraction(4, 3)) == 1


def test_removal_examples():
    g = star_acl()
    h, removed = remove_top_gatekeepers(g, {0, 1}, "1/3")
    assert removed == {2}  # round(4/3) = 1, highest degree first
    assert 2 not in h and h.number_of_edges() == g.number_of_edges() - 3
    _, removed = remove_top_gatekeepers(g, {0, 1}, "2/3")
    assert removed == {2, 3, 4}  # round(8/3) = 3; 4 beats 5 on id
    same, removed = remove_top_gatekeepers(g, {0, 1}, 0)
    assert same is g and not removed
    _, removed = remove_top_gatekeepers(g, {0, 1}, "1/8")  # 0.5 rounds away from zero
    assert removed == {2}


def test_removal_ranks_by_original_degree_in_one_batch():
    # gatekeepers 2 and 3 both have degree 3; removing 2 would drop 3 to degree 2
    g = make_graph(6, [(0, 2), (0, 3), (2, 3), (2, 4), (3, 5), (1, 0)])
    _, removed = remove_top_gatekeepers(g, {0, 1}, 1)
    assert removed == {2, 3}


def test_select_seeds(rng):
    g = star_acl()
    seeds = select_seeds(g, {0, 1}, 4, rng)
    assert len(seeds) == 4 and not seeds & {0, 1}
    assert select_seeds(g, {0, 1}, 0, rng) == frozenset()
    assert select_seeds(g, {0, 1}, 6, rng) == {2, 3, 4, 5, 6, 7}
    with pytest.raises(DiffusionError, match="only 6 eligible"):
        select_seeds(g, {0, 1}, 7, rng)


def test_select_seeds_uniform(rng):
    g = make_graph(5, [])
    counts = np.zeros(5)
    for _ in range(4000):
        for v in select_seeds(g, {0}, 1, rng):
            counts[v] += 1
    assert counts[0] == 0
    assert np.all(np.abs(counts[1:] / 4000 - 0.25) < 0.03)


def test_edge_probability_examples():
    g = make_graph(4, [(0, 1), (0, 2), (0, 3)],
                   [SAME, SAME, ("female", "Ikea", "Leeds"), ("female", "Ikea", "York")])
    assert edge_infection_probability(g, 0, 1, 0.6) == pytest.approx(0.6)
    assert edge_infection_probability(g, 0, 2, 0.6) == 0.0
    assert edge_infection_probability(g, 0, 3, 0.6) == pytest.approx(0.2)
    with pytest.raises(GraphError):
        edge_infection_probability(g, 1, 2, 0.6)


def test_cascade_extremes(rng):
    g = random_graph(rng, 20, 0.15)
    comp = next(set(c) for c in g.connected_components() if 0 in c)
    assert run_independent_cascade(g, {0}, 0.0, rng).infected == {0}
    out = run_independent_cascade(g, {0}, 1.0, rng)
    assert out.infected == comp
    assert all(step >= 1 for step, _, _ in out.trace)


def test_cascade_path_probabilities(rng):
    # p = 0.5 on each link of a -> b -> c
    g = make_graph(3, [(0, 1), (1, 2)])
    n = 10_000
    hits = np.zeros(3)
    for _ in range(n):
        for v in run_independent_cascade(g, {0}, 0.5, rng).infected:
            hits[v] += 1
    for v, p in ((1, 0.5), (2, 0.25)):
        assert abs(hits[v] / n - p) <= 3 * np.sqrt(p * (1 - p) / n)


def test_cascade_matches_enumeration(rng):
    for _ in range(5):
        g = random_graph(rng, 6, 0.45, profiles=True)
        if not 3 <= g.number_of_edges() <= 9:
            continue
        exact = exact_expected_infected(g, {0}, 0.9)
        n = 4000
        sizes = [len(run_independent_cascade(g, {0}, 0.9, rng).infected) for _ in range(n)]
        se = np.std(sizes) / np.sqrt(n)
        assert abs(np.mean(sizes) - exact) <= 3 * se + 1e-9


def test_coupled_runs_are_monotone_in_beta(rng):
    for _ in range(30):
        g = random_graph(rng, 25, 0.12, profiles=True)
        u = rng.random(2 * g.number_of_edges())
        prev = frozenset()
        for beta in (0.0, 0.2, 0.5, 0.8, 1.0):
            cur = run_independent_cascade(g, {0, 1}, beta, uniforms=u).infected
            assert prev <= cur
            prev = cur


def test_trace_is_synchronous_and_causal(rng):
    g = random_graph(rng, 30, 0.15, profiles=True)
    out = run_independent_cascade(g, {0}, 1.0, rng)
    when = {0: 0}
    for step, node, parent in out.trace:
        assert node not in when and g.has_edge(node, parent)
        assert when[parent] == step - 1
        when[node] = step
    assert out.rounds == max(when.values())


def test_directed_slots():
    g = make_graph(3, [(0, 1), (1, 2)])
    assert directed_edge_index(g) == {(0, 1): 0, (1, 0): 1, (1, 2): 2, (2, 1): 3}


def test_cascade_rejects_bad_input(rng):
    g = make_graph(2, [(0, 1)])
    with pytest.raises(DiffusionError):
        run_independent_cascade(g, {0}, 1.5, rng)
    with pytest.raises(GraphError):
        run_independent_cascade(g, {5}, 0.5, rng)
    with pytest.raises(DiffusionError):
        run_independent_cascade(g, {0}, 0.5, uniforms=[0.1])


def test_run_diffusion_deterministic_and_accounts_acl():
    g = random_graph(np.random.default_rng(3), 40, 0.1, profiles=True)
    acl = frozenset(range(8))
    a = run_diffusion(g, acl, 5, "1/3", 0.6, np.random.default_rng(1))
    b = run_diffusion(g, acl, 5, "1/3", 0.6, np.random.default_rng(1))
    assert a.infected == b.infected and a.trace == b.trace
    assert not a.seeds & acl and not a.seeds & a.removed_gatekeepers
    assert a.gatekeeper_total == len(gatekeepers(g, acl))
    assert a.infected_acl_fraction == a.infected_acl_count / 8
