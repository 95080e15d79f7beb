import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from infcen import synth
from infcen.exact import (
    ExplicitInstance,
    bayesian_mixture,
    critical_set_instance,
    enumerate_live_edge_graphs,
    exact_shapley,
    exact_shapley_perm,
    exact_shapley_rr,
    exact_sni,
    exact_spread,
    graph_to_instance,
    instances_close,
    is_isolated,
    is_sink,
    mask_of,
    members,
    null_instance,
    sink_projection,
    spread_table,
    weighted_exact_shapley,
)
from infcen.graph import Graph


def naive_spread(g, S, weights=None):
    """Spread by walking every live-edge graph with a Python BFS."""
    w = np.ones(g.n) if weights is None else np.asarray(weights)
    total = 0.0
    for live, p in enumerate_live_edge_graphs(g):
        adj = {}
        for u, v in live:
            adj.setdefault(u, []).append(v)
        seen = set(S)
        todo = list(S)
        while todo:
            u = todo.pop()
            for v in adj.get(u, ()):
                if v not in seen:
                    seen.add(v)
                    todo.append(v)
        total += p * sum(w[v] for v in seen)
    return total


def random_small_graph(rng, max_n=6, max_m=10, probs=(0.2, 0.5, 1.0)):
    n = int(rng.integers(2, max_n + 1))
    m = int(rng.integers(0, min(max_m, n * (n - 1)) + 1))
    return synth.random_graph(n, m, list(probs), rng)


class TestLiveEdge:
    def test_no_edges(self):
        assert list(enumerate_live_edge_graphs(Graph(3, [], [], []))) == [((), 1.0)]

    def test_one_edge(self):
        out = dict(enumerate_live_edge_graphs(Graph.from_edges(2, [(0, 1, 0.3)])))
        assert out == {(): pytest.approx(0.7), ((0, 1),): pytest.approx(0.3)}

    def test_two_edges(self):
        g = Graph.from_edges(3, [(0, 1, 0.5), (1, 2, 0.5)])
        out = list(enumerate_live_edge_graphs(g))
        assert len(out) == 4
        assert all(p == 0.25 for _, p in out)

    def test_probabilities_sum_to_one(self):
        g = random_small_graph(np.random.default_rng(0), max_m=12)
        assert abs(sum(p for _, p in enumerate_live_edge_graphs(g)) - 1) < 1e-12

    def test_too_many_edges(self):
        g = synth.random_graph(8, 25, [0.5], np.random.default_rng(0))
        with pytest.raises(ValueError, match="edges"):
            exact_spread(g, [0])


class TestSpread:
    def test_line(self):
        assert exact_spread(synth.line(3), [0]) == 3.0

    def test_fig1(self):
        # u reaches v and w independently with probability 1/2 each
        assert exact_spread(synth.fig1(0.6), [0]) == pytest.approx(1 + 2 * 0.5, abs=1e-15)

    def test_empty(self):
        assert exact_spread(synth.fig1(0.6), []) == 0.0

    @pytest.mark.parametrize("seed", range(6))
    def test_matches_naive_enumeration(self, seed):
        rng = np.random.default_rng(seed)
        g = random_small_graph(rng)
        w = rng.random(g.n)
        table = spread_table(g)
        wtable = spread_table(g, w)
        for S in range(1 << g.n):
            nodes = members(S)
            assert table[S] == pytest.approx(naive_spread(g, nodes), abs=1e-12)
            assert wtable[S] == pytest.approx(naive_spread(g, nodes, w), abs=1e-12)
            assert exact_spread(g, nodes) == pytest.approx(table[S], abs=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_monotone_submodular(self, seed):
        g = random_small_graph(np.random.default_rng(100 + seed), max_n=5, max_m=10)
        sigma = spread_table(g)
        full = (1 << g.n) - 1
        for S in range(full + 1):
            for T in range(full + 1):
                if S & T != S:
                    continue
                assert sigma[S] <= sigma[T] + 1e-12
                for v in range(g.n):
                    if T >> v & 1:
                        continue
                    b = 1 << v
                    assert sigma[S | b] - sigma[S] >= sigma[T | b] - sigma[T] - 1e-12


class TestShapleyOracles:
    def test_null_instance(self):
        assert np.allclose(exact_shapley(null_instance(3)), [1, 1, 1], atol=1e-15)

    def test_fig1_cross_oracle(self):
        g = synth.fig1(0.6)
        a = exact_shapley_perm(spread_table(g), 3)
        b = exact_shapley_rr(g)
        assert np.allclose(a, b, atol=1e-9)
        assert a.sum() == pytest.approx(3.0)

    def test_fig1_hand_terms(self):
        # with all three possible positions for u:
        # first (1/3): 1 + 2 * 0.5; second (1/3): (1 - p) * 1.5; last (1/3): (1 - p)^2
        p = 0.6
        u = (2.0 + (1 - p) * 1.5 + (1 - p) ** 2) / 3
        assert exact_shapley_rr(synth.fig1(p))[0] == pytest.approx(u, abs=1e-12)

    def test_star(self):
        g = synth.star(3)
        expected = [2.5, 0.5, 0.5, 0.5]
        assert np.allclose(exact_shapley_rr(g), expected, atol=1e-12)
        assert np.allclose(exact_shapley_perm(spread_table(g), 4), expected, atol=1e-12)

    def test_zero_probabilities(self):
        g = synth.random_graph(5, 10, [0.0], np.random.default_rng(0))
        assert np.allclose(exact_shapley_rr(g), 1.0, atol=1e-12)

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_symmetric_cycle(self, n):
        assert np.allclose(exact_shapley(synth.symmetric_cycle(n, 0.4)), 1.0, atol=1e-9)

    def test_perm_callable_and_limit(self):
        inst = critical_set_instance(3, [0], [0, 1])
        a = exact_shapley_perm(lambda S: inst.spread(S), 3)
        assert np.allclose(a, exact_shapley(inst))
        with pytest.raises(ValueError):
            exact_shapley_perm(lambda S: 0.0, 10)

    @pytest.mark.parametrize("seed", range(10))
    def test_efficiency(self, seed):
        g = random_small_graph(np.random.default_rng(seed))
        full = list(range(g.n))
        assert exact_shapley_rr(g).sum() == pytest.approx(exact_spread(g, full), abs=1e-9)
        inst = graph_to_instance(g)
        assert exact_shapley(inst).sum() == pytest.approx(inst.spread((1 << g.n) - 1), abs=1e-9)


class TestSNI:
    def test_sink(self):
        g = synth.star(3)
        assert exact_sni(g, 1) == 1.0

    def test_star_center(self):
        assert exact_sni(synth.star(3), 0) == 4.0

    def test_fig1(self):
        assert exact_sni(synth.fig1(0.6), 0) == pytest.approx(2.0)


class TestCriticalSet:
    @pytest.mark.parametrize("r", [1, 2, 3, 4])
    def test_values(self, r):
        n = r + 1
        v = r
        inst = critical_set_instance(n, range(r), range(n))
        psi = exact_shapley(inst)
        assert psi[v] == pytest.approx(r / (r + 1), abs=1e-9)
        for u in range(r):
            assert psi[u] == pytest.approx(1 + 1 / (r * (r + 1)), abs=1e-9)
        assert exact_sni(inst, v) == 1.0
        for u in range(r):
            assert exact_sni(inst, u) == (n if r == 1 else 1)

    def test_sink_and_isolated_nodes(self):
        # R = {0, 1}, U = {0, 1, 2, 3}, node 4 outside U
        inst = critical_set_instance(5, [0, 1], [0, 1, 2, 3])
        assert [is_sink(inst, v) for v in range(5)] == [False, False, True, True, True]
        assert [is_isolated(inst, v) for v in range(5)] == [False, False, False, False, True]
        # with |R| > 1 no single node triggers anything
        assert [exact_sni(inst, v) for v in range(5)] == [1.0] * 5

    def test_singleton_critical_set_is_not_sink(self):
        inst = critical_set_instance(3, [0], [0, 1, 2])
        assert not is_sink(inst, 0)
        assert exact_sni(inst, 0) == 3

    def test_projection_outside_u(self):
        inst = critical_set_instance(5, [0, 1], [0, 1, 2])
        proj = sink_projection(inst, 4)
        assert instances_close(proj, critical_set_instance(4, [0, 1], [0, 1, 2]))

    def test_projection_inside_u(self):
        inst = critical_set_instance(5, [0, 1], [0, 1, 2, 3])
        proj = sink_projection(inst, 3)
        assert instances_close(proj, critical_set_instance(4, [0, 1], [0, 1, 2]))

    def test_projection_relabels(self):
        # removing node 1 shifts node 2..4 down
        inst = critical_set_instance(5, [0, 3], [0, 1, 3, 4])
        proj = sink_projection(inst, 1)
        assert instances_close(proj, critical_set_instance(4, [0, 2], [0, 2, 3]))

    def test_projection_keeps_other_sinks(self):
        inst = critical_set_instance(5, [0, 1], [0, 1, 2, 3])
        psi = exact_shapley(inst)
        proj = sink_projection(inst, 4)
        assert exact_shapley(proj)[3] == pytest.approx(psi[3], abs=1e-12)
        assert exact_shapley(proj)[2] == pytest.approx(psi[2], abs=1e-12)

    def test_projection_requires_sink(self):
        with pytest.raises(ValueError):
            sink_projection(critical_set_instance(3, [0], [0, 1]), 0)

    def test_invalid(self):
        with pytest.raises(ValueError):
            critical_set_instance(3, [], [0])
        with pytest.raises(ValueError):
            critical_set_instance(3, [0, 1], [0])


class TestNullInstance:
    def test_all_ones(self):
        inst = null_instance(4)
        assert np.allclose(exact_shapley(inst), 1.0)
        assert all(exact_sni(inst, v) == 1.0 for v in range(4))
        assert all(is_sink(inst, v) and is_isolated(inst, v) for v in range(4))


def fixtures():
    rng = np.random.default_rng(4)
    out = [null_instance(3), critical_set_instance(4, [0, 1], [0, 1, 2])]
    out += [critical_set_instance(4, [1], [1, 3]), critical_set_instance(5, [0, 2], [0, 1, 2, 3])]
    out += [graph_to_instance(random_small_graph(rng, max_n=5, max_m=8)) for _ in range(4)]
    return out


@pytest.mark.parametrize("inst", fixtures())
def test_fixture_properties(inst):
    psi = exact_shapley(inst)
    sigma = spread_table(inst)
    full = (1 << inst.n) - 1
    assert psi.sum() == pytest.approx(sigma[full], abs=1e-9)
    for v in range(inst.n):
        if is_isolated(inst, v):
            assert is_sink(inst, v)
        if not is_sink(inst, v):
            continue
        assert exact_sni(inst, v) == pytest.approx(1.0, abs=1e-12)
        bit = 1 << v
        for S in range(full + 1):
            if S & bit:
                continue
            not_reached = sum(p for T, p in inst.rows[S].items() if not T & bit)
            assert sigma[S | bit] - sigma[S] == pytest.approx(not_reached, abs=1e-12)


def test_ic_node_with_out_edges_is_not_sink():
    g = Graph.from_edges(3, [(0, 1, 0.4), (1, 2, 0.0)])
    inst = graph_to_instance(g)
    assert not is_sink(inst, 0)
    assert is_sink(inst, 1)
    assert is_sink(inst, 2)


class TestGraphToInstance:
    def test_zero_probabilities(self):
        g = synth.random_graph(4, 6, [0.0], np.random.default_rng(1))
        assert instances_close(graph_to_instance(g), null_instance(4))

    def test_one_edge(self):
        inst = graph_to_instance(Graph.from_edges(2, [(0, 1, 1.0)]))
        assert inst.prob(0b01, 0b11) == 1.0
        assert inst.prob(0b10, 0b10) == 1.0

    def test_fig1_rows(self):
        inst = graph_to_instance(synth.fig1(0.6))
        for S, dist in inst.rows.items():
            assert sum(dist.values()) == pytest.approx(1.0, abs=1e-12)
        assert inst.prob(0b001, 0b111) == pytest.approx(0.25)

    def test_shapley_matches_graph_oracle(self):
        g = random_small_graph(np.random.default_rng(8))
        assert np.allclose(exact_shapley(graph_to_instance(g)), exact_shapley_rr(g), atol=1e-9)


class TestExplicitInstance:
    def test_validation(self):
        with pytest.raises(ValueError, match="sums"):
            ExplicitInstance(1, {0: {0: 1.0}, 1: {1: 0.5}})
        with pytest.raises(ValueError, match="contain"):
            ExplicitInstance(1, {0: {0: 1.0}, 1: {0: 1.0}})
        with pytest.raises(ValueError, match="empty"):
            ExplicitInstance(1, {0: {1: 1.0}, 1: {1: 1.0}})
        with pytest.raises(ValueError, match="one row"):
            ExplicitInstance(1, {0: {0: 1.0}})

    def test_json_round_trip(self):
        inst = graph_to_instance(synth.fig1(0.6))
        back = ExplicitInstance.from_json(inst.to_json())
        assert instances_close(inst, back, tol=0.0)

    def test_mask_helpers(self):
        assert mask_of([0, 3]) == 0b1001
        assert members(0b1001) == [0, 3]


class TestBayesian:
    def test_identity(self):
        inst = critical_set_instance(3, [0], [0, 1])
        assert instances_close(bayesian_mixture([inst], [1.0]), inst)

    @pytest.mark.parametrize("seed", range(3))
    def test_linearity(self, seed):
        rng = np.random.default_rng(seed)
        parts = [
            critical_set_instance(4, [0, 1], [0, 1, 2]),
            critical_set_instance(4, [3], [3, 0]),
            graph_to_instance(synth.random_graph(4, 5, [0.3, 0.8], rng)),
        ]
        lam = rng.dirichlet(np.ones(3))
        mix = bayesian_mixture(parts, lam)
        want = sum(l * exact_shapley(p) for l, p in zip(lam, parts))
        assert np.allclose(exact_shapley(mix), want, atol=1e-9)
        sni = [exact_sni(mix, v) for v in range(4)]
        want_sni = [sum(l * exact_sni(p, v) for l, p in zip(lam, parts)) for v in range(4)]
        assert np.allclose(sni, want_sni, atol=1e-9)

    def test_rejects_bad_weights(self):
        inst = null_instance(2)
        with pytest.raises(ValueError):
            bayesian_mixture([inst, inst], [0.7, 0.7])
        with pytest.raises(ValueError):
            bayesian_mixture([inst, null_instance(3)], [0.5, 0.5])


class TestWeighted:
    def test_uniform_weights(self):
        g = random_small_graph(np.random.default_rng(2))
        assert np.allclose(weighted_exact_shapley(g, np.ones(g.n)), exact_shapley_rr(g), atol=1e-12)

    @pytest.mark.parametrize("r", [1, 2, 3])
    def test_critical_set(self, r):
        n = r + 1
        w = np.linspace(0.5, 2.0, n)
        inst = critical_set_instance(n, range(r), range(n))
        psi = weighted_exact_shapley(inst, w)
        assert psi[r] == pytest.approx(r * w[r] / (r + 1), abs=1e-9)
        assert psi.sum() == pytest.approx(w.sum(), abs=1e-9)

    @pytest.mark.parametrize("seed", range(4))
    def test_graph_oracles_agree(self, seed):
        rng = np.random.default_rng(seed)
        g = random_small_graph(rng)
        w = rng.random(g.n) * 3
        a = weighted_exact_shapley(g, w)
        b = exact_shapley_perm(spread_table(g, w), g.n)
        assert np.allclose(a, b, atol=1e-9)
        assert a.sum() == pytest.approx(w.sum(), abs=1e-9)

    def test_instance_weights(self):
        w = [1.0, 2.0, 4.0]
        inst = critical_set_instance(3, [0, 1], [0, 1, 2])
        weighted = ExplicitInstance(3, inst.rows, w)
        assert np.allclose(exact_shapley(weighted), weighted_exact_shapley(inst, w))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_perm_and_rr_agree(seed):
    g = random_small_graph(np.random.default_rng(seed), max_n=5, max_m=8)
    assert np.allclose(exact_shapley_rr(g), exact_shapley_perm(spread_table(g), g.n), atol=1e-9)


def test_shapley_by_subset_formula():
    """Third route: weighted sum over subsets instead of permutations."""
    g = random_small_graph(np.random.default_rng(77), max_n=5)
    sigma = spread_table(g)
    n = g.n
    psi = np.zeros(n)
    for v in range(n):
        others = [u for u in range(n) if u != v]
        for size in range(n):
            coef = math.factorial(size) * math.factorial(n - size - 1) / math.factorial(n)
            for S in itertools.combinations(others, size):
                m = mask_of(S)
                psi[v] += coef * (sigma[m | 1 << v] - sigma[m])
    assert np.allclose(psi, exact_shapley_rr(g), atol=1e-9)
