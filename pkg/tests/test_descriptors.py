import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pynetdesc.base import (
    BadLambdaError,
    SingletonGraphError,
    TooLargeError,
    build_graph,
    shortest_path_tree,
)
from pynetdesc.descriptors import (
    Lambda,
    aggregates,
    balance_gap,
    betweenness,
    betweenness_oracle,
    descriptor_table,
    pair_sum,
    reach,
    transmission,
    tree_edge_betweenness,
)
from pynetdesc.generators import broom, complete, cycle, path, star
from pynetdesc.search import enumerate_connected, random_connected

LAMBDAS = [0.1, 0.3, 0.49, 0.7, 0.9]


def test_Lambda():

    assert Lambda(0.5).value == 0.5
    assert Lambda("0.25").value == 0.25
    assert float(Lambda(0.3)) == 0.3

    for bad in [0, 1, -0.1, 1.5, float("nan"), float("inf"), "abc", None]:
        with pytest.raises(BadLambdaError):
            Lambda(bad)

    with pytest.raises(BadLambdaError):
        transmission(path(3), 1.0)


def test_transmission():

    np.testing.assert_allclose(transmission(complete(4), 0.5), [1.5] * 4)
    np.testing.assert_approx_equal(transmission(path(3), 0.5)[0], 1.0)
    np.testing.assert_approx_equal(transmission(broom(5, 2), 0.5)[0], 2.0)

    # against networkx distances
    g = build_graph(7, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 0), (1, 4)])
    G = g.to_networkx()
    lam = 0.37
    expected = [
        sum(d * lam**d for d in nx.single_source_shortest_path_length(G, u).values())
        for u in range(g.n)
    ]
    np.testing.assert_allclose(transmission(g, lam), expected, rtol=1e-12)


def test_transmission_small_lambda():

    lam = 1e-6
    for g in [path(6), star(6), cycle(6), broom(6, 3)]:
        assert np.all(transmission(g, lam) < 2 * g.n * lam)


def test_betweenness():

    lam = 0.5

    edge_b, c = betweenness(complete(5), lam)
    np.testing.assert_allclose(list(edge_b.values()), lam)
    np.testing.assert_allclose(c, 4 * lam)

    edge_b, c = betweenness(path(3), lam)
    assert edge_b == {(0, 1): pytest.approx(0.75), (1, 2): pytest.approx(0.75)}
    np.testing.assert_allclose(c, [0.75, 1.5, 0.75])

    # a pair routed through the centre counts on both of its edges there
    n = 4
    _, c = betweenness(star(n), lam)
    np.testing.assert_approx_equal(c[0], (n - 1) * lam + (n - 1) * (n - 2) * lam**2)
    np.testing.assert_approx_equal(c[0], 3.0)


def test_betweenness_oracle():

    lam = 0.5
    edge_b, c = betweenness_oracle(cycle(4), lam)
    # the pair itself plus half of each antipodal pair
    np.testing.assert_allclose(list(edge_b.values()), lam + 2 * 0.5 * lam**2)
    np.testing.assert_allclose(c, 1.5)

    edge_b, _ = betweenness_oracle(complete(3), lam)
    np.testing.assert_allclose(list(edge_b.values()), 0.5)

    with pytest.raises(TooLargeError):
        betweenness_oracle(path(11), lam)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_oracle_equivalence_exhaustive(n):

    for g in enumerate_connected(n):
        for lam in LAMBDAS:
            fast, c_fast = betweenness(g, lam)
            slow, c_slow = betweenness_oracle(g, lam)
            assert fast.keys() == slow.keys()
            np.testing.assert_allclose(
                [fast[e] for e in g.edges], [slow[e] for e in g.edges], atol=1e-9
            )
            np.testing.assert_allclose(c_fast, c_slow, atol=1e-9)


@pytest.mark.slow
def test_oracle_equivalence_random_n6():

    for seed in range(1000):
        g = random_connected(6, 0.5, seed=seed)
        lam = LAMBDAS[seed % len(LAMBDAS)]
        fast, _ = betweenness(g, lam)
        slow, _ = betweenness_oracle(g, lam)
        np.testing.assert_allclose(
            [fast[e] for e in g.edges], [slow[e] for e in g.edges], atol=1e-9
        )


def test_descriptor_table():

    lam = 0.5
    table = descriptor_table(star(4), lam)
    np.testing.assert_approx_equal(table.c[0], 3.0)
    np.testing.assert_approx_equal(table.networkness[0], 2.0)
    np.testing.assert_approx_equal(table.surplus[0], 1.5)

    np.testing.assert_allclose(table.networkness, table.c / table.t, rtol=1e-12)
    np.testing.assert_allclose(table.surplus, table.c - table.t, atol=1e-12)

    table = descriptor_table(path(3), lam)
    sum_t, sum_c, pairs = table.balance
    np.testing.assert_approx_equal(sum_t, 3.0)
    np.testing.assert_approx_equal(sum_c, 3.0)
    np.testing.assert_approx_equal(pairs, 3.0)

    df = table.to_frame()
    assert list(df.columns) == ["t", "c", "networkness", "surplus"]
    assert df.index.name == "vertex"
    assert list(table.edges_frame().columns) == ["u", "v", "b"]

    assert "Exponential Descriptors" in table.summary()

    with pytest.raises(SingletonGraphError):
        descriptor_table(path(1), lam)


def test_aggregates():

    summary = aggregates(descriptor_table(path(3), 0.5))
    assert summary.mc == pytest.approx(0.75) and summary.witnesses["mc"] == 0
    assert summary.Mc == pytest.approx(1.5) and summary.witnesses["Mc"] == 1

    # ties go to the smallest vertex
    summary = aggregates(descriptor_table(complete(4), 0.3))
    assert all(v == 0 for v in summary.witnesses.values())
    assert summary.mN == pytest.approx(1.0) and summary.MN == pytest.approx(1.0)
    assert summary.mnu == pytest.approx(0.0, abs=1e-12)
    assert summary.Mnu == pytest.approx(0.0, abs=1e-12)

    g = broom(5, 2)
    table = descriptor_table(g, 0.5)
    summary = aggregates(table)
    assert summary.witnesses["mt"] == 0
    assert summary.mt == pytest.approx(2.0)

    for name, value in summary.values().items():
        arr = {"t": table.t, "c": table.c, "N": table.networkness, "nu": table.surplus}[
            name[1:]
        ]
        assert arr[summary.witnesses[name]] == value
    assert summary.mt <= summary.Mt and summary.mnu <= summary.Mnu

    d = summary.to_dict()
    assert set(d) == {"mt", "Mt", "mc", "Mc", "mN", "MN", "mnu", "Mnu"}


@pytest.mark.parametrize("n", [2, 3, 4, 5])
@pytest.mark.parametrize("lam", LAMBDAS)
def test_balance_exhaustive(n, lam):

    for g in enumerate_connected(n):
        table = descriptor_table(g, lam)
        assert balance_gap(table) <= 1e-12
        np.testing.assert_allclose(table.balance[2], table.balance[0], rtol=1e-12)
        assert np.all(table.t > 0) and np.all(table.c > 0)


@pytest.mark.slow
@pytest.mark.parametrize("lam", LAMBDAS)
def test_balance_exhaustive_n6(lam):

    for g in enumerate_connected(6):
        assert balance_gap(descriptor_table(g, lam)) <= 1e-12


@pytest.mark.parametrize("seed", range(50))
def test_balance_random(seed):

    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 41))
    g = random_connected(n, 0.2 if n > 10 else 0.5, seed=seed)
    table = descriptor_table(g, LAMBDAS[seed % 5])
    assert balance_gap(table) <= 1e-12


@pytest.mark.slow
def test_balance_random_1000():

    for seed in range(1000):
        n = 2 + seed % 39
        g = random_connected(n, 0.2 if n > 10 else 0.5, seed=seed)
        assert balance_gap(descriptor_table(g, LAMBDAS[seed % 5])) <= 1e-12


def test_edge_decomposition():

    g = random_connected(12, 0.3, seed=3)
    edge_b, c = betweenness(g, 0.6)
    np.testing.assert_allclose(2 * sum(edge_b.values()), c.sum(), rtol=1e-12)


def test_tree_pair_partition():

    for g in [path(7), star(6), broom(8, 4), shortest_path_tree(random_connected(15, 0.3, seed=1), 0)]:
        for lam in [0.2, 0.8]:
            fast, _ = betweenness(g, lam)
            direct = tree_edge_betweenness(g, lam)
            for e in g.edges:
                assert fast[e] == pytest.approx(direct[e], rel=1e-12)


def test_reach():

    lam = 0.4
    np.testing.assert_approx_equal(
        reach(path(6), lam)[0], sum(lam**i for i in range(1, 6)), significant=12
    )

    g = random_connected(14, 0.25, seed=8)
    table = descriptor_table(g, lam)
    assert np.all(table.c >= table.reach - 1e-12)
    for u in range(g.n):
        if g.degree(u) == 1:
            assert table.c[u] == pytest.approx(table.reach[u], rel=1e-12)


def test_pair_sum():

    for g in [path(5), cycle(7), random_connected(20, 0.2, seed=5)]:
        np.testing.assert_allclose(pair_sum(g, 0.7), transmission(g, 0.7).sum(), rtol=1e-12)


def test_shortest_path_tree_dominates():

    lam = 0.45
    for seed in range(10):
        g = random_connected(12, 0.35, seed=seed)
        for root in (0, 5):
            tree = shortest_path_tree(g, root)
            t_g, t_tree = transmission(g, lam), transmission(tree, lam)
            _, c_g = betweenness(g, lam)
            _, c_tree = betweenness(tree, lam)
            assert t_tree[root] == pytest.approx(t_g[root], rel=1e-12)
            assert c_tree[root] >= c_g[root] - 1e-12


def test_parallel_matches_serial():

    g = random_connected(24, 0.2, seed=11)
    serial = descriptor_table(g, 0.6)
    parallel = descriptor_table(g, 0.6, jobs=2)
    np.testing.assert_allclose(parallel.t, serial.t, rtol=1e-12)
    np.testing.assert_allclose(parallel.c, serial.c, rtol=1e-12)


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(0, 10**6),
    n=st.integers(3, 9),
    lam=st.floats(0.05, 0.95),
    data=st.data(),
)
def test_relabel_invariance(seed, n, lam, data):

    g = random_connected(n, 0.5, seed=seed)
    perm = data.draw(st.permutations(range(n)))
    h = g.relabel(perm)

    tg, th = descriptor_table(g, lam), descriptor_table(h, lam)
    # vertex u of g is vertex perm[u] of h
    np.testing.assert_allclose(th.t[list(perm)], tg.t, rtol=1e-12)
    np.testing.assert_allclose(th.c[list(perm)], tg.c, rtol=1e-12)
    for (u, v), b in tg.edge_betweenness.items():
        e = (min(perm[u], perm[v]), max(perm[u], perm[v]))
        assert th.edge_betweenness[e] == pytest.approx(b, rel=1e-12)

    ag, ah = aggregates(tg), aggregates(th)
    for name, value in ag.values().items():
        assert ah.values()[name] == pytest.approx(value, rel=1e-12, abs=1e-12)
