from math import comb

import networkx as nx
import pytest

from pynetdesc.base import (
    BadLambdaError,
    GivenUpAfterRetriesError,
    NetDescError,
    NTooLargeError,
    distance_profile,
)
from pynetdesc.bounds import cycle_bound, lemma_sequences, table1_bounds
from pynetdesc.generators import complete, cycle, path, star
from pynetdesc.search import (
    NOT_APPLICABLE,
    VERIFIED,
    GraphCode,
    Counterexample,
    _scan_range,
    articulation_points,
    enumerate_connected,
    is_biconnected,
    open_problems_table,
    probe_conjecture,
    probe_open_problems,
    random_connected,
    scan_all,
    verify_claims,
)


def connected_count(n):
    """Labeled connected graphs on n vertices, by the standard recurrence."""
    counts = {1: 1}
    for m in range(2, n + 1):
        total = 2 ** comb(m, 2)
        for k in range(1, m):
            total -= comb(m - 1, k - 1) * counts[k] * 2 ** comb(m - k, 2)
        counts[m] = total
    return counts[n]


@pytest.mark.parametrize("n, expected", [(2, 1), (3, 4), (4, 38), (5, 728), (6, 26704)])
def test_enumerate_connected_counts(n, expected):

    graphs = list(enumerate_connected(n))
    assert len(graphs) == expected == connected_count(n)
    assert len({g.code for g in graphs}) == expected
    # increasing code order
    assert [g.code for g in graphs] == sorted(g.code for g in graphs)


@pytest.mark.slow
def test_enumerate_connected_n7():

    assert sum(1 for _ in enumerate_connected(7)) == 1866256 == connected_count(7)


def test_enumerate_connected_caps():

    with pytest.raises(NTooLargeError):
        next(enumerate_connected(8))
    with pytest.raises(NTooLargeError):
        next(enumerate_connected(9, allow_large=True))
    with pytest.raises(NetDescError):
        next(enumerate_connected(1))


def test_graph_code():

    for g in [path(5), star(5), cycle(5), complete(5)]:
        code = GraphCode.from_graph(g)
        assert code.is_connected()
        assert code.decode() == g
        assert code.edges() == list(g.edges)

    assert not GraphCode(4, 0b000001).is_connected()
    # three edges on four vertices but a triangle plus an isolated vertex
    assert not GraphCode(4, 0b001011).is_connected()


def test_articulation_points():

    assert articulation_points(path(5)) == {1, 2, 3}
    assert articulation_points(star(5)) == {0}
    assert articulation_points(cycle(5)) == set()
    assert articulation_points(complete(2)) == set()

    # deeper than the recursion limit
    assert articulation_points(path(5000)) == set(range(1, 4999))
    assert articulation_points(cycle(5000)) == set()

    for seed in range(30):
        g = random_connected(10, 0.25, seed=seed)
        assert articulation_points(g) == set(nx.articulation_points(g.to_networkx()))
        assert is_biconnected(g) == (g.n >= 3 and nx.is_biconnected(g.to_networkx()))

    assert not is_biconnected(complete(2))
    assert is_biconnected(cycle(3))


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_biconnected_profiles(n):

    admissible = set(lemma_sequences(n))
    length = n // 2
    for g in enumerate_connected(n):
        if not is_biconnected(g):
            continue
        for u in range(n):
            profile = tuple(int(x) for x in distance_profile(g, u))
            assert len(profile) <= length
            assert profile + (0,) * (length - len(profile)) in admissible


@pytest.mark.parametrize("n", [4, 5])
@pytest.mark.parametrize("lam", [0.3, 0.49])
def test_verify_claims(n, lam):

    report = verify_claims(n, lam)
    assert report.ok, report.summary()
    assert report.graphs_checked == connected_count(n)
    assert report.counterexamples == ()
    assert all(c.status == VERIFIED for c in report.claims)
    assert report.claim("balance").extremal_value <= 1e-12
    assert report.extras["shortcut_agrees"]

    bounds = table1_bounds(n, lam)
    assert report.claim("mt_lower").bound == bounds.mt_lower
    assert report.claim("Mc_upper").family == f"star(n={n})"
    assert report.claim("mt_lower").family.startswith("broom(")

    df = report.to_frame()
    assert df.index.name == "claim"
    assert len(df) == 15

    with pytest.raises(KeyError):
        report.claim("nonsense")


@pytest.mark.parametrize("n", [4, 5])
@pytest.mark.parametrize("lam", [0.6, 0.9])
def test_verify_claims_half_lambda_gate(n, lam):

    report = verify_claims(n, lam)
    assert report.claim("mt_upper").status == NOT_APPLICABLE
    assert report.claim("mc_upper").status == NOT_APPLICABLE
    assert report.claim("balance").status == VERIFIED


def test_verify_claims_parallel():

    serial = verify_claims(5, 0.3)
    parallel = verify_claims(5, 0.3, jobs=2)
    assert serial.to_dict() == parallel.to_dict()


@pytest.mark.slow
@pytest.mark.parametrize("n", [6, 7])
@pytest.mark.parametrize("lam", [0.1, 0.3, 0.49])
def test_verify_claims_large(n, lam):

    assert verify_claims(n, lam, jobs=4).ok


@pytest.mark.parametrize("n", [4, 5])
@pytest.mark.parametrize("lam", [0.1, 0.3, 0.49])
def test_probe_conjecture(n, lam):

    report = probe_conjecture(n, lam)
    assert report.ok
    result = report.claim("cycle_biconnected")
    assert result.status == VERIFIED
    assert result.extremal_value == pytest.approx(cycle_bound(n, lam))
    assert report.extras["cycle_Mt"] == pytest.approx(cycle_bound(n, lam))
    assert report.extras["biconnected_graphs"] > 0

    for high in (0.6, 0.7, 0.9):
        report = probe_conjecture(n, high)
        assert report.claim("cycle_biconnected").status == NOT_APPLICABLE
        assert "general_beats_cycle" in report.extras

    with pytest.raises(NetDescError):
        probe_conjecture(2, lam)


@pytest.mark.slow
@pytest.mark.parametrize("n", [6, 7])
def test_probe_conjecture_large(n):

    assert probe_conjecture(n, 0.3, jobs=4).ok


def test_probe_open_problems():

    lam = 0.4
    report = probe_open_problems(2, lam)
    assert report.extras["min_Mt"] == pytest.approx(lam)
    assert report.extras["min_Mc"] == pytest.approx(lam)
    assert report.claims == ()
    assert report.ok

    report = probe_open_problems(4, lam)
    assert report.graphs_checked == 38
    # no better than the complete graph at either
    assert report.extras["min_Mt"] <= 3 * lam + 1e-12
    assert report.extras["min_Mc"] <= 3 * lam + 1e-12
    code = GraphCode(4, report.extras["min_Mt_code"])
    assert [list(e) for e in code.edges()] == report.extras["min_Mt_edges"]

    df = open_problems_table(3, [0.2, 0.5, 0.8])
    assert len(df) == 3
    assert list(df["lambda"]) == [0.2, 0.5, 0.8]


def test_scan_merge():

    n, lam = 5, 0.45
    total = 1 << comb(n, 2)
    cuts = [0, total // 3, 2 * total // 3, total]
    a, b, c = (_scan_range(n, lam, lo, hi, True) for lo, hi in zip(cuts, cuts[1:]))

    left = a.merge(b).merge(c)
    right = a.merge(b.merge(c))
    full = scan_all(n, lam, track_biconnected=True)

    for scan in (left, right):
        assert scan.graphs == full.graphs == 728
        assert scan.biconnected == full.biconnected
        assert scan.biconnected_Mt == full.biconnected_Mt
        for name in full.lows:
            assert scan.lows[name] == full.lows[name]
            assert scan.highs[name] == full.highs[name]


@pytest.mark.parametrize("n", [4, 5, pytest.param(6, marks=pytest.mark.slow)])
@pytest.mark.parametrize("lam", [0.1, 0.3, 0.49])
def test_Mc_maximiser_is_star(n, lam):

    scan = scan_all(n, lam)
    g = GraphCode(n, scan.highs["Mc"].code).decode()
    assert g.is_tree
    assert sorted(g.degree(u) for u in range(n)) == [1] * (n - 1) + [n - 1]


def test_counterexample_to_dict():

    cx = Counterexample("mt_lower", 3, ((0, 1), (1, 2)), 0.5, 0.6)
    d = cx.to_dict()
    assert d["edges"] == [[0, 1], [1, 2]]
    assert d["kind"] == "inequality"


def test_random_connected(monkeypatch):

    g = random_connected(12, 0.3, seed=7)
    assert g == random_connected(12, 0.3, seed=7)
    assert nx.is_connected(g.to_networkx())

    assert random_connected(6, 1.0, seed=1) == complete(6)

    monkeypatch.setenv("NETDESC_SEED", "7")
    assert random_connected(12, 0.3) == g

    with pytest.raises(GivenUpAfterRetriesError):
        random_connected(30, 0.01, seed=0, max_tries=3)
    with pytest.raises(NetDescError):
        random_connected(1, 0.5)
    with pytest.raises(NetDescError):
        random_connected(5, 0.0)

    with pytest.raises(BadLambdaError):
        verify_claims(3, 1.5)
