import random
import warnings
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scholnet.errors import EmptyGraph, NoLocatedPairs, ZeroProductivity
from scholnet.geo import GeoPoint
from scholnet.metrics import (
    ALL,
    NonConvergence,
    betweenness_all,
    category_centrality_summary,
    category_matrix,
    collaboration_strength,
    connected_components,
    distance_profile,
    flow_score,
    giant_connected_component,
    knowledge_flow,
    local_clustering,
    pagerank,
    productivity_order,
    productivity_table,
    top_knowledge_hubs,
)
from scholnet.netbuild import (
    PaperIndex,
    aggregate_supernodes,
    build_collaboration_network,
)
from conftest import (
    graph_from_edges,
    identity_resolution,
    random_connected_graph,
    random_digraph,
    rec,
)
from oracles import betweenness_bruteforce, clustering_bruteforce, pagerank_dense


# --- collaboration strength --------------------------------------------------

def test_strength_examples():
    idx = PaperIndex({"i": {f"p{k}" for k in range(10)}, "j": {"p0", "q"}})
    assert collaboration_strength("i", "j", idx) == pytest.approx(1 / 20)
    idx = PaperIndex({"i": {"a"}, "j": {"a"}})
    assert collaboration_strength("i", "j", idx) == 1.0
    idx = PaperIndex({"i": {"a"}, "j": {"b"}})
    assert collaboration_strength("i", "j", idx) == 0
    idx = PaperIndex({"i": {str(k) for k in range(10)}, "j": {"0"}})
    assert collaboration_strength("i", "j", idx) == pytest.approx(0.1)


def test_strength_zero_productivity():
    with pytest.raises(ZeroProductivity):
        collaboration_strength("i", "j", PaperIndex({"j": {"a"}}))


def test_self_strength_is_reciprocal_paper_count():
    idx = PaperIndex({"i": {"a", "b", "c", "d"}})
    assert collaboration_strength("i", "i", idx) == 0.25


# --- knowledge flow -------------------------------------------------------

def test_flow_pure_sink():
    f = flow_score("x", k_in=2, k_out=0, w_in=10, w_out=0)
    assert (f.f_out, f.f_in) == (2, 0)


def test_flow_balanced():
    f = flow_score("x", k_in=3, k_out=3, w_in=5, w_out=5)
    assert (f.f_out, f.f_in) == (1.5, -1.5)


def test_flow_isolated_and_self_loop_only():
    g = graph_from_edges([("A", "A", 4)], directed=True, nodes=["B"])
    scores = {s.node: s for s in knowledge_flow(g)}
    for n in "AB":
        assert (scores[n].f_in, scores[n].f_out) == (0.0, 0.0)
        assert str(scores[n].f_in) == "0.0"


def test_flow_on_graph():
    g = graph_from_edges([("A", "B", 3), ("C", "B", 1), ("B", "A", 2)], directed=True)
    b = {s.node: s for s in knowledge_flow(g)}["B"]
    assert (b.k_in, b.k_out, b.w_in, b.w_out) == (2, 1, 4, 2)
    assert b.f_out == pytest.approx(2 * 4 / 6)
    assert b.f_in == pytest.approx(-1 * 2 / 6)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_flow_identities(seed):
    rng = random.Random(seed)
    nodes, edges = random_digraph(rng, rng.randint(1, 8), 0.4)
    g = graph_from_edges([(u, v, rng.randint(1, 20)) for u, v in edges], True, nodes)
    for s in knowledge_flow(g):
        total = s.w_in + s.w_out
        assert s.f_out * total == pytest.approx(s.k_in * s.w_in, rel=1e-12, abs=0)
        assert s.f_in * total == pytest.approx(-s.k_out * s.w_out, rel=1e-12, abs=0)
        assert s.f_out >= 0 >= s.f_in


# --- betweenness ------------------------------------------------------------

def test_betweenness_path():
    g = graph_from_edges([("a", "b"), ("b", "c")])
    assert betweenness_all(g) == {"a": 0, "b": 1, "c": 0}


def test_betweenness_star():
    g = graph_from_edges([("h", x) for x in "abcd"])
    b = betweenness_all(g)
    assert b["h"] == 6
    assert all(b[x] == 0 for x in "abcd")


def test_betweenness_complete_graph():
    nodes = "abcd"
    g = graph_from_edges([(u, v) for i, u in enumerate(nodes) for v in nodes[i + 1:]])
    assert set(betweenness_all(g).values()) == {0}


def test_betweenness_ignores_weights_and_loops():
    g = graph_from_edges([("a", "b", 9), ("b", "c", 1), ("b", "b", 5)])
    assert betweenness_all(g)["b"] == 1


def test_betweenness_split_geodesics():
    # square a-b-c-d-a: each of b,d carries half of the a-c pair
    g = graph_from_edges([("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])
    assert betweenness_all(g, exact=True) == dict.fromkeys("abcd", Fraction(1, 2))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_betweenness_matches_enumeration(seed):
    rng = random.Random(seed)
    nodes, edges = random_connected_graph(rng, rng.randint(1, 8), rng.random())
    g = graph_from_edges(edges, nodes=nodes)
    assert betweenness_all(g, exact=True) == betweenness_bruteforce(nodes, edges)


# --- pagerank ---------------------------------------------------------------

def test_pagerank_cycle_uniform():
    g = graph_from_edges([("a", "b"), ("b", "c"), ("c", "a")], directed=True)
    for v in pagerank(g).values():
        assert v == pytest.approx(1 / 3, abs=1e-12)


def test_pagerank_two_nodes():
    g = graph_from_edges([("A", "B")], directed=True)
    pr = pagerank(g)
    # closed form with uniform dangling redistribution
    a = 1 / (2 + 0.85)
    assert pr["A"] == pytest.approx(a, abs=1e-9)
    assert pr["B"] == pytest.approx(1 - a, abs=1e-9)
    assert pr["B"] > pr["A"]


def test_pagerank_empty():
    with pytest.raises(EmptyGraph):
        pagerank(graph_from_edges([]))


def test_pagerank_nonconvergence_warns():
    g = graph_from_edges([("a", "b"), ("b", "c")], directed=True)
    with pytest.warns(NonConvergence):
        pr = pagerank(g, max_iter=1)
    assert sum(pr.values()) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6), st.booleans())
def test_pagerank_matches_dense(seed, directed):
    rng = random.Random(seed)
    nodes, edges = random_digraph(rng, rng.randint(1, 10), rng.random() * 0.6)
    g = graph_from_edges(edges, directed, nodes)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        pr = pagerank(g)
    oracle = pagerank_dense(nodes, edges, directed)
    assert sum(pr.values()) == pytest.approx(1.0, abs=1e-9)
    for v in nodes:
        assert pr[v] == pytest.approx(oracle[v], abs=1e-6)


# --- clustering -------------------------------------------------------------

def test_clustering_examples():
    tri = graph_from_edges([("a", "b"), ("b", "c"), ("c", "a")])
    assert set(local_clustering(tri).values()) == {1.0}
    path = graph_from_edges([("a", "b"), ("b", "c")])
    assert local_clustering(path)["b"] == 0.0
    k4_minus = graph_from_edges([("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("c", "d")])
    c = local_clustering(k4_minus)
    assert c["a"] == pytest.approx(2 / 3)
    assert c["b"] == 1.0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_clustering_matches_bruteforce(seed):
    rng = random.Random(seed)
    nodes, edges = random_connected_graph(rng, rng.randint(1, 9), rng.random())
    g = graph_from_edges(edges, nodes=nodes)
    got = local_clustering(g)
    want = clustering_bruteforce(nodes, edges)
    for v in nodes:
        assert got[v] == pytest.approx(want[v])
        assert 0.0 <= got[v] <= 1.0


# --- category summaries -----------------------------------------------------

def test_category_means():
    g = graph_from_edges([("h", "a"), ("h", "b"), ("h", "c")])
    cats = {"h": "NRI", "a": "SU", "b": "SU", "c": "SC"}
    summary = category_centrality_summary(g, cats)
    assert list(summary) == ["NRI", "SU", "SC"]
    assert summary["NRI"].avg_degree == 3
    assert summary["NRI"].avg_betweenness == 3
    assert summary["SU"].members == 2
    assert summary["SU"].avg_degree == 1
    assert sum(s.avg_pagerank * s.members for s in summary.values()) == pytest.approx(1.0)


# --- components and hubs ----------------------------------------------------

def test_components_and_gcc():
    g = graph_from_edges([("b", "c"), ("a", "d"), ("x", "y"), ("y", "z")], nodes=["q"])
    assert connected_components(g) == [["a", "d"], ["b", "c"], ["q"], ["x", "y", "z"]]
    assert giant_connected_component(g) == {"x", "y", "z"}


def test_gcc_tie_breaks_lexicographically():
    g = graph_from_edges([("m", "n"), ("b", "c")])
    assert giant_connected_component(g) == {"b", "c"}


def test_gcc_weak_connectivity():
    g = graph_from_edges([("a", "b"), ("c", "b")], directed=True)
    assert giant_connected_component(g) == {"a", "b", "c"}


def test_hubs():
    g = graph_from_edges([("a", "h", 5), ("b", "h", 2), ("a", "b", 3), ("x", "y", 100)],
                         directed=True)
    assert top_knowledge_hubs(g, 2) == [("h", 7), ("b", 3)]
    with pytest.raises(ValueError):
        top_knowledge_hubs(g, 0)


def test_hubs_ignore_self_citations():
    g = graph_from_edges([("a", "a", 50), ("a", "b", 1), ("c", "a", 2)], directed=True)
    assert top_knowledge_hubs(g, 1) == [("a", 2)]


# --- distance profile -------------------------------------------------------

def _profile_fixture():
    cats = {"A": "NRI", "B": "SU", "C": "SU", "U": "SC"}
    locs = {"A": GeoPoint(0.0, 0.0), "B": GeoPoint(0.0, 0.1), "C": GeoPoint(0.0, 13.6)}
    res = identity_resolution(cats, locs)
    return cats, locs, res


def test_profile_single_bin_statistics():
    cats, locs, res = _profile_fixture()
    # both pairs within 50 km, strengths 1/(2*5) and 1/(2*1)
    locs = {"A": GeoPoint(0, 0), "B": GeoPoint(0, 0.1), "C": GeoPoint(0, 0.2)}
    idx = PaperIndex({"A": {"1", "2"}, "B": {"1", "a", "b", "c", "d"}, "C": {"1"}})
    g = graph_from_edges([("A", "B", 1), ("A", "C", 2)])
    prof = distance_profile(g, idx, locs, categories=cats)
    (b,) = prof.bins
    assert b.index == 1 and b.pair_count == 2 and b.event_weight == 3
    assert b.mean == pytest.approx(0.3)
    assert b.median == pytest.approx(0.3)
    assert b.q1 == pytest.approx(0.2)
    assert b.q3 == pytest.approx(0.4)


def test_profile_far_pair_and_exclusions():
    cats, locs, res = _profile_fixture()
    records = [rec("p1", 2000, "A", "B"), rec("p2", 2000, "A", "C"), rec("p3", 2000, "A", "U"),
               rec("p4", 2000, "A", "A")]
    g = build_collaboration_network(records, res)
    idx = PaperIndex.from_records(records, res)
    prof = distance_profile(g, idx, locs)
    bins = prof.by_index()
    # A-C spans about 1512 km
    assert bins[31].pair_count == 1
    assert bins[1].pair_count == 2  # A-B and the A-A self pair
    assert prof.excluded_unlocated == 1
    assert sum(b.pair_count for b in prof.bins) + prof.excluded_unlocated == prof.total_pairs
    assert all(bins[k].pair_count == 0 and bins[k].mean is None for k in range(2, 31))


def test_profile_category_filter():
    cats, locs, res = _profile_fixture()
    g = graph_from_edges([("A", "B"), ("B", "C"), ("A", "C")])
    idx = PaperIndex({n: {"x"} for n in "ABC"})
    only = distance_profile(g, idx, locs, ("SU", "SU"), cats)
    assert only.total_pairs == 1
    mixed = distance_profile(g, idx, locs, ("NRI", ALL), cats)
    assert mixed.total_pairs == 2
    with pytest.raises(NoLocatedPairs):
        distance_profile(g, idx, locs, ("SC", ALL), cats)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_profile_accounts_for_every_pair(seed):
    rng = random.Random(seed)
    names = [f"n{i}" for i in range(rng.randint(2, 9))]
    locs = {n: GeoPoint(rng.uniform(8, 35), rng.uniform(68, 97)) for n in names
            if rng.random() < 0.8}
    edges = [(rng.choice(names), rng.choice(names), 1) for _ in range(12)]
    g = graph_from_edges(edges, nodes=names)
    for n in names:
        g.nodes[n]["category"] = "NRI"
    idx = PaperIndex({n: {"x", n} for n in names})
    try:
        prof = distance_profile(g, idx, locs)
    except NoLocatedPairs:
        return
    assert sum(b.pair_count for b in prof.bins) + prof.excluded_unlocated == prof.total_pairs
    assert prof.total_pairs == len(g.edges)


# --- productivity and matrices ----------------------------------------------

def test_productivity_table_and_order():
    res = identity_resolution({"A": "NRI", "B": "NRI", "C": "SU", "D": "SC"})
    records = [rec("1", 2000, "A", "C"), rec("2", 2000, "A", "B"), rec("3", 2000, "C"),
               rec("4", 2000, "D")]
    table = productivity_table(records, res)
    assert (table["NRI"].papers, table["NRI"].institutions) == (2, 2)
    assert table["SU"].papers_per_institute == 2
    assert productivity_order(table) == ["SU", "NRI", "SC"]


def test_category_matrix():
    g = graph_from_edges([("A", "C", 2), ("B", "C", 3), ("A", "A", 1)])
    sg = aggregate_supernodes(g, {"A": "NRI", "B": "NRI", "C": "SU"})
    assert category_matrix(sg, ["SU", "NRI"]) == [
        ("SU", "SU", 0), ("SU", "NRI", 5), ("NRI", "SU", 5), ("NRI", "NRI", 1)]
