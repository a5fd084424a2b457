import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from socialcapital.graph import (
    DisjointSet,
    EvolvingGraph,
    GraphError,
    components_undirected,
    ego_network,
    graph_from_edges,
)


def small_graph():
    # 1 -> 2 -> 3 -> 4, 1 -> 5, 5 -> 3
    return graph_from_edges([0, 0, 1, 1, 0], [(1, 2), (2, 3), (3, 4), (1, 5), (5, 3)])


def test_counts_and_degrees():
    g = small_graph()
    assert g.t == 5 and g.n_edges == 5
    assert g.out_degrees().tolist() == [2, 1, 1, 0, 1]
    assert g.in_degrees().tolist() == [0, 1, 2, 1, 1]
    assert (g.n_same[1], g.n_diff[1]) == (2, 0)
    assert (g.n_same[2], g.n_diff[2]) == (0, 1)


def test_rejects_self_duplicate_and_unknown():
    g = small_graph()
    with pytest.raises(GraphError):
        g.add_edge(2, 2)
    with pytest.raises(GraphError):
        g.add_edge(1, 2)
    with pytest.raises(GraphError):
        g.add_edge(1, 9)


def test_followees_of_followees_excludes_self_and_followees():
    g = small_graph()
    assert g.followees_of_followees(1) == [3]
    g.add_edge(3, 1)
    assert g.followees_of_followees(2, snapshot=False) == [4, 1]
    assert 1 not in g.followees_of_followees(1, snapshot=False)


def test_snapshot_hides_links_of_current_step():
    g = small_graph()
    g.begin_step()
    g.add_edge(4, 1)
    g.add_edge(2, 5)
    assert g.snapshot_followees(4) == []
    assert g.followees_of_followees(4, snapshot=True) == []
    assert set(g.followees_of_followees(4, snapshot=False)) == {2, 5}
    # 2 followed only 3 when the step began
    assert g.followees_of_followees(2, snapshot=True) == [4]
    g.begin_step()
    # 5 is followed by 2 now, so it leaves the set; 5's followee 3 is already followed
    assert g.followees_of_followees(2) == [4]
    assert g.followees_of_followees(4) == [2, 5]


def test_components_and_omega():
    g = graph_from_edges([0] * 7, [(1, 2), (3, 4), (4, 5)])
    omega, labels = components_undirected(g)
    assert omega == 2
    assert labels[0] == labels[1] != labels[2]
    assert len(set(labels.tolist())) == 4  # two pairs-or-more plus singletons 6, 7 -> 4 labels


def test_ego_network():
    g = small_graph()
    nodes, edges = ego_network(g, 1, 1)
    assert nodes == [1, 2, 5]
    assert sorted(edges) == [(1, 2), (1, 5)]
    nodes2, _ = ego_network(g, 1, 2)
    assert nodes2 == [1, 2, 3, 5]


def test_exports(tmp_path):
    g = small_graph()
    text = g.to_edge_csv(tmp_path / "e.csv")
    lines = text.strip().split("\n")
    assert lines[0] == "from,to,t_formed"
    assert len(lines) == 1 + g.n_edges
    d = json.loads(g.to_json())
    assert d["agents"][0] == {"id": 1, "type": 0, "deg_out": 2, "deg_in": 0, "eft": None, "satisfied": False}


def test_copy_is_deep():
    g = small_graph()
    h = g.copy()
    assert h.same_structure(g)
    h.add_edge(4, 1)
    assert not h.same_structure(g)
    assert g.n_edges == 5


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 25), st.lists(st.tuples(st.integers(1, 25), st.integers(1, 25)), max_size=80))
def test_degree_sums_and_dsu_match(n, pairs):
    g = EvolvingGraph()
    for k in range(n):
        g.add_agent(k % 2)
    ds = DisjointSet(n)
    for i, j in pairs:
        if i > n or j > n or i == j or j in g.followees[i]:
            continue
        g.add_edge(i, j)
        ds.union(i - 1, j - 1)
    assert g.out_degrees().sum() == g.in_degrees().sum() == g.n_edges
    assert all(g.n_same[i] + g.n_diff[i] == len(g.followees[i]) for i in g.agents)
    omega, labels = components_undirected(g)
    roots = {ds.find(k) for k in range(n) if ds.size[ds.find(k)] > 1}
    assert omega == len(roots)
    # same label iff same DSU root
    for a in range(n):
        for b in range(a + 1, n):
            assert (labels[a] == labels[b]) == (ds.find(a) == ds.find(b))
    assert np.array_equal(np.sort(g.edge_array(), axis=0), np.sort(np.array([(i, j) for i, j, _ in g.edges()]).reshape(-1, 2), axis=0))
