import json

import pytest
from hypothesis import given, settings, strategies as st

from rendezvous_bell.graph import (CUBIC, GraphError, build_cycle, edge_target, from_adjacency_list,
                                   from_catalog, from_json, load_graph, walk)

CATALOG = list(CUBIC) + [f"cycle-{n}" for n in range(3, 10)] + [f"dircycle-{n}" for n in range(3, 10)]


def test_cubic2_listing():
    g = from_adjacency_list([[2, 3, 4], [1, 3, 5], [1, 2, 6], [1, 5, 6], [2, 4, 6], [3, 4, 5]])
    assert g.n == 6 and g.degree == 3 and not g.reflexive
    assert g == from_catalog("cubic-2").__class__(g.n, g.out_edges, False, False, "")


def test_path_graph_accepted():
    g = from_adjacency_list([[2], [1]])
    assert g.n == 2 and g.degree == 1


@pytest.mark.parametrize("rows, msg", [
    ([[2, 3, 9]] + [[1, 2, 3]] * 7, "out of range"),
    ([[2, 2], [1, 3], [1, 2]], "duplicate"),
    ([[2], []], "empty"),
    ([], "empty"),
])
def test_adjacency_errors(rows, msg):
    with pytest.raises(GraphError, match=msg):
        from_adjacency_list(rows)


def test_cycle_examples():
    g = build_cycle(4, reflexive=True)
    assert g.out_edges[0] == (1, 2, 4) and g.degree == 3
    d = build_cycle(6, reflexive=True, directed=True)
    assert d.out_edges[5] == (1, 6) and d.degree == 2
    with pytest.raises(GraphError):
        build_cycle(2)


def test_edge_target_labels():
    # node 3 with neighbors 1, 5 and itself gets labels 1 -> 1, 2 -> 3, 3 -> 5
    g = from_adjacency_list([[1, 3], [2, 4], [5, 1, 3], [4, 2], [5, 3]])
    assert [edge_target(g, 3, k) for k in (1, 2, 3)] == [1, 3, 5]
    assert edge_target(build_cycle(4, True), 1, 2) == 2
    c5 = build_cycle(5)
    assert edge_target(c5, 5, 1) == 1 and edge_target(c5, 5, 2) == 4
    with pytest.raises(GraphError):
        edge_target(c5, 5, 3)
    with pytest.raises(GraphError):
        edge_target(c5, 6, 1)


def test_walk_examples():
    assert walk(build_cycle(4, True), 3, [1, 1]) == [2, 1]
    # node 6 of the directed reflexive 6-cycle has sorted out-edges (1, 6), so
    # "move to 6 and then 1" from node 5 is labels 2 then 1
    d6 = build_cycle(6, True, True)
    assert walk(d6, 5, [2, 1]) == [6, 1]
    assert walk(d6, 5, [2, 2]) == [6, 6]
    assert walk(build_cycle(5), 2, []) == []
    with pytest.raises(GraphError):
        walk(build_cycle(5), 1, [1, 3])


def test_catalog_has_no_cubic1():
    assert "cubic-1" not in CUBIC
    assert sorted(CUBIC) == [f"cubic-{i}" for i in range(2, 10)]
    with pytest.raises(GraphError):
        from_catalog("cubic-1")


@pytest.mark.parametrize("name", CATALOG)
@pytest.mark.parametrize("refl", [False, True])
def test_catalog_invariants(name, refl):
    g = from_catalog(name, refl)
    assert g.is_regular
    for v in range(1, g.n + 1):
        ts = [edge_target(g, v, k) for k in range(1, g.degree + 1)]
        assert all(a < b for a, b in zip(ts, ts[1:]))
        assert (ts.count(v) == 1) if refl else (v not in ts)


@pytest.mark.parametrize("name", list(CUBIC))
def test_round_trip(name):
    rows = CUBIC[name]
    g = from_adjacency_list(rows)
    assert [list(r) for r in g.out_edges] == [sorted(r) for r in rows]
    assert from_json(json.dumps(g.to_dict()) and g.to_dict()) == g


def test_json_file(tmp_path):
    p = tmp_path / "g.json"
    p.write_text(json.dumps(build_cycle(5, True).to_dict()))
    g = load_graph(str(p))
    assert g.reflexive and g.out_edges[0] == (1, 2, 5)
    p.write_text(json.dumps({"n": 3, "reflexive": True, "adjacency": [[2, 3], [1, 3], [1, 2]]}))
    with pytest.raises(GraphError):
        load_graph(str(p))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(CATALOG), st.booleans(), st.data())
def test_walk_concatenation(name, refl, data):
    g = from_catalog(name, refl)
    v = data.draw(st.integers(1, g.n))
    m1 = data.draw(st.lists(st.integers(1, g.degree), max_size=4))
    m2 = data.draw(st.lists(st.integers(1, g.degree), max_size=4))
    w1 = walk(g, v, m1)
    last = w1[-1] if w1 else v
    assert walk(g, v, m1 + m2) == w1 + walk(g, last, m2)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(CATALOG), st.booleans(), st.randoms(use_true_random=False))
def test_relabel_keeps_structure(name, refl, rnd):
    g = from_catalog(name, refl)
    perm = list(range(1, g.n + 1))
    rnd.shuffle(perm)
    h = g.relabel(perm)
    assert h.degree == g.degree and h.reflexive == g.reflexive
    inv = [0] * g.n
    for i, p in enumerate(perm, 1):
        inv[p - 1] = i
    assert h.relabel(inv) == g
