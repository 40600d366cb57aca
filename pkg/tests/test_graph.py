import json
import re

import pytest
from hypothesis import given, settings, strategies as st

from graphk0.abelian import FgAbelianGroup
from graphk0.gamma import build
from graphk0.graph import (
    Element,
    Graph,
    GraphAut,
    GraphBuilder,
    GraphSchemaError,
    PairKey,
    Plain,
    RelU,
    Splitter,
    SumU,
    deserialize,
    dumps,
    graph_from_edges,
    in_edges,
    is_automorphism,
    loads,
    serialize,
    to_dot,
    validate,
)

Z2 = FgAbelianGroup((2,))
TRIVIAL = FgAbelianGroup()


def test_single_looped_vertex_valid():
    g = graph_from_edges([], loops={0: 1})
    assert validate(g) == []


def test_loop_in_edge_set_is_violation():
    v = Plain(0)
    g = Graph(frozenset([v]), frozenset([(v, v)]))
    problems = validate(g)
    assert len(problems) == 1 and "loop must use loop_count" in problems[0]


def test_unknown_vertices_reported():
    a, b = Plain(0), Plain(1)
    g = Graph(frozenset([a]), frozenset([(a, b)]), {b: 1}, frozenset([b]))
    problems = validate(g)
    assert len(problems) == 3
    assert all("p:1" in p for p in problems)


def test_gamma_z2_valid():
    assert validate(build(Z2)) == []


def test_in_edges_sum_vertex():
    g = build(Z2)
    c = Z2.element([1])
    assert in_edges(g, SumU(c)) == [Element(c), SumU(c), SumU(c)]


def test_in_edges_relation_vertex():
    g = build(Z2)
    p = PairKey(Z2.element([1]), Z2.element([0]))
    assert in_edges(g, RelU(p)) == [Splitter(p, 0), Splitter(p, 1), SumU(Z2.element([1]))]


def test_in_edges_isolated_and_unknown():
    g = graph_from_edges([], vertices=[0])
    assert in_edges(g, Plain(0)) == []
    with pytest.raises(KeyError):
        in_edges(g, Plain(1))


def test_is_automorphism_examples():
    g = graph_from_edges([], vertices=[0, 1])
    assert is_automorphism(g, {Plain(0): Plain(0), Plain(1): Plain(1)})
    assert is_automorphism(g, {Plain(0): Plain(1), Plain(1): Plain(0)})
    h = graph_from_edges([], vertices=[0, 1], loops={0: 1})
    assert not is_automorphism(h, {Plain(0): Plain(1), Plain(1): Plain(0)})


def test_is_automorphism_requires_edge_reflection():
    g = graph_from_edges([(0, 1)], vertices=[2])
    swap_12 = {Plain(0): Plain(0), Plain(1): Plain(2), Plain(2): Plain(1)}
    assert not is_automorphism(g, swap_12)
    assert not is_automorphism(g, {Plain(0): Plain(0), Plain(1): Plain(0), Plain(2): Plain(2)})
    with pytest.raises(ValueError):
        GraphAut.from_map(g, swap_12)


def test_tail_anchors_must_be_preserved():
    g = graph_from_edges([], vertices=[0, 1], tails=[0])
    assert not is_automorphism(g, {Plain(0): Plain(1), Plain(1): Plain(0)})


def test_serialize_empty():
    g = GraphBuilder().build()
    assert serialize(g) == {"vertices": [], "edges": [], "loops": {}, "tails": []}


@pytest.mark.parametrize("group", [TRIVIAL, Z2, FgAbelianGroup((2, 2))])
def test_gamma_roundtrip(group):
    g = build(group)
    doc = serialize(g)
    assert doc["group_spec"] == str(group)
    assert deserialize(json.loads(json.dumps(doc))) == g
    assert loads(dumps(g)) == g


def test_deserialize_rejects_unknown_vertex():
    doc = {"vertices": [{"tag": "plain", "id": 0}], "edges": [[0, 1]], "loops": {}, "tails": []}
    with pytest.raises(GraphSchemaError) as exc:
        deserialize(doc)
    assert exc.value.path == "$.edges[0][1]"


@pytest.mark.parametrize("doc, path", [
    ({"vertices": [], "edges": [], "loops": {}}, "$"),
    ({"vertices": [{"tag": "nope"}], "edges": [], "loops": {}, "tails": []}, "$.vertices[0].tag"),
    ({"vertices": [{"tag": "plain", "id": 0}], "edges": [], "loops": {"0": -1}, "tails": []},
     "$.loops['0']"),
    ({"vertices": [{"tag": "element", "coords": [1]}], "edges": [], "loops": {}, "tails": []},
     "$.vertices[0]"),
    ({"vertices": [{"tag": "element", "coords": [1, 0]}], "edges": [], "loops": {}, "tails": [],
      "group_spec": "Z/2"}, "$.vertices[0].coords"),
    ({"vertices": [{"tag": "plain", "id": 0}, {"tag": "plain", "id": 0}], "edges": [],
      "loops": {}, "tails": []}, "$.vertices[1]"),
    ({"vertices": [{"tag": "plain", "id": 0}], "edges": [], "loops": {}, "tails": [3]},
     "$.tails[0]"),
    ({"vertices": [{"tag": "splitter", "pair": [[0], [1]], "slot": 2}], "edges": [], "loops": {},
      "tails": [], "group_spec": "Z/2"}, "$.vertices[0].slot"),
])
def test_deserialize_schema_errors(doc, path):
    with pytest.raises(GraphSchemaError) as exc:
        deserialize(doc)
    assert exc.value.path == path


@st.composite
def plain_graphs(draw):
    n = draw(st.integers(0, 7))
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    loops = {i: draw(st.integers(0, 3)) for i in range(n)}
    tails = draw(st.lists(st.integers(0, n - 1), unique=True)) if n else []
    return graph_from_edges(edges, loops=loops, vertices=range(n), tails=tails)


@settings(max_examples=100, deadline=None)
@given(plain_graphs())
def test_roundtrip_random(g):
    assert deserialize(json.loads(json.dumps(serialize(g)))) == g


@settings(max_examples=100, deadline=None)
@given(plain_graphs())
def test_identity_is_automorphism(g):
    assert validate(g) == []
    assert is_automorphism(g, {v: v for v in g.vertices})


def _dot_counts(text):
    assert text.startswith("digraph G {") and text.rstrip().endswith("}")
    nodes = re.findall(r"^\s*(n\d+) \[label=", text, re.M)
    arrows = re.findall(r"^\s*(n\d+) -> (n\d+);", text, re.M)
    assert set(a for e in arrows for a in e) <= set(nodes)
    return nodes, arrows


def test_dot_single_loop():
    nodes, arrows = _dot_counts(to_dot(graph_from_edges([], loops={0: 1})))
    assert len(nodes) == 1 and arrows == [("n0", "n0")]


def test_dot_sum_vertex_has_two_self_arrows():
    g = build(Z2)
    text = to_dot(g)
    idx = g.ordered_vertices.index(SumU(Z2.element([1])))
    _, arrows = _dot_counts(text)
    assert arrows.count((f"n{idx}", f"n{idx}")) == 2


def test_dot_trivial_group():
    g = build(TRIVIAL)
    text = to_dot(g)
    nodes, arrows = _dot_counts(text)
    assert len(nodes) == 5
    assert len(arrows) == 6 + 2
    assert text.count("peripheries=2") == 1
