import xml.etree.ElementTree as ET

import pytest
from hypothesis import given

from aclsim.graph import (
    AttributedGraph,
    AttributeSchema,
    GraphError,
    GraphParseError,
    degree,
    dumps_graph,
    export_dot,
    export_graphml,
    load_graph,
    loads_graph,
    save_graph,
    shared_attribute_count,
)

from conftest import SCHEMA, graphs, make_graph


def test_shared_attribute_count_examples():
    g = make_graph(
        4, [],
        [("male", "Google", "York"), ("male", "Google", "York"),
         ("female", "Ikea", "Leeds"), ("female", "Google", "York")],
    )
    assert shared_attribute_count(g, 0, 1) == 3
    assert shared_attribute_count(g, 0, 2) == 0
    assert shared_attribute_count(g, 0, 3) == 2


def test_shared_attribute_count_unknown_node():
    g = make_graph(2, [(0, 1)])
    with pytest.raises(GraphError, match="node not found"):
        shared_attribute_count(g, 0, 7)


def test_degree_examples():
    assert degree(make_graph(1, []), 0) == 0
    tri = make_graph(3, [(0, 1), (1, 2), (0, 2)])
    assert all(degree(tri, v) == 2 for v in tri.nodes)
    path = make_graph(3, [(0, 1), (1, 2)])
    assert degree(path, 1) == 2
    with pytest.raises(GraphError):
        degree(path, 3)


@given(graphs())
def test_degree_sum_is_twice_edges(g):
    assert sum(degree(g, v) for v in g.nodes) == 2 * g.number_of_edges()


@given(graphs(min_nodes=2))
def test_shared_count_symmetric(g):
    u, v = g.nodes[0], g.nodes[-1]
    assert shared_attribute_count(g, u, v) == shared_attribute_count(g, v, u)
    assert 0 <= shared_attribute_count(g, u, v) <= SCHEMA.n_attributes


@given(graphs(min_nodes=0))
def test_json_round_trip(g):
    assert loads_graph(dumps_graph(g)) == g


def test_round_trip_files(tmp_path):
    for g in (AttributedGraph(SCHEMA, {}, []), make_graph(3, [(0, 1), (1, 2), (0, 2)])):
        save_graph(g, tmp_path / "g.json")
        back = load_graph(tmp_path / "g.json")
        assert back == g
        assert back.nodes == g.nodes and back.edges == g.edges


def test_iteration_is_ascending():
    g = AttributedGraph(SCHEMA, {5: ("male", "Ikea", "York"), 1: ("male", "Ikea", "York"),
                                 3: ("male", "Ikea", "York")}, [(5, 1), (3, 5)])
    assert g.nodes == [1, 3, 5]
    assert g.neighbors(5) == (1, 3)
    assert g.edges == ((1, 5), (3, 5))


def test_simple_graph_invariants():
    with pytest.raises(GraphError):
        make_graph(2, [(0, 0)])
    with pytest.raises(GraphError):
        make_graph(2, [(0, 1), (1, 0)])
    with pytest.raises(GraphError):
        make_graph(2, [(0, 2)])


def test_duplicate_edge_line_is_parse_error():
    text = dumps_graph(make_graph(3, [(0, 1), (1, 2)]))
    text = text.replace("[1, 2]", "[0, 1]")
    with pytest.raises(GraphParseError) as err:
        loads_graph(text)
    lines = text.splitlines()
    assert lines[err.value.line - 1].strip() == "[0, 1]"  # the second, duplicate entry


def test_schema_mismatch_reports_line():
    text = dumps_graph(make_graph(2, [(0, 1)]))
    text = text.replace('"values": ["male", "Google", "York"]}\n', '"values": ["male", "Amazon", "York"]}\n', 1)
    with pytest.raises(GraphParseError, match="schema mismatch") as err:
        loads_graph(text)
    assert err.value.line == 5


def test_malformed_json_reports_line():
    with pytest.raises(GraphParseError) as err:
        loads_graph('{\n  "schema": {\n  oops\n}')
    assert err.value.line == 3


def test_unsorted_or_reversed_edges_rejected():
    base = dumps_graph(make_graph(3, [(0, 1), (1, 2)]))
    with pytest.raises(GraphParseError, match="id_low < id_high"):
        loads_graph(base.replace("[1, 2]", "[2, 1]"))
    swapped = base.replace("[0, 1],", "[X],").replace("[1, 2]", "[0, 1]").replace("[X],", "[1, 2],")
    with pytest.raises(GraphParseError, match="sorted"):
        loads_graph(swapped)


def test_schema_validation():
    with pytest.raises(GraphError):
        AttributeSchema.from_mapping({"a": ["x"]})
    with pytest.raises(GraphError):
        AttributeSchema.from_mapping({"a": ["x", "x"]})
    with pytest.raises(GraphError):
        AttributeSchema.from_mapping({"a": ["x", "y"]}, {"a": [0.7, 0.7]})
    s = AttributeSchema.from_mapping({"a": ["x", "y"]}, {"a": [0.25, 0.75]})
    assert s.priors == ((0.25, 0.75),)


def test_without_nodes_keeps_ids():
    g = make_graph(4, [(0, 1), (1, 2), (2, 3)])
    h = g.without_nodes([1])
    assert h.nodes == [0, 2, 3]
    assert h.edges == ((2, 3),)
    assert g.number_of_edges() == 3


def test_graphml_and_dot_exports(tmp_path):
    g = make_graph(3, [(0, 1), (1, 2)], [("male", "Ikea", "York"), ("female", "Google", "Leeds"),
                                         ("male", "Starbucks", "York")])
    export_graphml(g, tmp_path / "g.graphml")
    root = ET.parse(tmp_path / "g.graphml").getroot()
    ns = {"g": "http://graphml.graphdrawing.org/xmlns"}
    assert len(root.findall(".//g:node", ns)) == 3
    assert len(root.findall(".//g:edge", ns)) == 2
    keys = {k.get("attr.name") for k in root.findall("g:key", ns)}
    assert keys == {"gender", "workplace", "location"}
    export_dot(g, tmp_path / "g.dot")
    dot = (tmp_path / "g.dot").read_text()
    assert "0 -- 1;" in dot and 'workplace="Ikea"' in dot
