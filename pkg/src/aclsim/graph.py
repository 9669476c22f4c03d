"""Attributed undirected graphs, plus JSON round-trip and GraphML/DOT export."""

from __future__ import annotations

import json
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence


class GraphError(ValueError):
    pass


class GraphParseError(GraphError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class AttributeSchema:
    """Ordered attributes, each with ordered value names and a prior over them.

    Attributes are sampled independently, so the prior of a full profile is the
    product of the per-attribute priors.
    """

    attributes: tuple[tuple[str, tuple[str, ...]], ...]
    priors: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if len(self.attributes) != len(self.priors):
            raise GraphError("one prior vector is required per attribute")
        names = [a for a, _ in self.attributes]
        if len(set(names)) != len(names):
            raise GraphError("attribute names must be unique")
        for (name, values), prior in zip(self.attributes, self.priors):
            if len(values) < 2:
                raise GraphError(f"attribute {name!r} needs at least 2 values")
            if len(set(values)) != len(values):
                raise GraphError(f"attribute {name!r} has duplicate values")
            if len(prior) != len(values):
                raise GraphError(f"attribute {name!r}: prior length mismatch")
            if any(p < 0 for p in prior) or abs(math.fsum(prior) - 1.0) > 1e-9:
                raise GraphError(f"attribute {name!r}: prior must be a distribution")

    @classmethod
    def from_mapping(
        cls,
        attributes: Mapping[str, Sequence[str]],
        priors: Mapping[str, Sequence[float]] | None = None,
    ) -> "AttributeSchema":
        attrs = tuple((name, tuple(values)) for name, values in attributes.items())
        if priors is None:
            pri = tuple(tuple([1.0 / len(v)] * len(v)) for _, v in attrs)
        else:
            pri = tuple(tuple(float(p) for p in priors[name]) for name, _ in attrs)
        return cls(attrs, pri)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.attributes)

    @property
    def n_attributes(self) -> int:
        return len(self.attributes)

    def values(self, attribute: str) -> tuple[str, ...]:
        for name, values in self.attributes:
            if name == attribute:
                return values
        raise GraphError(f"unknown attribute {attribute!r}")

    def index(self, attribute: str) -> int:
        try:
            return self.names.index(attribute)
        except ValueError:
            raise GraphError(f"unknown attribute {attribute!r}") from None

    def all_values(self) -> list[tuple[str, str]]:
        """Every (attribute, value) pair, in schema order."""
        return [(a, v) for a, values in self.attributes for v in values]

    def validate_profile(self, values: Sequence[str]) -> tuple[str, ...]:
        if len(values) != self.n_attributes:
            raise GraphError(
                f"profile has {len(values)} values, schema has {self.n_attributes} attributes"
            )
        for (name, allowed), v in zip(self.attributes, values):
            if v not in allowed:
                raise GraphError(f"value {v!r} not in attribute {name!r}")
        return tuple(values)

    def to_dict(self) -> dict:
        return {
            "attributes": [
                {"name": name, "values": list(values), "priors": list(prior)}
                for (name, values), prior in zip(self.attributes, self.priors)
            ]
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "AttributeSchema":
        attrs = []
        priors = []
        for entry in data["attributes"]:
            values = tuple(entry["values"])
            attrs.append((entry["name"], values))
            prior = entry.get("priors")
            priors.append(
                tuple(float(p) for p in prior) if prior is not None
                else tuple([1.0 / len(values)] * len(values))
            )
        return cls(tuple(attrs), tuple(priors))


def default_schema() -> AttributeSchema:
    """Gender, workplace and location with the uniform priors of the ego-network scenario."""
    return AttributeSchema.from_mapping(
        {
            "gender": ["male", "female"],
            "workplace": ["Starbucks", "Google", "Ikea"],
            "location": ["Leeds", "York"],
        }
    )


def _edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


class AttributedGraph:
    """Undirected simple graph whose nodes each carry one value per schema attribute.

    Instances are immutable once built. Node iteration is ascending by id and
    neighbor lists are sorted, so every traversal is deterministic.
    """

    __slots__ = ("schema", "_profiles", "_adj", "_edges")

    def __init__(
        self,
        schema: AttributeSchema,
        profiles: Mapping[int, Sequence[str]],
        edges: Iterable[tuple[int, int]] = (),
    ):
        self.schema = schema
        self._profiles: dict[int, tuple[str, ...]] = {
            int(n): schema.validate_profile(profiles[n]) for n in sorted(profiles)
        }
        adj: dict[int, list[int]] = {n: [] for n in self._profiles}
        seen: set[tuple[int, int]] = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise GraphError(f"self-loop on node {u}")
            if u not in adj or v not in adj:
                raise GraphError(f"edge ({u}, {v}) references an unknown node")
            e = _edge(u, v)
            if e in seen:
                raise GraphError(f"duplicate edge {e}")
            seen.add(e)
            adj[u].append(v)
            adj[v].append(u)
        self._adj = {n: tuple(sorted(nbrs)) for n, nbrs in adj.items()}
        self._edges = tuple(sorted(seen))

    # -- queries --------------------------------------------------------------

    @property
    def nodes(self) -> list[int]:
        return list(self._profiles)

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        """Edges as (low, high) pairs in ascending order; the index is the edge id."""
        return self._edges

    def number_of_nodes(self) -> int:
        return len(self._profiles)

    def number_of_edges(self) -> int:
        return len(self._edges)

    def __len__(self) -> int:
        return len(self._profiles)

    def __contains__(self, node: int) -> bool:
        return node in self._profiles

    def _check(self, node: int) -> None:
        if node not in self._profiles:
            raise GraphError(f"node not found: {node}")

    def profile(self, node: int) -> tuple[str, ...]:
        self._check(node)
        return self._profiles[node]

    def value(self, node: int, attribute: str) -> str:
        return self.profile(node)[self.schema.index(attribute)]

    def neighbors(self, node: int) -> tuple[int, ...]:
        self._check(node)
        return self._adj[node]

    def degree(self, node: int) -> int:
        return len(self.neighbors(node))

    def degrees(self) -> dict[int, int]:
        return {n: len(nbrs) for n, nbrs in self._adj.items()}

    def has_edge(self, u: int, v: int) -> bool:
        self._check(u)
        self._check(v)
        nbrs = self._adj[u]
        return v in nbrs

    def shared_attribute_count(self, u: int, v: int) -> int:
        pu, pv = self.profile(u), self.profile(v)
        return sum(a == b for a, b in zip(pu, pv))

    def nodes_with(self, attribute: str, value: str) -> list[int]:
        i = self.schema.index(attribute)
        if value not in self.schema.values(attribute):
            raise GraphError(f"value {value!r} not in attribute {attribute!r}")
        return [n for n, p in self._profiles.items() if p[i] == value]

    def connected_components(self, nodes: Iterable[int] | None = None) -> list[list[int]]:
        """Components of the subgraph induced by ``nodes`` (all nodes by default).

        Each component is sorted; components are ordered by their smallest id.
        """
        pool = set(self._profiles if nodes is None else nodes)
        comps = []
        for start in sorted(pool):
            if start not in pool:
                continue
            pool.discard(start)
            comp = [start]
            stack = [start]
            while stack:
                x = stack.pop()
                for y in self._adj[x]:
                    if y in pool:
                        pool.discard(y)
                        comp.append(y)
                        stack.append(y)
            comps.append(sorted(comp))
        return comps

    def without_nodes(self, removed: Iterable[int]) -> "AttributedGraph":
        """Copy with ``removed`` and their incident edges deleted; other ids are kept."""
        gone = set(removed)
        for n in gone:
            self._check(n)
        profiles = {n: p for n, p in self._profiles.items() if n not in gone}
        edges = [(u, v) for u, v in self._edges if u not in gone and v not in gone]
        return AttributedGraph(self.schema, profiles, edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AttributedGraph):
            return NotImplemented
        return (
            self.schema == other.schema
            and self._profiles == other._profiles
            and self._edges == other._edges
        )

    def __repr__(self) -> str:
        return f"AttributedGraph(nodes={len(self)}, edges={self.number_of_edges()})"

    # -- serialization --------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "schema": self.schema.to_dict(),
            "nodes": [{"id": n, "values": list(p)} for n, p in self._profiles.items()],
            "edges": [list(e) for e in self._edges],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "AttributedGraph":
        schema = AttributeSchema.from_dict(data["schema"])
        profiles = {}
        for entry in data["nodes"]:
            nid = int(entry["id"])
            if nid in profiles:
                raise GraphError(f"duplicate node id {nid}")
            profiles[nid] = entry["values"]
        return cls(schema, profiles, [tuple(e) for e in data["edges"]])


def shared_attribute_count(g: AttributedGraph, u: int, v: int) -> int:
    return g.shared_attribute_count(u, v)


def degree(g: AttributedGraph, v: int) -> int:
    return g.degree(v)


# -- files --------------------------------------------------------------------
#
# The JSON layout writes one node or edge per line so that parse errors can be
# reported with a line number.


def dumps_graph(g: AttributedGraph) -> str:
    lines = ["{", f'  "schema": {json.dumps(g.schema.to_dict(), sort_keys=True)},', '  "nodes": [']
    nodes = g.to_dict()["nodes"]
    for i, n in enumerate(nodes):
        sep = "," if i < len(nodes) - 1 else ""
        lines.append(f"    {json.dumps(n)}{sep}")
    lines.append("  ],")
    lines.append('  "edges": [')
    for i, (u, v) in enumerate(g.edges):
        sep = "," if i < len(g.edges) - 1 else ""
        lines.append(f"    [{u}, {v}]{sep}")
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def save_graph(g: AttributedGraph, path: str | Path) -> None:
    Path(path).write_text(dumps_graph(g), encoding="utf-8", newline="\n")


def _line_of(text: str, needle_index: int) -> int:
    return text.count("\n", 0, needle_index) + 1


def loads_graph(text: str) -> AttributedGraph:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphParseError(exc.msg, exc.lineno) from None
    if not isinstance(data, dict) or not {"schema", "nodes", "edges"} <= data.keys():
        raise GraphParseError("expected an object with schema, nodes and edges", 1)
    try:
        schema = AttributeSchema.from_dict(data["schema"])
    except (KeyError, TypeError) as exc:
        raise GraphParseError(f"malformed schema: {exc}", _locate(text, '"schema"')) from None

    # Line numbers: one entry per line after the section header.
    nodes_line = _locate(text, '"nodes"')
    edges_line = _locate(text, '"edges"')

    profiles: dict[int, tuple[str, ...]] = {}
    for i, entry in enumerate(data["nodes"]):
        line = nodes_line + 1 + i
        try:
            nid = int(entry["id"])
            values = entry["values"]
        except (KeyError, TypeError, ValueError):
            raise GraphParseError("node entries need integer 'id' and 'values'", line) from None
        if nid in profiles:
            raise GraphParseError(f"duplicate node id {nid}", line)
        try:
            profiles[nid] = schema.validate_profile(values)
        except GraphError as exc:
            raise GraphParseError(f"schema mismatch: {exc}", line) from None

    edges = []
    seen = set()
    prev = None
    for i, entry in enumerate(data["edges"]):
        line = edges_line + 1 + i
        try:
            u, v = (int(x) for x in entry)
        except (TypeError, ValueError):
            raise GraphParseError("edge entries must be [id, id]", line) from None
        if not u < v:
            raise GraphParseError(f"edge [{u}, {v}] must satisfy id_low < id_high", line)
        if (u, v) in seen:
            raise GraphParseError(f"duplicate edge [{u}, {v}]", line)
        if prev is not None and (u, v) < prev:
            raise GraphParseError(f"edge [{u}, {v}] out of sorted order", line)
        if u not in profiles or v not in profiles:
            raise GraphParseError(f"edge [{u}, {v}] references an unknown node", line)
        seen.add((u, v))
        prev = (u, v)
        edges.append((u, v))
    return AttributedGraph(schema, profiles, edges)


def _locate(text: str, key: str) -> int:
    idx = text.find(key)
    return _line_of(text, idx) if idx >= 0 else 1


def load_graph(path: str | Path) -> AttributedGraph:
    return loads_graph(Path(path).read_text(encoding="utf-8"))


def export_graphml(g: AttributedGraph, path: str | Path) -> None:
    root = ET.Element("graphml", xmlns="http://graphml.graphdrawing.org/xmlns")
    for i, name in enumerate(g.schema.names):
        ET.SubElement(
            root, "key", {"id": f"d{i}", "for": "node", "attr.name": name, "attr.type": "string"}
        )
    graph = ET.SubElement(root, "graph", id="G", edgedefault="undirected")
    for n in g.nodes:
        el = ET.SubElement(graph, "node", id=f"n{n}")
        for i, val in enumerate(g.profile(n)):
            ET.SubElement(el, "data", key=f"d{i}").text = val
    for eid, (u, v) in enumerate(g.edges):
        ET.SubElement(graph, "edge", id=f"e{eid}", source=f"n{u}", target=f"n{v}")
    ET.indent(root)
    ET.ElementTree(root).write(path, encoding="utf-8", xml_declaration=True)


def export_dot(g: AttributedGraph, path: str | Path) -> None:
    lines = ["graph G {"]
    for n in g.nodes:
        attrs = ", ".join(f'{k}="{v}"' for k, v in zip(g.schema.names, g.profile(n)))
        lines.append(f"  {n} [{attrs}];")
    for u, v in g.edges:
        lines.append(f"  {u} -- {v};")
    lines.append("}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
