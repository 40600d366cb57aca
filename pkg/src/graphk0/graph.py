"""Row-finite directed graphs with semantically tagged vertices.

Vertices are identified by their tags, so two graphs built independently
compare equal when they have the same structure. Non-loop edges form a set
(no parallel edges); loops are a per-vertex multiplicity. A vertex in
``tail_anchors`` stands for an infinite chain ``u -> u^1 -> u^2 -> ...``
whose vertices each carry one loop; the chain is not materialized.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Mapping, Optional, Union

import jsonschema

from .abelian import FgAbelianGroup, GroupElement, GroupSpecError, parse_group_spec


@dataclass(frozen=True)
class PairKey:
    """Unordered pair ``{a, b}`` stored with ``first <= second``."""

    first: GroupElement
    second: GroupElement

    def __post_init__(self):
        if self.second < self.first:
            a, b = self.second, self.first
            object.__setattr__(self, "first", a)
            object.__setattr__(self, "second", b)

    @property
    def sum(self) -> GroupElement:
        return self.first + self.second

    def _key(self):
        return (self.first.coords, self.second.coords)

    def __str__(self) -> str:
        return f"{{{self.first},{self.second}}}"


@dataclass(frozen=True)
class Element:
    """``v_a``."""
    a: GroupElement

    def _key(self):
        return (0, self.a.coords)

    def __str__(self) -> str:
        return f"v{self.a}"


@dataclass(frozen=True)
class Splitter:
    """``w``: slot 0 hangs off ``pair.first``, slot 1 off ``pair.second``."""
    pair: PairKey
    slot: int

    def __post_init__(self):
        if self.slot not in (0, 1):
            raise ValueError("splitter slot must be 0 or 1")

    @property
    def anchor(self) -> GroupElement:
        return self.pair.first if self.slot == 0 else self.pair.second

    def _key(self):
        return (1, self.pair._key(), self.slot)

    def __str__(self) -> str:
        return f"w{self.slot}{self.pair}"


@dataclass(frozen=True)
class RelU:
    """``u_{ab}``."""
    pair: PairKey

    def _key(self):
        return (2, self.pair._key())

    def __str__(self) -> str:
        return f"u{self.pair}"


@dataclass(frozen=True)
class SumU:
    """``u_c``."""
    c: GroupElement

    def _key(self):
        return (3, self.c.coords)

    def __str__(self) -> str:
        return f"uc{self.c}"


@dataclass(frozen=True)
class Tail:
    """``u^n_{ab}``, level ``n >= 1``."""
    pair: PairKey
    level: int

    def __post_init__(self):
        if self.level < 1:
            raise ValueError("tail level must be >= 1")

    def _key(self):
        return (4, self.pair._key(), self.level)

    def __str__(self) -> str:
        return f"u^{self.level}{self.pair}"


@dataclass(frozen=True)
class Plain:
    id: Union[int, str]

    def _key(self):
        return (5, (isinstance(self.id, str), self.id))

    def __str__(self) -> str:
        return f"p:{self.id}"


VertexTag = Union[Element, Splitter, RelU, SumU, Tail, Plain]


def tag_key(tag: VertexTag):
    """Canonical vertex order."""
    return tag._key()


@dataclass(frozen=True, eq=False)
class Graph:
    vertices: frozenset
    edges: frozenset = frozenset()
    loops: Mapping[VertexTag, int] = field(default_factory=dict)
    tail_anchors: frozenset = frozenset()
    group: Optional[FgAbelianGroup] = None

    def __post_init__(self):
        object.__setattr__(self, "vertices", frozenset(self.vertices))
        object.__setattr__(self, "edges", frozenset(tuple(e) for e in self.edges))
        object.__setattr__(self, "loops", {v: n for v, n in self.loops.items() if n})
        object.__setattr__(self, "tail_anchors", frozenset(self.tail_anchors))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.vertices == other.vertices and self.edges == other.edges
                and self.loops == other.loops and self.tail_anchors == other.tail_anchors
                and self.group == other.group)

    __hash__ = None

    @cached_property
    def ordered_vertices(self) -> list:
        return sorted(self.vertices, key=tag_key)

    @cached_property
    def _in_sources(self) -> dict:
        idx: dict = {v: [] for v in self.vertices}
        for s, r in self.edges:
            if r in idx:
                idx[r].append(s)
        for v in idx:
            idx[v].sort(key=tag_key)
        return idx

    @cached_property
    def _out_ranges(self) -> dict:
        idx: dict = {v: [] for v in self.vertices}
        for s, r in self.edges:
            if s in idx:
                idx[s].append(r)
        return idx

    def loop_count(self, v: VertexTag) -> int:
        return self.loops.get(v, 0)

    def out_neighbors(self, v: VertexTag) -> list:
        return self._out_ranges[v]

    def in_degree(self, v: VertexTag) -> int:
        return len(self._in_sources[v]) + self.loop_count(v)

    def regular_vertices(self) -> list:
        """``V_E``: vertices receiving at least one edge (loops included)."""
        return [v for v in self.ordered_vertices if self.in_degree(v)]

    def num_edges(self) -> int:
        return len(self.edges)

    def num_loops(self) -> int:
        return sum(self.loops.values())


class GraphBuilder:
    def __init__(self, group: Optional[FgAbelianGroup] = None):
        self.group = group
        self.vertices: set = set()
        self.edges: set = set()
        self.loops: dict = {}
        self.tails: set = set()

    def vertex(self, v: VertexTag) -> VertexTag:
        self.vertices.add(v)
        return v

    def edge(self, s: VertexTag, r: VertexTag) -> None:
        self.vertices.add(s)
        self.vertices.add(r)
        self.edges.add((s, r))

    def loop(self, v: VertexTag, count: int = 1) -> None:
        self.vertices.add(v)
        self.loops[v] = self.loops.get(v, 0) + count

    def tail(self, v: VertexTag) -> None:
        self.vertices.add(v)
        self.tails.add(v)

    def build(self) -> Graph:
        return Graph(frozenset(self.vertices), frozenset(self.edges), dict(self.loops),
                     frozenset(self.tails), self.group)


def validate(g: Graph) -> list[str]:
    """Violations of the graph invariants; empty when ``g`` is well formed."""
    problems = []
    for s, r in sorted(g.edges, key=lambda e: (tag_key(e[0]), tag_key(e[1]))):
        if s == r:
            problems.append(f"edge ({s},{r}): loop must use loop_count")
        for end in (s, r):
            if end not in g.vertices:
                problems.append(f"edge ({s},{r}): unknown vertex {end}")
    for v, n in sorted(g.loops.items(), key=lambda kv: tag_key(kv[0])):
        if v not in g.vertices:
            problems.append(f"loops at unknown vertex {v}")
        if not isinstance(n, int) or n < 0:
            problems.append(f"vertex {v}: loop count {n!r} is not a natural number")
    for v in sorted(g.tail_anchors, key=tag_key):
        if v not in g.vertices:
            problems.append(f"tail anchor {v} is not a vertex")
    if g.group is not None:
        for v in g.ordered_vertices:
            for x in _tag_elements(v):
                if x.group != g.group:
                    problems.append(f"vertex {v}: element of {x.group}, graph group is {g.group}")
    return problems


def _tag_elements(v: VertexTag) -> list[GroupElement]:
    if isinstance(v, Element):
        return [v.a]
    if isinstance(v, SumU):
        return [v.c]
    if isinstance(v, (Splitter, RelU, Tail)):
        return [v.pair.first, v.pair.second]
    return []


def in_edges(g: Graph, v: VertexTag) -> list:
    """Sources of edges ranging at ``v``; ``v`` itself repeats once per loop."""
    if v not in g.vertices:
        raise KeyError(f"unknown vertex {v}")
    return list(g._in_sources[v]) + [v] * g.loop_count(v)


@dataclass(frozen=True)
class GraphHom:
    source: Graph
    target: Graph
    vertex_map: Mapping[VertexTag, VertexTag]

    def __call__(self, v: VertexTag) -> VertexTag:
        return self.vertex_map[v]


def hom_violations(source: Graph, target: Graph, m: Mapping) -> list[str]:
    """Why ``m`` fails to be a graph homomorphism (empty if it is one)."""
    problems = []
    for v in source.ordered_vertices:
        if v not in m:
            problems.append(f"vertex {v} is not mapped")
        elif m[v] not in target.vertices:
            problems.append(f"vertex {v} maps to {m[v]}, not a target vertex")
    if problems:
        return problems
    for s, r in source.edges:
        fs, fr = m[s], m[r]
        if fs == fr:
            if not target.loop_count(fs):
                problems.append(f"edge ({s},{r}) collapses onto {fs}, which has no loop")
        elif (fs, fr) not in target.edges:
            problems.append(f"edge ({s},{r}) maps to non-edge ({fs},{fr})")
    for v in source.loops:
        if not target.loop_count(m[v]):
            problems.append(f"loop at {v} maps to loopless {m[v]}")
    for v in source.tail_anchors:
        if m[v] not in target.tail_anchors:
            problems.append(f"tail anchor {v} maps to non-anchor {m[v]}")
    return problems


def is_homomorphism(source: Graph, target: Graph, m: Mapping) -> bool:
    return not hom_violations(source, target, m)


def compose_homs(f: GraphHom, g: GraphHom) -> GraphHom:
    """``f o g``."""
    return GraphHom(g.source, f.target, {v: f.vertex_map[g.vertex_map[v]] for v in g.vertex_map})


def is_automorphism(g: Graph, m: Mapping) -> bool:
    if set(m) != g.vertices or set(m.values()) != g.vertices:
        return False
    for v in g.vertices:
        if g.loop_count(m[v]) != g.loop_count(v):
            return False
        if (v in g.tail_anchors) != (m[v] in g.tail_anchors):
            return False
    # bijective on a finite set, so the forward image of E equals E iff edges reflect too
    image = {(m[s], m[r]) for s, r in g.edges}
    return image == g.edges


@dataclass(frozen=True)
class GraphAut:
    hom: GraphHom
    inverse_map: Mapping[VertexTag, VertexTag]

    @property
    def graph(self) -> Graph:
        return self.hom.source

    @property
    def vertex_map(self) -> Mapping[VertexTag, VertexTag]:
        return self.hom.vertex_map

    @classmethod
    def from_map(cls, g: Graph, m: Mapping) -> "GraphAut":
        if not is_automorphism(g, m):
            raise ValueError("vertex map is not a graph automorphism")
        return cls(GraphHom(g, g, dict(m)), {w: v for v, w in m.items()})

    def __matmul__(self, other: "GraphAut") -> "GraphAut":
        return GraphAut.from_map(self.graph, compose_homs(self.hom, other.hom).vertex_map)


# -- serialization -----------------------------------------------------------

GRAPH_SCHEMA = {
    "type": "object",
    "required": ["vertices", "edges", "loops", "tails"],
    "additionalProperties": False,
    "properties": {
        "vertices": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["tag"],
                "properties": {
                    "tag": {"enum": ["element", "splitter", "rel_u", "sum_u", "tail", "plain"]},
                },
            },
        },
        "edges": {
            "type": "array",
            "items": {"type": "array", "minItems": 2, "maxItems": 2,
                      "items": {"type": "integer", "minimum": 0}},
        },
        "loops": {
            "type": "object",
            "patternProperties": {"^[0-9]+$": {"type": "integer", "minimum": 1}},
            "additionalProperties": False,
        },
        "tails": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "group_spec": {"type": "string"},
    },
}

_COORDS = {"type": "array", "items": {"type": "integer"}}
_PAIR = {"type": "array", "minItems": 2, "maxItems": 2, "items": _COORDS}
_TAG_SCHEMAS = {
    "element": {"required": ["coords"], "properties": {"coords": _COORDS}},
    "sum_u": {"required": ["coords"], "properties": {"coords": _COORDS}},
    "splitter": {"required": ["pair", "slot"],
                 "properties": {"pair": _PAIR, "slot": {"enum": [0, 1]}}},
    "rel_u": {"required": ["pair"], "properties": {"pair": _PAIR}},
    "tail": {"required": ["pair", "level"],
             "properties": {"pair": _PAIR, "level": {"type": "integer", "minimum": 1}}},
    "plain": {"required": ["id"], "properties": {"id": {"type": ["integer", "string"]}}},
}


class GraphSchemaError(ValueError):
    def __init__(self, message: str, path: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _tag_to_json(v: VertexTag) -> dict:
    if isinstance(v, Element):
        return {"tag": "element", "coords": list(v.a.coords)}
    if isinstance(v, SumU):
        return {"tag": "sum_u", "coords": list(v.c.coords)}
    if isinstance(v, Splitter):
        return {"tag": "splitter", "pair": _pair_json(v.pair), "slot": v.slot}
    if isinstance(v, RelU):
        return {"tag": "rel_u", "pair": _pair_json(v.pair)}
    if isinstance(v, Tail):
        return {"tag": "tail", "pair": _pair_json(v.pair), "level": v.level}
    return {"tag": "plain", "id": v.id}


def _pair_json(p: PairKey) -> list:
    return [list(p.first.coords), list(p.second.coords)]


def serialize(g: Graph) -> dict[str, Any]:
    order = g.ordered_vertices
    index = {v: i for i, v in enumerate(order)}
    doc: dict[str, Any] = {
        "vertices": [_tag_to_json(v) for v in order],
        "edges": sorted([index[s], index[r]] for s, r in g.edges),
        "loops": {str(index[v]): n for v, n in sorted(g.loops.items(), key=lambda kv: index[kv[0]])},
        "tails": sorted(index[v] for v in g.tail_anchors),
    }
    if g.group is not None:
        doc["group_spec"] = str(g.group)
    return doc


def dumps(g: Graph) -> str:
    return json.dumps(serialize(g), indent=1, sort_keys=False)


def _tag_from_json(obj: dict, group: Optional[FgAbelianGroup], path: str) -> VertexTag:
    kind = obj["tag"]
    try:
        jsonschema.validate(obj, _TAG_SCHEMAS[kind])
    except jsonschema.ValidationError as e:
        raise GraphSchemaError(e.message, path + e.json_path[1:]) from None
    if kind == "plain":
        return Plain(obj["id"])
    if group is None:
        raise GraphSchemaError(f"'{kind}' vertices need a group_spec", path)

    def elem(coords, p):
        if len(coords) != group.ngens:
            raise GraphSchemaError(f"expected {group.ngens} coordinates", p)
        return GroupElement(group, tuple(coords))

    def pair(p):
        return PairKey(elem(obj["pair"][0], f"{path}.pair[0]"), elem(obj["pair"][1], f"{path}.pair[1]"))

    if kind == "element":
        return Element(elem(obj["coords"], f"{path}.coords"))
    if kind == "sum_u":
        return SumU(elem(obj["coords"], f"{path}.coords"))
    if kind == "splitter":
        return Splitter(pair(path), obj["slot"])
    if kind == "rel_u":
        return RelU(pair(path))
    return Tail(pair(path), obj["level"])


def deserialize(doc: Any) -> Graph:
    try:
        jsonschema.validate(doc, GRAPH_SCHEMA)
    except jsonschema.ValidationError as e:
        raise GraphSchemaError(e.message, e.json_path) from None
    group = None
    if "group_spec" in doc:
        try:
            group = parse_group_spec(doc["group_spec"])
        except GroupSpecError as e:
            raise GraphSchemaError(str(e), "$.group_spec") from None
    tags = [_tag_from_json(v, group, f"$.vertices[{i}]") for i, v in enumerate(doc["vertices"])]
    seen = {}
    for i, t in enumerate(tags):
        if t in seen:
            raise GraphSchemaError(f"duplicate vertex tag {t} (also at index {seen[t]})",
                                   f"$.vertices[{i}]")
        seen[t] = i
    n = len(tags)

    def at(i: int, path: str) -> VertexTag:
        if i >= n:
            raise GraphSchemaError(f"vertex index {i} out of range (have {n})", path)
        return tags[i]

    edges = set()
    for k, (s, r) in enumerate(doc["edges"]):
        e = (at(s, f"$.edges[{k}][0]"), at(r, f"$.edges[{k}][1]"))
        if e in edges:
            raise GraphSchemaError("duplicate edge", f"$.edges[{k}]")
        edges.add(e)
    loops = {at(int(i), f"$.loops['{i}']"): c for i, c in doc["loops"].items()}
    tails = {at(i, f"$.tails[{k}]") for k, i in enumerate(doc["tails"])}
    return Graph(frozenset(tags), frozenset(edges), loops, frozenset(tails), group)


def loads(text: str) -> Graph:
    return deserialize(json.loads(text))


def to_dot(g: Graph) -> str:
    """Graphviz DOT: one node per vertex, loops drawn once per multiplicity,
    tail anchors marked with a double border and a ``tail`` annotation."""
    order = g.ordered_vertices
    index = {v: i for i, v in enumerate(order)}
    lines = ["digraph G {"]
    for v in order:
        attrs = [f'label="{_dot_escape(str(v))}"']
        if v in g.tail_anchors:
            attrs += ["peripheries=2", 'xlabel="tail"']
        lines.append(f"  n{index[v]} [{', '.join(attrs)}];")
    for s, r in sorted(g.edges, key=lambda e: (index[e[0]], index[e[1]])):
        lines.append(f"  n{index[s]} -> n{index[r]};")
    for v in order:
        for _ in range(g.loop_count(v)):
            lines.append(f"  n{index[v]} -> n{index[v]};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def graph_from_edges(edges: Iterable[tuple], loops: Optional[Mapping] = None,
                     vertices: Iterable = (), tails: Iterable = ()) -> Graph:
    """Convenience constructor for ``Plain``-tagged graphs: ids in, tags out."""
    b = GraphBuilder()
    for v in vertices:
        b.vertex(Plain(v))
    for s, r in edges:
        b.edge(Plain(s), Plain(r))
    for v, n in (loops or {}).items():
        b.loop(Plain(v), n)
    for v in tails:
        b.tail(Plain(v))
    return b.build()
