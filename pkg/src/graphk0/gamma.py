"""The graph functor: ``A -> Gamma(A)`` and ``phi -> Gamma(phi)``, plus the
checks that K0 of ``Gamma(A)`` is ``A`` and that every automorphism of ``A``
is induced by the graph automorphism ``Gamma(phi)``.

Per element ``a`` there is a vertex ``v_a`` (no in-edges) and a vertex
``u_a`` with an edge from ``v_a`` and two loops. Per unordered pair
``{a, b}`` (``a == b`` allowed) there are two splitters fed by ``v_a`` and
``v_b``, and a relation vertex fed by both splitters and by ``u_{a+b}``;
the relation vertex carries a killing tail.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .abelian import (
    FgAbelianGroup,
    GroupAut,
    GroupElement,
    GroupHom,
    InfiniteGroupError,
    compose,
    enumerate_elements,
    groups_isomorphic,
)
from .graph import (
    Element,
    Graph,
    GraphAut,
    GraphBuilder,
    GraphHom,
    PairKey,
    RelU,
    Splitter,
    SumU,
    Tail,
    compose_homs,
    hom_violations,
    in_edges,
    is_automorphism,
)
from .intlin import IntMatrix, cokernel_presentation
from .ktheory import K0Result, KTheoryError, Mode, commutes_with_boundary, induced_automorphism, k0


def build(group: FgAbelianGroup, window: Optional[int] = None) -> Graph:
    """``Gamma(group)``; infinite groups need a window on free coordinates.

    With a window only gadgets whose elements and sum all lie inside the
    window are built.
    """
    elements = enumerate_elements(group, window)
    inside = set(elements)
    b = GraphBuilder(group)
    for c in elements:
        b.edge(Element(c), SumU(c))
        b.loop(SumU(c), 2)
    for i, a in enumerate(elements):
        for bb in elements[i:]:
            c = a + bb
            if c not in inside:
                continue
            p = PairKey(a, bb)
            w0, w1, u = Splitter(p, 0), Splitter(p, 1), RelU(p)
            b.edge(Element(p.first), w0)
            b.edge(Element(p.second), w1)
            b.edge(w0, u)
            b.edge(w1, u)
            b.edge(SumU(c), u)
            b.tail(u)
    return b.build()


def core_vertex_count(n: int) -> int:
    return 2 * n + 3 * n * (n + 1) // 2


def _map_splitter(phi: GroupHom, w: Splitter) -> Splitter:
    a, b = w.pair.first, w.pair.second
    fa, fb = phi(a), phi(b)
    target = PairKey(fa, fb)
    if fa != fb:
        return Splitter(target, 0 if phi(w.anchor) == target.first else 1)
    if a == b:
        return Splitter(target, w.slot)
    # distinct anchors collapse: both splitters land on slot 0
    return Splitter(target, 0)


def vertex_image(phi: GroupHom, v) -> object:
    if isinstance(v, Element):
        return Element(phi(v.a))
    if isinstance(v, SumU):
        return SumU(phi(v.c))
    if isinstance(v, RelU):
        return RelU(PairKey(phi(v.pair.first), phi(v.pair.second)))
    if isinstance(v, Splitter):
        return _map_splitter(phi, v)
    if isinstance(v, Tail):
        return Tail(PairKey(phi(v.pair.first), phi(v.pair.second)), v.level)
    raise TypeError(f"{v} is not a vertex of a Gamma graph")


def apply_hom(phi: GroupHom, source: Graph, target: Graph) -> GraphHom:
    """``Gamma(phi)`` as a vertex map ``source -> target``."""
    if source.group != phi.source or target.group != phi.target:
        raise ValueError(f"graphs are built on {source.group} -> {target.group}, "
                         f"map is {phi.source} -> {phi.target}")
    m = {v: vertex_image(phi, v) for v in source.vertices}
    problems = hom_violations(source, target, m)
    if problems:
        raise ValueError("image is not a graph homomorphism: " + "; ".join(problems[:5]))
    return GraphHom(source, target, m)


def lift_automorphism(graph: Graph, phi: GroupAut) -> GraphAut:
    fwd = apply_hom(phi.hom, graph, graph).vertex_map
    back = apply_hom(phi.inverse, graph, graph).vertex_map
    if not is_automorphism(graph, fwd):
        raise ValueError("lift is not a graph automorphism")
    for v in graph.vertices:
        if back[fwd[v]] != v:
            raise ValueError(f"lift of the inverse does not invert at {v}")
    return GraphAut(GraphHom(graph, graph, fwd), back)


# -- verification reports ----------------------------------------------------

@dataclass
class Check:
    name: str
    expected: str
    actual: str
    passed: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: expected {self.expected}; actual {self.actual}"


@dataclass
class Report:
    title: str
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, expected, actual, passed: bool) -> Check:
        c = Check(name, str(expected), str(actual), bool(passed))
        self.checks.append(c)
        return c

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def text(self) -> str:
        return "\n".join([f"== {self.title}"] + [c.line() for c in self.checks])


@dataclass
class GammaContext:
    """``Gamma(A)`` together with its K0, computed once and reused."""

    group: FgAbelianGroup
    graph: Graph
    k: K0Result
    elements: list[GroupElement]

    @classmethod
    def of(cls, group: FgAbelianGroup) -> "GammaContext":
        if not group.is_finite:
            raise InfiniteGroupError(f"{group} is infinite")
        g = build(group)
        return cls(group, g, k0(g, Mode.TAIL_ELIMINATED), enumerate_elements(group))

    def element_class(self, a: GroupElement) -> GroupElement:
        return self.k.class_of[Element(a)]

    def canonical_iso(self) -> dict[GroupElement, GroupElement]:
        """K0 class -> group element, inverting ``a -> [v_a]``."""
        return {self.element_class(a): a for a in self.elements}


def _first(items: Iterable, limit: int = 3) -> str:
    items = list(items)
    head = ", ".join(str(x) for x in items[:limit])
    return head + (f" (+{len(items) - limit} more)" if len(items) > limit else "")


def verify_mc1(group: FgAbelianGroup, ctx: Optional[GammaContext] = None) -> Report:
    """K0 of ``Gamma(A)`` is ``A`` via ``[v_a] -> a``."""
    ctx = ctx or GammaContext.of(group)
    k = ctx.k
    rep = Report(f"K0(Gamma({group})) = {group}")
    rep.add("invariant factors", group, k.group, groups_isomorphic(k.group, group))

    bad = [(a, b) for i, a in enumerate(ctx.elements) for b in ctx.elements[i:]
           if ctx.element_class(a) + ctx.element_class(b) != ctx.element_class(a + b)]
    rep.add("additivity [v_a]+[v_b]=[v_(a+b)]", "0 failing pairs",
            f"{len(bad)} failing pairs" + (f": {_first(bad)}" if bad else ""), not bad)

    # the classes [v_a] generate K0 iff K0 modulo their span is trivial
    gens = [list(ctx.element_class(a).coords) for a in ctx.elements]
    rel = k.group.relation_matrix()
    span = IntMatrix.from_columns(gens + [list(rel.column(j)) for j in range(rel.cols)],
                                  k.group.ngens)
    quotient = cokernel_presentation(span)
    trivial = not quotient.torsion and quotient.free_rank == 0
    rep.add("surjectivity of a -> [v_a]", "trivial quotient",
            f"quotient {FgAbelianGroup(quotient.torsion, quotient.free_rank)}", trivial)

    rep.add("group orders", group.order, k.group.order, group.order == k.group.order)
    return rep


def verify_relations(group: FgAbelianGroup, ctx: Optional[GammaContext] = None) -> Report:
    """The gadget relations hold as exact identities in K0."""
    ctx = ctx or GammaContext.of(group)
    k, g = ctx.k, ctx.graph
    rep = Report(f"gadget relations in K0(Gamma({group}))")
    cls = k.class_of
    rel_u = sorted((v for v in g.vertices if isinstance(v, RelU)), key=lambda v: v._key())

    bad1 = [v for v in rel_u
            if cls[v] != cls[Element(v.pair.first)] + cls[Element(v.pair.second)]
            + cls[SumU(v.pair.sum)]]
    rep.add("[u_ab] = [v_a] + [v_b] + [u_c]", "0 violations", len(bad1), not bad1)
    bad2 = [c for c in ctx.elements if cls[SumU(c)] != cls[Element(c)] + 2 * cls[SumU(c)]]
    rep.add("[u_c] = [v_c] + 2[u_c]", "0 violations", len(bad2), not bad2)
    bad3 = [c for c in ctx.elements if cls[SumU(c)] != -cls[Element(c)]]
    rep.add("[u_c] = -[v_c]", "0 violations", len(bad3), not bad3)
    bad4 = [v for v in rel_u if not cls[v].is_zero()]
    rep.add("[u_ab] = 0", "0 violations", len(bad4), not bad4)
    bad5 = [v for v in g.vertices if isinstance(v, Splitter) and cls[v] != cls[Element(v.anchor)]]
    rep.add("[w] = [v_anchor]", "0 violations", len(bad5), not bad5)
    bad6 = [v for v in k.regular_vertices
            if sum((cls[s] for s in in_edges(g, v)), k.group.zero()) != cls[v]]
    rep.add("[v] = sum over in-edges for v in V_E", "0 violations", len(bad6), not bad6)
    return rep


@dataclass
class LiftResult:
    phi: GroupAut
    graph_aut: Optional[GraphAut]
    induced: Optional[GroupAut]
    induced_on_group: Optional[IntMatrix]
    report: Report


def induced_on_group(ctx: GammaContext, induced: GroupAut) -> IntMatrix:
    """Conjugate an automorphism of K0 back to ``A`` through ``[v_a] -> a``."""
    iso = ctx.canonical_iso()
    cols = []
    for e in ctx.group.generators():
        img = induced(ctx.element_class(e))
        cols.append(iso[img].coords)
    return IntMatrix.from_columns(cols, ctx.group.ngens)


def verify_mc2(group: FgAbelianGroup, phi: GroupAut,
               ctx: Optional[GammaContext] = None) -> LiftResult:
    """``phi`` lifts to ``Gamma(phi)`` and the induced K0 map is ``phi``."""
    ctx = ctx or GammaContext.of(group)
    rep = Report(f"lift of phi = {phi.matrix.to_rows()} on {group}")
    try:
        gaut = lift_automorphism(ctx.graph, phi)
    except ValueError as e:
        rep.add("Gamma(phi) is a graph automorphism", True, f"error: {e}", False)
        return LiftResult(phi, None, None, None, rep)
    rep.add("Gamma(phi) is a graph automorphism", True, True, True)

    square = commutes_with_boundary(ctx.k.boundary, gaut.vertex_map)
    rep.add("P_V B = B P_VE", True, square, square)
    if not square:
        return LiftResult(phi, gaut, None, None, rep)
    try:
        ind = induced_automorphism(ctx.graph, gaut, ctx.k)
    except KTheoryError as e:
        rep.add("induced map on K0", "automorphism", f"error: {e}", False)
        return LiftResult(phi, gaut, None, None, rep)

    bad = [a for a in ctx.elements
           if ind(ctx.element_class(a)) != ctx.element_class(phi(a))]
    rep.add("induced([v_a]) = [v_phi(a)]", "all elements", f"{len(bad)} mismatches", not bad)
    on_group = induced_on_group(ctx, ind)
    rep.add("induced map in group coordinates", phi.matrix.to_rows(), on_group.to_rows(),
            on_group == phi.matrix)
    return LiftResult(phi, gaut, ind, on_group, rep)


def verify_lift_embedding(results: Sequence[LiftResult]) -> Report:
    """``phi -> induced`` is injective and multiplicative over the given set."""
    rep = Report("Aut(A) -> Aut(K0) embedding")
    mats = [r.induced_on_group for r in results]
    ok = all(m is not None for m in mats)
    distinct = len(set(mats)) == len(mats)
    rep.add("induced maps pairwise distinct", len(mats), len(set(mats)), ok and distinct)
    by_phi = {r.phi.matrix: r for r in results}
    bad = 0
    checked = 0
    for r1 in results:
        for r2 in results:
            prod = (r1.phi @ r2.phi).matrix
            if prod not in by_phi or r1.induced is None or r2.induced is None:
                continue
            checked += 1
            lhs = by_phi[prod].induced.hom
            rhs = compose(r1.induced.hom, r2.induced.hom)
            if lhs != rhs:
                bad += 1
    rep.add("induced(phi o psi) = induced(phi) o induced(psi)", f"0 of {checked} fail",
            f"{bad} of {checked} fail", ok and bad == 0)
    return rep


def verify_functor_laws(group: FgAbelianGroup, pairs: Iterable[tuple[GroupHom, GroupHom]],
                        graph: Optional[Graph] = None) -> Report:
    """``Gamma(id) = id`` and ``Gamma(phi o psi) = Gamma(phi) o Gamma(psi)`` tag by tag."""
    g = graph or build(group)
    rep = Report(f"functor laws on Gamma({group})")
    ident = apply_hom(GroupHom.identity(group), g, g).vertex_map
    moved = [v for v in g.vertices if ident[v] != v]
    rep.add("Gamma(id) = id", "0 moved vertices", f"{len(moved)} moved", not moved)
    n = bad = 0
    for phi, psi in pairs:
        n += 1
        lhs = apply_hom(compose(phi, psi), g, g).vertex_map
        rhs = compose_homs(apply_hom(phi, g, g), apply_hom(psi, g, g)).vertex_map
        if lhs != rhs:
            bad += 1
    rep.add("Gamma(phi o psi) = Gamma(phi) o Gamma(psi)", f"0 of {n} pairs fail",
            f"{bad} of {n} pairs fail", bad == 0)
    return rep


def random_pairs(auts: Sequence[GroupAut], count: int, seed: int = 0) -> list[tuple[GroupHom, GroupHom]]:
    rng = random.Random(seed)
    return [(rng.choice(auts).hom, rng.choice(auts).hom) for _ in range(count)]
