"""K-theory of graph algebras: the boundary map, K0 as its cokernel,
tail handling, and automorphisms induced on K0 by graph automorphisms.

For a row-finite graph with vertex set V and regular vertices V_E (those
receiving an edge), the boundary map ``Z V_E -> Z V`` sends ``v`` to
``v - sum of s(e) over edges e ranging at v``; K0 is its cokernel and the
class of ``p_v`` is the image of the basis vector ``e_v``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping, Union

from .abelian import FgAbelianGroup, GroupAut, GroupElement, GroupHom
from .graph import Graph, GraphAut, GraphBuilder, Plain, RelU, Tail, in_edges, validate
from .intlin import CokernelPresentation, IntMatrix, cokernel_presentation, kernel_rank


class Mode(enum.Enum):
    FINITE = "finite"
    TAIL_ELIMINATED = "tail-eliminated"


class KTheoryError(ValueError):
    pass


@dataclass(frozen=True)
class TailColumn:
    """Column label for the relation ``anchor = 0`` contributed by a killing tail."""
    anchor: object

    def __str__(self) -> str:
        return f"tail[{self.anchor}]"


@dataclass(frozen=True)
class BoundaryMatrix:
    matrix: IntMatrix
    row_tags: list
    col_tags: list

    @property
    def row_index(self) -> dict:
        return {v: i for i, v in enumerate(self.row_tags)}


def _mode(mode: Union[Mode, str]) -> Mode:
    return mode if isinstance(mode, Mode) else Mode(mode)


def boundary_matrix(g: Graph, mode: Union[Mode, str] = Mode.TAIL_ELIMINATED) -> BoundaryMatrix:
    """Matrix of ``B`` with rows indexed by all vertices and columns by V_E.

    In tail-eliminated mode every tail anchor ``u`` adds a unit column
    ``e_u``: along the infinite chain each relation ``u^n = u^(n-1) + u^n``
    kills the predecessor, so the anchor and every chain vertex vanish.
    """
    mode = _mode(mode)
    problems = validate(g)
    if problems:
        raise KTheoryError("invalid graph: " + "; ".join(problems))
    if mode is Mode.FINITE and g.tail_anchors:
        raise KTheoryError(f"{len(g.tail_anchors)} unmaterialized tail anchors in finite mode; "
                           "use tail-eliminated mode or truncate_tails first")
    rows = g.ordered_vertices
    index = {v: i for i, v in enumerate(rows)}
    regular = g.regular_vertices()
    cols: list = list(regular)
    columns = []
    for v in regular:
        col = [0] * len(rows)
        col[index[v]] += 1
        for s in in_edges(g, v):
            col[index[s]] -= 1
        columns.append(col)
    if mode is Mode.TAIL_ELIMINATED:
        for u in sorted(g.tail_anchors, key=lambda t: t._key()):
            col = [0] * len(rows)
            col[index[u]] = 1
            columns.append(col)
            cols.append(TailColumn(u))
    return BoundaryMatrix(IntMatrix.from_columns(columns, len(rows)), rows, cols)


@dataclass(frozen=True)
class K0Result:
    group: FgAbelianGroup
    class_of: Mapping[object, GroupElement]
    regular_vertices: list
    boundary: BoundaryMatrix
    presentation: CokernelPresentation
    mode: Mode

    def class_vector(self, coeffs: Mapping) -> GroupElement:
        """Class of an integer combination of vertices."""
        total = self.group.zero()
        for v, n in coeffs.items():
            total = total + n * self.class_of[v]
        return total


def k0(g: Graph, mode: Union[Mode, str] = Mode.TAIL_ELIMINATED) -> K0Result:
    mode = _mode(mode)
    bm = boundary_matrix(g, mode)
    pres = cokernel_presentation(bm.matrix)
    group = FgAbelianGroup(pres.torsion, pres.free_rank)
    proj = pres.projection
    class_of = {}
    for i, v in enumerate(bm.row_tags):
        class_of[v] = GroupElement(group, proj.column(i))
    return K0Result(group, class_of, g.regular_vertices(), bm, pres, mode)


def k1_rank(g: Graph, mode: Union[Mode, str] = Mode.TAIL_ELIMINATED) -> int:
    return kernel_rank(boundary_matrix(g, mode).matrix)


def relation_violations(g: Graph, k: K0Result) -> list[str]:
    """Regular vertices whose class differs from the sum over their in-edges."""
    bad = []
    for v in k.regular_vertices:
        total = k.group.zero()
        for s in in_edges(g, v):
            total = total + k.class_of[s]
        if total != k.class_of[v]:
            bad.append(f"[{v}] = {k.class_of[v]} but in-edge sum = {total}")
    if k.mode is Mode.TAIL_ELIMINATED:
        for u in g.tail_anchors:
            if not k.class_of[u].is_zero():
                bad.append(f"tail anchor {u} has nonzero class {k.class_of[u]}")
    return bad


def _column_perm(bm: BoundaryMatrix, m: Mapping) -> list[int]:
    cidx = {c: j for j, c in enumerate(bm.col_tags)}
    perm = []
    for c in bm.col_tags:
        img = TailColumn(m[c.anchor]) if isinstance(c, TailColumn) else m[c]
        if img not in cidx:
            raise KTheoryError(f"automorphism sends column {c} outside V_E")
        perm.append(cidx[img])
    return perm


def commutes_with_boundary(bm: BoundaryMatrix, m: Mapping) -> bool:
    """``P_V B == B P_{V_E}`` for the permutation matrices of the vertex map ``m``."""
    ridx = bm.row_index
    row_perm = [ridx[m[v]] for v in bm.row_tags]
    try:
        col_perm = _column_perm(bm, m)
    except KTheoryError:
        return False
    # P_V e_v = e_{m(v)};  P_{V_E} e_c = e_{m(c)}
    lhs = bm.matrix.permute_rows(row_perm)
    rhs = bm.matrix.permute_columns(col_perm)
    return lhs == rhs


def _induced_matrix(k: K0Result, row_perm: list[int]) -> IntMatrix:
    pres = k.presentation
    cols = []
    for j in range(pres.section.cols):
        x = pres.section.column(j)
        y = [0] * len(x)
        for i, xi in enumerate(x):
            y[row_perm[i]] = xi
        cols.append(pres.project(y))
    return IntMatrix.from_columns(cols, k.group.ngens)


def induced_automorphism(g: Graph, aut: GraphAut, k: K0Result) -> GroupAut:
    """The automorphism ``[x] -> [P_V x]`` of K0 in canonical coordinates.

    Raises :class:`KTheoryError` when the commuting square with ``B`` fails.
    """
    m = aut.vertex_map
    if not commutes_with_boundary(k.boundary, m):
        raise KTheoryError("vertex map does not commute with the boundary map")
    ridx = k.boundary.row_index
    fwd = [ridx[m[v]] for v in k.boundary.row_tags]
    back = [ridx[aut.inverse_map[v]] for v in k.boundary.row_tags]
    hom = GroupHom(k.group, k.group, _induced_matrix(k, fwd))
    inv = GroupHom(k.group, k.group, _induced_matrix(k, back))
    try:
        return GroupAut(hom, inv)
    except ValueError as e:  # pragma: no cover - would mean a bug upstream
        raise KTheoryError(f"induced map is not invertible: {e}") from None


def truncate_tails(g: Graph, depth: int) -> Graph:
    """Materialize the first ``depth`` vertices of every killing tail."""
    if depth < 1:
        raise ValueError("truncation depth must be >= 1")
    b = GraphBuilder(g.group)
    for v in g.vertices:
        b.vertex(v)
    for s, r in g.edges:
        b.edge(s, r)
    for v, n in g.loops.items():
        b.loop(v, n)
    for u in g.tail_anchors:
        prev = u
        for n in range(1, depth + 1):
            t = Tail(u.pair, n) if isinstance(u, RelU) else Plain(f"{u}^{n}")
            if t in g.vertices:
                raise ValueError(f"cannot materialize tail: {t} already exists")
            b.edge(prev, t)
            b.loop(t)
            prev = t
    return b.build()

