"""Finitely generated abelian groups in invariant-factor form.

A group is ``Z/d_1 + ... + Z/d_k + Z^r`` with ``d_1 | d_2 | ... | d_k`` and
every ``d_i >= 2``. Elements carry coordinates in that order: torsion
coordinates first (reduced into ``[0, d_i)``), free coordinates last.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd, lcm, prod
from typing import Iterable, Iterator, Optional, Sequence

from .intlin import IntMatrix, invariant_factors, solve


class GroupSpecError(ValueError):
    """Malformed group specification; ``position`` is the 0-based offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class InfiniteGroupError(ValueError):
    pass


class IllDefinedHomError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class FgAbelianGroup:
    torsion: tuple[int, ...] = ()
    free_rank: int = 0

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        if self.free_rank < 0:
            raise ValueError("free rank must be nonnegative")
        for d in self.torsion:
            if d < 2:
                raise ValueError(f"invariant factor {d} < 2")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"invariant factors not a divisor chain: {a} does not divide {b}")

    @classmethod
    def from_orders(cls, orders: Iterable[int], free_rank: int = 0) -> "FgAbelianGroup":
        """Canonical form of ``Z/n_1 + ... + Z/n_k + Z^free_rank`` (any ``n_i >= 1``)."""
        orders = [int(n) for n in orders]
        if any(n < 1 for n in orders):
            raise ValueError("cyclic orders must be positive")
        diag = invariant_factors(IntMatrix.diagonal(orders))
        return cls(tuple(d for d in diag if d != 1), free_rank)

    @property
    def ngens(self) -> int:
        return len(self.torsion) + self.free_rank

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def order(self) -> Optional[int]:
        return prod(self.torsion) if self.is_finite else None

    def relation_matrix(self) -> IntMatrix:
        """Columns ``d_i e_i``: the relation lattice of the canonical generators."""
        k = len(self.torsion)
        return IntMatrix.diagonal(self.torsion, self.ngens, k)

    def element(self, coords: Sequence[int]) -> "GroupElement":
        return GroupElement(self, tuple(coords))

    def zero(self) -> "GroupElement":
        return GroupElement(self, (0,) * self.ngens)

    def generators(self) -> list["GroupElement"]:
        return [GroupElement(self, tuple(int(i == j) for j in range(self.ngens)))
                for i in range(self.ngens)]

    def reduce(self, coords: Sequence[int]) -> tuple[int, ...]:
        if len(coords) != self.ngens:
            raise ValueError(f"expected {self.ngens} coordinates, got {len(coords)}")
        k = len(self.torsion)
        return tuple(int(c) % self.torsion[i] if i < k else int(c)
                     for i, c in enumerate(coords))

    def __str__(self) -> str:
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts += [f"Z/{d}" for d in self.torsion]
        return " x ".join(parts) if parts else "Z^0"


@dataclass(frozen=True)
class GroupElement:
    group: FgAbelianGroup
    coords: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", self.group.reduce(self.coords))

    def _check(self, other: "GroupElement") -> None:
        if other.group != self.group:
            raise ValueError(f"group mismatch: {self.group} vs {other.group}")

    def __add__(self, other: "GroupElement") -> "GroupElement":
        self._check(other)
        return GroupElement(self.group, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "GroupElement":
        return GroupElement(self.group, tuple(-a for a in self.coords))

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        return self + (-other)

    def __mul__(self, n: int) -> "GroupElement":
        return GroupElement(self.group, tuple(n * a for a in self.coords))

    __rmul__ = __mul__

    def __lt__(self, other: "GroupElement") -> bool:
        self._check(other)
        return self.coords < other.coords

    def __le__(self, other: "GroupElement") -> bool:
        self._check(other)
        return self.coords <= other.coords

    def is_zero(self) -> bool:
        return not any(self.coords)

    def order(self) -> Optional[int]:
        if any(self.coords[len(self.group.torsion):]):
            return None
        n = 1
        for c, d in zip(self.coords, self.group.torsion):
            n = lcm(n, d // gcd(c, d))
        return n

    def __str__(self) -> str:
        return "(" + ",".join(str(c) for c in self.coords) + ")"

    def __repr__(self) -> str:
        return f"GroupElement({self.group}, {self})"


def add(x: GroupElement, y: GroupElement) -> GroupElement:
    return x + y


def parse_element(group: FgAbelianGroup, text: str) -> GroupElement:
    """Parse ``"(c1,...,cn)"``."""
    t = text.strip()
    if not (t.startswith("(") and t.endswith(")")):
        raise ValueError(f"element must look like (c1,...,cn): {text!r}")
    inner = t[1:-1].strip()
    coords = [int(x) for x in inner.split(",")] if inner else []
    return group.element(coords)


def parse_group_spec(text: str) -> FgAbelianGroup:
    """Parse ``"0"``, ``"Z"``, ``"Z^2"``, ``"Z/4 x Z/2"`` ... into canonical form."""
    s = text
    pos = 0
    n = len(s)

    def skip_ws(p: int) -> int:
        while p < n and s[p].isspace():
            p += 1
        return p

    def read_nat(p: int) -> tuple[int, int]:
        p = skip_ws(p)
        start = p
        while p < n and s[p].isdigit():
            p += 1
        if p == start:
            raise GroupSpecError("expected a natural number", start)
        return int(s[start:p]), p

    pos = skip_ws(pos)
    if pos == n:
        raise GroupSpecError("empty group specification", pos)
    if s[pos] == "0":
        end = skip_ws(pos + 1)
        if end != n:
            raise GroupSpecError("unexpected input after '0'", end)
        return FgAbelianGroup()

    orders: list[int] = []
    free = 0
    while True:
        pos = skip_ws(pos)
        if pos >= n or s[pos] != "Z":
            raise GroupSpecError("expected 'Z'", pos)
        pos = skip_ws(pos + 1)
        if pos < n and s[pos] == "^":
            r, pos = read_nat(pos + 1)
            free += r
        elif pos < n and s[pos] == "/":
            start = skip_ws(pos + 1)
            d, pos = read_nat(pos + 1)
            if d < 2:
                raise GroupSpecError(f"cyclic order must be >= 2, got Z/{d}", start)
            orders.append(d)
        else:
            free += 1
        pos = skip_ws(pos)
        if pos == n:
            break
        if s[pos] != "x":
            raise GroupSpecError("expected 'x' between terms", pos)
        pos += 1
    return FgAbelianGroup.from_orders(orders, free)


def enumerate_elements(group: FgAbelianGroup, window: Optional[int] = None) -> list[GroupElement]:
    """All elements in lexicographic coordinate order.

    Free coordinates range over ``[-window, window]``; a window is required
    when the group is infinite.
    """
    if not group.is_finite and window is None:
        raise InfiniteGroupError(f"{group} is infinite; supply a window for free coordinates")
    ranges = [range(d) for d in group.torsion]
    if group.free_rank:
        ranges += [range(-window, window + 1)] * group.free_rank
    return [GroupElement(group, c) for c in itertools.product(*ranges)]


@dataclass(frozen=True)
class GroupHom:
    """Homomorphism given by its action on canonical generators.

    ``matrix`` has one column per source generator holding the target
    coordinates of its image; torsion rows are kept reduced.
    """

    source: FgAbelianGroup
    target: FgAbelianGroup
    matrix: IntMatrix

    def __post_init__(self):
        m = self.matrix
        if m.shape != (self.target.ngens, self.source.ngens):
            raise ValueError(f"matrix shape {m.shape} does not match "
                             f"{self.target.ngens}x{self.source.ngens}")
        cols = [self.target.reduce(m.column(j)) for j in range(m.cols)]
        object.__setattr__(self, "matrix", IntMatrix.from_columns(cols, m.rows))
        bad = ill_defined_generators(self.source, self.target, self.matrix)
        if bad:
            raise IllDefinedHomError(
                f"not a homomorphism {self.source} -> {self.target}: "
                f"relations of generators {bad} are not respected")

    @classmethod
    def identity(cls, group: FgAbelianGroup) -> "GroupHom":
        return cls(group, group, IntMatrix.identity(group.ngens))

    @classmethod
    def from_images(cls, source: FgAbelianGroup, target: FgAbelianGroup,
                    images: Sequence[GroupElement]) -> "GroupHom":
        return cls(source, target,
                   IntMatrix.from_columns([im.coords for im in images], target.ngens))

    def __call__(self, x: GroupElement) -> GroupElement:
        if x.group != self.source:
            raise ValueError(f"element of {x.group} passed to a map from {self.source}")
        return GroupElement(self.target, tuple(self.matrix.apply(x.coords)))

    def __matmul__(self, other: "GroupHom") -> "GroupHom":
        return compose(self, other)


def ill_defined_generators(source: FgAbelianGroup, target: FgAbelianGroup,
                           matrix: IntMatrix) -> list[int]:
    """Source torsion generators whose relation ``d_i e_i`` is not sent into
    the target's relation lattice (certified by an integer solve)."""
    rel = target.relation_matrix()
    bad = []
    for i, d in enumerate(source.torsion):
        image = [d * x for x in matrix.column(i)]
        if solve(rel, image) is None:
            bad.append(i)
    return bad


def is_well_defined(source: FgAbelianGroup, target: FgAbelianGroup, matrix: IntMatrix) -> bool:
    return not ill_defined_generators(source, target, matrix)


def compose(f: GroupHom, g: GroupHom) -> GroupHom:
    """``f o g``."""
    if g.target != f.source:
        raise ValueError(f"cannot compose: {g.target} != {f.source}")
    return GroupHom(g.source, f.target, f.matrix @ g.matrix)


@dataclass(frozen=True)
class GroupAut:
    hom: GroupHom
    inverse: GroupHom

    def __post_init__(self):
        g = self.hom.source
        if self.hom.target != g or self.inverse.source != g or self.inverse.target != g:
            raise ValueError("automorphism must map a group to itself")
        ident = GroupHom.identity(g)
        if compose(self.hom, self.inverse) != ident or compose(self.inverse, self.hom) != ident:
            raise ValueError("inverse does not invert the map")

    @property
    def group(self) -> FgAbelianGroup:
        return self.hom.source

    @property
    def matrix(self) -> IntMatrix:
        return self.hom.matrix

    @classmethod
    def identity(cls, group: FgAbelianGroup) -> "GroupAut":
        ident = GroupHom.identity(group)
        return cls(ident, ident)

    @classmethod
    def from_hom(cls, hom: GroupHom) -> "GroupAut":
        """Invert ``hom`` by element enumeration (finite groups only)."""
        g = hom.source
        if hom.target != g:
            raise ValueError("not an endomorphism")
        preimage = {}
        for x in enumerate_elements(g):
            y = hom(x)
            if y in preimage:
                raise ValueError(f"not invertible: {preimage[y]} and {x} both map to {y}")
            preimage[y] = x
        inverse = GroupHom.from_images(g, g, [preimage[e] for e in g.generators()])
        return cls(hom, inverse)

    def __call__(self, x: GroupElement) -> GroupElement:
        return self.hom(x)

    def __matmul__(self, other: "GroupAut") -> "GroupAut":
        return GroupAut(compose(self.hom, other.hom), compose(other.inverse, self.inverse))

    def inv(self) -> "GroupAut":
        return GroupAut(self.inverse, self.hom)


def _images_by_order(group: FgAbelianGroup) -> dict[int, list[GroupElement]]:
    by_order: dict[int, list[GroupElement]] = {}
    for x in enumerate_elements(group):
        by_order.setdefault(x.order(), []).append(x)
    return by_order


def iter_automorphisms(group: FgAbelianGroup) -> Iterator[GroupAut]:
    if not group.is_finite:
        raise InfiniteGroupError(f"Aut({group}) is not enumerable here: group is infinite")
    by_order = _images_by_order(group)
    elements = enumerate_elements(group)
    # an automorphism preserves element orders, so generator i must go to
    # an element of order exactly d_i
    candidates = [by_order.get(d, []) for d in group.torsion]
    for images in itertools.product(*candidates):
        hom = GroupHom.from_images(group, group, images)
        if len({hom(x) for x in elements}) != len(elements):
            continue
        yield GroupAut.from_hom(hom)


def enumerate_automorphisms(group: FgAbelianGroup) -> list[GroupAut]:
    """Every automorphism of a finite group, each with its inverse."""
    return list(iter_automorphisms(group))


def groups_isomorphic(a: FgAbelianGroup, b: FgAbelianGroup) -> bool:
    return a == b
