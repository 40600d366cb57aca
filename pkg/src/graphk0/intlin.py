"""Exact integer linear algebra.

Smith normal form with unimodular transforms, cokernel and kernel
presentations, and solving ``M x = b`` over the integers.

Matrices are dense and immutable at the API surface (:class:`IntMatrix`).
The elimination itself runs on a sparse row/column index, because the
boundary matrices of the graphs built in :mod:`graphk0.gamma` are very
sparse and mostly reduce with unit pivots.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence


@dataclass(frozen=True)
class IntMatrix:
    """Dense ``rows x cols`` matrix of Python integers, stored row-major."""

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} entries, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged rows")
        return cls(len(rows), cols, tuple(int(x) for r in rows for x in r))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> "IntMatrix":
        for c in columns:
            if len(c) != rows:
                raise ValueError("column length mismatch")
        return cls(rows, len(columns),
                   tuple(int(columns[j][i]) for i in range(rows) for j in range(len(columns))))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def diagonal(cls, diag: Sequence[int], rows: Optional[int] = None,
                 cols: Optional[int] = None) -> "IntMatrix":
        rows = len(diag) if rows is None else rows
        cols = len(diag) if cols is None else cols
        data = [0] * (rows * cols)
        for i, d in enumerate(diag):
            data[i * cols + i] = int(d)
        return cls(rows, cols, tuple(data))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(ij)
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> tuple[int, ...]:
        return self.entries[j::self.cols] if self.cols else ()

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows,
                         tuple(self.entries[i * self.cols + j]
                               for j in range(self.cols) for i in range(self.rows)))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        ocols = [other.column(j) for j in range(other.cols)]
        out = []
        for i in range(self.rows):
            r = self.row(i)
            nz = [(k, x) for k, x in enumerate(r) if x]
            for c in ocols:
                out.append(sum(x * c[k] for k, x in nz))
        return IntMatrix(self.rows, other.cols, tuple(out))

    def apply(self, vec: Sequence[int]) -> list[int]:
        """Matrix-vector product."""
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        nz = [(k, x) for k, x in enumerate(vec) if x]
        return [sum(self.entries[i * self.cols + k] * x for k, x in nz)
                for i in range(self.rows)]

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise ValueError("row count mismatch")
        return IntMatrix.from_rows([self.row(i) + other.row(i) for i in range(self.rows)],
                                   cols=self.cols + other.cols)

    def permute_rows(self, perm: Sequence[int]) -> "IntMatrix":
        """Row ``i`` of ``self`` becomes row ``perm[i]`` (left multiply by a permutation)."""
        out: list = [None] * self.rows
        for i, p in enumerate(perm):
            out[p] = self.row(i)
        return IntMatrix.from_rows(out, cols=self.cols)

    def permute_columns(self, perm: Sequence[int]) -> "IntMatrix":
        """Right multiply by ``P`` with ``P e_j = e_{perm[j]}``.

        Column ``j`` of the result is column ``perm[j]`` of ``self``.
        """
        cols = [self.column(p) for p in perm]
        return IntMatrix.from_columns(cols, self.rows)

    def is_zero(self) -> bool:
        return not any(self.entries)

    def __str__(self) -> str:
        return format_matrix(self)


def format_matrix(m: IntMatrix) -> str:
    """Text format: ``"m n"`` then one line of whitespace-separated entries per row."""
    lines = [f"{m.rows} {m.cols}"]
    lines += [" ".join(str(x) for x in m.row(i)) for i in range(m.rows)]
    return "\n".join(lines)


def parse_matrix(text: str) -> IntMatrix:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty matrix text: expected header 'm n'")
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError("header must be 'm n'")
    try:
        m, n = int(header[0]), int(header[1])
    except ValueError:
        raise ValueError(f"bad header {lines[0]!r}") from None
    if m < 0 or n < 0:
        raise ValueError("negative dimension in header")
    body = lines[1:]
    if len(body) != m:
        raise ValueError(f"expected {m} rows, found {len(body)}")
    rows = []
    for k, ln in enumerate(body, start=2):
        try:
            r = [int(t) for t in ln.split()]
        except ValueError:
            raise ValueError(f"line {k}: non-integer entry") from None
        if len(r) != n:
            raise ValueError(f"line {k}: expected {n} entries, found {len(r)}")
        rows.append(r)
    return IntMatrix.from_rows(rows, cols=n)


def determinant(m: IntMatrix) -> int:
    """Bareiss fraction-free determinant."""
    if m.rows != m.cols:
        raise ValueError("determinant of a non-square matrix")
    n = m.rows
    a = m.to_rows()
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] if n else 1


@dataclass(frozen=True)
class SnfDecomposition:
    """``U @ M @ V == S`` with ``S`` diagonal and ``diagonal[i] | diagonal[i+1]``.

    ``diagonal`` holds the nonzero invariant factors only; ``rank`` is its
    length. ``U_inv`` is the inverse of ``U`` (always computed when ``U`` is).
    """

    U: Optional[IntMatrix]
    S: IntMatrix
    V: Optional[IntMatrix]
    diagonal: tuple[int, ...]
    U_inv: Optional[IntMatrix] = None

    @property
    def rank(self) -> int:
        return len(self.diagonal)


def _axpy(dst: dict, src: dict, q: int) -> None:
    """dst += q * src on sparse vectors."""
    for k, v in src.items():
        x = dst.get(k, 0) + q * v
        if x:
            dst[k] = x
        else:
            dst.pop(k, None)


class _Work:
    """Sparse working copy of a matrix plus optional transform trackers.

    ``rows[i]`` maps column -> value; ``colrows[j]`` is the set of rows
    with a nonzero in column ``j``. ``U`` is stored by rows, ``U_inv`` and
    ``V`` by columns, so each elementary operation is a single sparse axpy.
    """

    def __init__(self, m: IntMatrix, track_left: bool, track_right: bool):
        self.nrows, self.ncols = m.rows, m.cols
        self.rows = [dict() for _ in range(m.rows)]
        self.colrows = [set() for _ in range(m.cols)]
        for i in range(m.rows):
            for j, x in enumerate(m.row(i)):
                if x:
                    self.rows[i][j] = x
                    self.colrows[j].add(i)
        self.U = [{i: 1} for i in range(m.rows)] if track_left else None
        self.U_inv = [{i: 1} for i in range(m.rows)] if track_left else None
        self.V = [{j: 1} for j in range(m.cols)] if track_right else None

    def add_row(self, k: int, i: int, q: int) -> None:
        """row_k += q * row_i."""
        rk = self.rows[k]
        for j, v in self.rows[i].items():
            x = rk.get(j, 0) + q * v
            if x:
                if j not in rk:
                    self.colrows[j].add(k)
                rk[j] = x
            elif j in rk:
                del rk[j]
                self.colrows[j].discard(k)
        if self.U is not None:
            _axpy(self.U[k], self.U[i], q)
            _axpy(self.U_inv[i], self.U_inv[k], -q)

    def add_col(self, k: int, j: int, q: int) -> None:
        """col_k += q * col_j."""
        for i in list(self.colrows[j]):
            r = self.rows[i]
            x = r.get(k, 0) + q * r[j]
            if x:
                if k not in r:
                    self.colrows[k].add(i)
                r[k] = x
            elif k in r:
                del r[k]
                self.colrows[k].discard(i)
        if self.V is not None:
            _axpy(self.V[k], self.V[j], q)

    def negate_row(self, i: int) -> None:
        for j in self.rows[i]:
            self.rows[i][j] = -self.rows[i][j]
        if self.U is not None:
            self.U[i] = {k: -v for k, v in self.U[i].items()}
            self.U_inv[i] = {k: -v for k, v in self.U_inv[i].items()}


def _pick_pivot(w: _Work, live_rows: set) -> Optional[tuple[int, int]]:
    # smallest magnitude, ties broken by Markowitz cost to limit fill-in
    best = None
    best_key = None
    for i in live_rows:
        r = w.rows[i]
        if not r:
            continue
        lr = len(r) - 1
        for j, v in r.items():
            key = (abs(v), lr * (len(w.colrows[j]) - 1))
            if best_key is None or key < best_key:
                best_key, best = key, (i, j)
                if key == (1, 0):
                    return best
    return best


def _eliminate(w: _Work) -> list[list[int]]:
    """Diagonalize in place; return pivots ``[row, col, value]`` in discovery order."""
    live_rows = {i for i in range(w.nrows) if w.rows[i]}
    pivots = []
    while True:
        pos = _pick_pivot(w, live_rows)
        if pos is None:
            break
        i, j = pos
        p = w.rows[i][j]
        clean = True
        for k in list(w.colrows[j]):
            if k == i:
                continue
            q = w.rows[k][j] // p
            w.add_row(k, i, -q)
            if j in w.rows[k]:
                clean = False
        if not clean:
            continue
        for k in [c for c in w.rows[i] if c != j]:
            q = w.rows[i][k] // p
            w.add_col(k, j, -q)
            if k in w.rows[i]:
                clean = False
        if not clean:
            continue
        pivots.append([i, j, p])
        live_rows.discard(i)
        # the pivot row/column are now isolated; drop them from the index
        del w.rows[i][j]
        w.colrows[j].discard(i)
    return pivots


def _fix_divisibility(w: _Work, pivots: list[list[int]]) -> None:
    """Enforce d_i | d_j via 2x2 unimodular moves on pivot pairs."""
    for pv in pivots:
        if pv[2] < 0:
            w.negate_row(pv[0])
            pv[2] = -pv[2]
    n = len(pivots)
    for a_idx in range(n):
        for b_idx in range(a_idx + 1, n):
            ri, ci, a = pivots[a_idx]
            rj, cj, b = pivots[b_idx]
            if b % a == 0:
                continue
            g, s, t = _xgcd(a, b)
            ag, bg = a // g, b // g
            # L = [[s, t], [-b/g, a/g]] on rows (ri, rj)
            # R = [[1, -t b/g], [1, s a/g]] on cols (ci, cj)
            if w.U is not None:
                ui, uj = w.U[ri], w.U[rj]
                new_i = {}
                _axpy(new_i, ui, s)
                _axpy(new_i, uj, t)
                new_j = {}
                _axpy(new_j, ui, -bg)
                _axpy(new_j, uj, ag)
                w.U[ri], w.U[rj] = new_i, new_j
                # L^-1 = [[a/g, -t], [b/g, s]] on U_inv columns
                ci_old, cj_old = w.U_inv[ri], w.U_inv[rj]
                new_ci = {}
                _axpy(new_ci, ci_old, ag)
                _axpy(new_ci, cj_old, bg)
                new_cj = {}
                _axpy(new_cj, ci_old, -t)
                _axpy(new_cj, cj_old, s)
                w.U_inv[ri], w.U_inv[rj] = new_ci, new_cj
            if w.V is not None:
                vi, vj = w.V[ci], w.V[cj]
                new_vi = {}
                _axpy(new_vi, vi, 1)
                _axpy(new_vi, vj, 1)
                new_vj = {}
                _axpy(new_vj, vi, -t * bg)
                _axpy(new_vj, vj, s * ag)
                w.V[ci], w.V[cj] = new_vi, new_vj
            pivots[a_idx][2] = g
            pivots[b_idx][2] = a * b // g


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b == g == gcd(a, b) >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _dense_rows(vecs: list[dict], order: list[int], width: int) -> IntMatrix:
    data = []
    for idx in order:
        v = vecs[idx]
        data.extend(v.get(k, 0) for k in range(width))
    return IntMatrix(len(order), width, tuple(data))


def _dense_cols(vecs: list[dict], order: list[int], height: int) -> IntMatrix:
    return IntMatrix(height, len(order),
                     tuple(vecs[idx].get(i, 0) for i in range(height) for idx in order))


def _snf(m: IntMatrix, track_left: bool, track_right: bool) -> SnfDecomposition:
    w = _Work(m, track_left, track_right)
    pivots = _eliminate(w)
    _fix_divisibility(w, pivots)
    diag = tuple(p[2] for p in pivots)
    row_order = [p[0] for p in pivots]
    used = set(row_order)
    row_order += [i for i in range(m.rows) if i not in used]
    col_order = [p[1] for p in pivots]
    used = set(col_order)
    col_order += [j for j in range(m.cols) if j not in used]
    S = IntMatrix.diagonal(diag, m.rows, m.cols)
    U = U_inv = V = None
    if track_left:
        U = _dense_rows(w.U, row_order, m.rows)
        U_inv = _dense_cols(w.U_inv, row_order, m.rows)
    if track_right:
        V = _dense_cols(w.V, col_order, m.cols)
    return SnfDecomposition(U=U, S=S, V=V, diagonal=diag, U_inv=U_inv)


def smith_normal_form(m: IntMatrix) -> SnfDecomposition:
    """Smith normal form ``U @ m @ V == S`` with both transforms unimodular."""
    return _snf(m, True, True)


def invariant_factors(m: IntMatrix) -> tuple[int, ...]:
    """Nonzero SNF diagonal of ``m`` (no transforms tracked)."""
    return _snf(m, False, False).diagonal


def kernel_rank(m: IntMatrix) -> int:
    """Rank of the kernel of ``m`` viewed as a map Z^cols -> Z^rows."""
    return m.cols - len(invariant_factors(m))


@dataclass(frozen=True)
class CokernelPresentation:
    """``Z^m / im(M)`` in canonical coordinates.

    ``projection`` sends a vector of ``Z^m`` to canonical coordinates
    (torsion first, then free; torsion entries reduced); ``section`` has
    one column per canonical generator, a preimage in ``Z^m``.
    """

    torsion: tuple[int, ...]
    free_rank: int
    projection: IntMatrix
    section: IntMatrix

    def project(self, vec: Sequence[int]) -> tuple[int, ...]:
        out = self.projection.apply(vec)
        for i, d in enumerate(self.torsion):
            out[i] %= d
        return tuple(out)


def cokernel_presentation(m: IntMatrix) -> CokernelPresentation:
    snf = _snf(m, True, False)
    keep = [i for i, d in enumerate(snf.diagonal) if d != 1]
    torsion = tuple(snf.diagonal[i] for i in keep)
    keep += list(range(snf.rank, m.rows))
    proj_rows = []
    for pos, i in enumerate(keep):
        r = list(snf.U.row(i))
        if pos < len(torsion):
            d = torsion[pos]
            r = [x % d for x in r]
        proj_rows.append(r)
    projection = IntMatrix.from_rows(proj_rows, cols=m.rows)
    section = IntMatrix.from_columns([snf.U_inv.column(i) for i in keep], m.rows)
    return CokernelPresentation(torsion, m.rows - snf.rank, projection, section)


def cokernel(m: IntMatrix):
    """Cokernel ``Z^rows / im(m)`` as ``(FgAbelianGroup, projection)``."""
    from .abelian import FgAbelianGroup

    pres = cokernel_presentation(m)
    return FgAbelianGroup(pres.torsion, pres.free_rank), pres.projection


def solve(m: IntMatrix, b: Sequence[int]) -> Optional[list[int]]:
    """Integer solution of ``m @ x == b`` or ``None`` if there is none."""
    if len(b) != m.rows:
        raise ValueError("right-hand side length must equal row count")
    snf = smith_normal_form(m)
    c = snf.U.apply(b)
    y = [0] * m.cols
    for i, d in enumerate(snf.diagonal):
        if c[i] % d:
            return None
        y[i] = c[i] // d
    if any(c[snf.rank:]):
        return None
    return snf.V.apply(y)


def in_lattice(m: IntMatrix, b: Sequence[int]) -> bool:
    return solve(m, b) is not None

