"""Independent reference computations used to freeze expected values.

None of these touch the Smith normal form code under test.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import gcd, prod


def det(rows):
    """Exact determinant by Laplace expansion (small matrices only)."""
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    total = 0
    for j in range(n):
        if rows[0][j]:
            minor = [r[:j] + r[j + 1:] for r in rows[1:]]
            total += (-1) ** j * rows[0][j] * det(minor)
    return total


def minors_gcd(rows, k):
    """gcd of all k x k minors."""
    m = len(rows)
    n = len(rows[0]) if rows else 0
    g = 0
    for ri in itertools.combinations(range(m), k):
        for ci in itertools.combinations(range(n), k):
            g = gcd(g, det([[rows[i][j] for j in ci] for i in ri]))
    return g


def invariant_factors_by_minors(rows):
    """Nonzero invariant factors d_k = D_k / D_{k-1}."""
    m = len(rows)
    n = len(rows[0]) if rows else 0
    out = []
    prev = 1
    for k in range(1, min(m, n) + 1):
        dk = minors_gcd(rows, k)
        if dk == 0:
            break
        out.append(dk // prev)
        prev = dk
    return out


def rational_rank(rows):
    a = [[Fraction(x) for x in r] for r in rows]
    m = len(a)
    n = len(a[0]) if a else 0
    rank = 0
    for c in range(n):
        piv = next((i for i in range(rank, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for i in range(m):
            if i != rank and a[i][c] != 0:
                f = a[i][c] / a[rank][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
        rank += 1
    return rank


def _prime_factors(n):
    ps, p = [], 2
    while p * p <= n:
        if n % p == 0:
            ps.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        ps.append(n)
    return ps


def _factors_from_counts(order, count_killed):
    """Invariant factors of a finite abelian group from ``count_killed(k)``,
    the number of elements x with k x = 0."""
    primary = []
    for p in _prime_factors(order):
        # number of cyclic p-factors of exponent >= j is log_p(c(p^j)/c(p^(j-1)))
        exps_ge = []
        prev = 1
        j = 1
        while True:
            c = count_killed(p ** j)
            ratio = c // prev
            if ratio == 1:
                break
            t = 0
            while ratio > 1:
                ratio //= p
                t += 1
            exps_ge.append(t)
            prev = c
            j += 1
        # exps_ge[j-1] = #{i : e_i >= j}
        exps = []
        for j, cnt in enumerate(exps_ge, start=1):
            nxt = exps_ge[j] if j < len(exps_ge) else 0
            exps += [j] * (cnt - nxt)
        primary.append((p, sorted(exps, reverse=True)))
    width = max((len(e) for _, e in primary), default=0)
    factors = []
    for i in range(width):
        factors.append(prod(p ** e[i] for p, e in primary if i < len(e)))
    return sorted(f for f in factors if f > 1)


def cokernel_torsion_by_enumeration(rows, max_size=300_000):
    """Torsion invariant factors of Z^m / im(M) by enumerating cosets mod N.

    With N a proper multiple of every invariant factor, (Z/N)^m / (im M mod N)
    is the torsion part plus one Z/N per free rank; the subgroup is found by
    closing the column set under addition. Returns None if too large.
    """
    m = len(rows)
    n = len(rows[0]) if rows else 0
    r = rational_rank(rows)
    dr = minors_gcd(rows, r) if r else 1
    N = 2 * abs(dr)
    if N ** m > max_size:
        return None
    gens = [tuple(rows[i][j] % N for i in range(m)) for j in range(n)]
    sub = {(0,) * m}
    frontier = [(0,) * m]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = tuple((a + b) % N for a, b in zip(x, g))
                if y not in sub:
                    sub.add(y)
                    nxt.append(y)
        frontier = nxt
    size = N ** m // len(sub)

    def killed(k):
        cnt = 0
        for x in itertools.product(range(N), repeat=m):
            if tuple((k * a) % N for a in x) in sub:
                cnt += 1
        return cnt // len(sub)

    factors = _factors_from_counts(size, killed)
    free = m - r
    for _ in range(free):
        factors.remove(N)
    return factors


def all_groups_up_to(order):
    """Canonical torsion chains of every abelian group of order <= ``order``."""
    out = [()]

    def extend(chain, remaining):
        step = chain[-1] if chain else 1
        d = step if chain else 2
        while d <= remaining:
            new = chain + (d,)
            out.append(new)
            extend(new, remaining // d)
            d += step

    extend((), order)
    return sorted(set(out), key=lambda t: (prod(t), t))


def elements(torsion):
    return list(itertools.product(*[range(d) for d in torsion]))


def hom_by_elements(src, tgt, columns):
    """Element-level map x -> sum x_i * column_i reduced in ``tgt``; None if
    it is not additive (i.e. the matrix does not define a homomorphism)."""
    def f(x):
        return tuple(sum(xi * col[r] for xi, col in zip(x, columns)) % d
                     for r, d in enumerate(tgt))

    els = elements(src)
    table = {x: f(x) for x in els}
    for x in els:
        for y in els:
            s = tuple((a + b) % d for a, b, d in zip(x, y, src))
            if table[s] != tuple((a + b) % d for a, b, d in zip(table[x], table[y], tgt)):
                return None
    return table


def count_automorphisms(torsion):
    """Brute force over every assignment of generator images."""
    els = elements(torsion)
    count = 0
    for cols in itertools.product(els, repeat=len(torsion)):
        table = hom_by_elements(torsion, torsion, cols)
        if table is not None and len(set(table.values())) == len(els):
            count += 1
    return count


def permutation_matrix(n, perm):
    """P with P e_i = e_{perm[i]}."""
    rows = [[0] * n for _ in range(n)]
    for i, p in enumerate(perm):
        rows[p][i] = 1
    return rows
