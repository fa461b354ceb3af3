"""Exact sparse linear algebra.

Vectors are dicts ``index -> rational``.  Ranks use fraction-free integer
elimination on connected blocks; kernels use sparse RREF over Fractions.
A dense Gaussian elimination is kept as an independent oracle.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm


def _to_int(vec):
    den = 1
    for c in vec.values():
        if isinstance(c, Fraction) and c.denominator != 1:
            den = lcm(den, c.denominator)
    return {k: int(c * den) for k, c in vec.items() if c != 0}


def _primitive(vec):
    g = 0
    for c in vec.values():
        g = gcd(g, c)
        if g == 1:
            return vec
    if g > 1:
        return {k: c // g for k, c in vec.items()}
    return vec


class _DSU:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        p = self.parent.setdefault(x, x)
        while p != x:
            self.parent[x] = self.parent.setdefault(p, p)
            x, p = p, self.parent[p]
        return p

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def components(vectors):
    """Group nonzero vectors whose supports are linked (block-diagonal split)."""
    dsu = _DSU()
    for v in vectors:
        it = iter(v)
        first = next(it, None)
        if first is None:
            continue
        dsu.find(first)
        for k in it:
            dsu.union(first, k)
    groups = {}
    for v in vectors:
        if v:
            groups.setdefault(dsu.find(next(iter(v))), []).append(v)
    return list(groups.values())


def _eliminate(pivots, v):
    """Reduce integer vector v against pivot rows; returns the remainder."""
    while v:
        p = min(v)
        u = pivots.get(p)
        if u is None:
            return v
        a, b = u[p], v[p]
        g = gcd(a, b)
        a, b = a // g, b // g
        if a < 0:
            a, b = -a, -b
        new = {k: a * c for k, c in v.items()} if a != 1 else dict(v)
        for k, c in u.items():
            x = new.get(k, 0) - b * c
            if x:
                new[k] = x
            else:
                new.pop(k, None)
        v = _primitive(new)
    return v


def _rank_block(vectors):
    pivots = {}
    for v in vectors:
        r = _eliminate(pivots, v)
        if r:
            pivots[min(r)] = r
    return len(pivots)


def rank(vectors):
    """Rank of a list of sparse vectors (exact, fraction-free)."""
    ints = [_to_int(v) for v in vectors]
    return sum(_rank_block(block) for block in components(ints))


def in_span(vectors, target):
    """Is target in the span of vectors?"""
    target = _to_int(target)
    if not target:
        return True
    pivots = {}
    for v in vectors:
        r = _eliminate(pivots, _to_int(v))
        if r:
            pivots[min(r)] = r
    return not _eliminate(pivots, target)


class Echelon:
    """Incremental echelon basis for span membership and rank growth."""

    def __init__(self):
        self.pivots = {}

    def add(self, v):
        r = _eliminate(self.pivots, _to_int(v))
        if r:
            self.pivots[min(r)] = r
            return True
        return False

    def contains(self, v):
        return not _eliminate(self.pivots, _to_int(v))

    def __len__(self):
        return len(self.pivots)


def kernel(columns, ncols=None):
    """Basis of {c : Σ_j c_j columns[j] = 0}.

    Returned vectors are dicts j -> Fraction.  The basis is the standard RREF
    one: each vector has a distinct free index with coefficient 1 and zeros at
    the other free indices, so coordinates in this basis are read off at the
    free indices (see ``free_index``).
    """
    n = len(columns) if ncols is None else ncols
    rows = {}
    for j, col in enumerate(columns):
        for i, c in col.items():
            if c:
                rows.setdefault(i, {})[j] = c
    return kernel_rows(list(rows.values()), n)


def kernel_rows(rows, n):
    """Kernel of the matrix with the given sparse rows over column range(n)."""
    basis = []
    touched = set()
    for block in components(rows):
        cols = set()
        for r in block:
            cols.update(r)
        touched |= cols
        basis.extend(_kernel_block(block, cols))
    for j in range(n):
        if j not in touched:
            basis.append({j: Fraction(1)})
    basis.sort(key=lambda v: free_index(v))
    return basis


def _rref(rows):
    piv = {}  # pivot col -> row (normalized, pivot 1, reduced against others)
    for r in rows:
        r = {k: Fraction(c) for k, c in r.items() if c}
        for p, u in piv.items():
            c = r.get(p)
            if c:
                for k, x in u.items():
                    y = r.get(k, 0) - c * x
                    if y:
                        r[k] = y
                    else:
                        r.pop(k, None)
        if not r:
            continue
        p = min(r)
        inv = 1 / r[p]
        r = {k: x * inv for k, x in r.items()}
        for q, u in piv.items():
            c = u.get(p)
            if c:
                for k, x in r.items():
                    y = u.get(k, 0) - c * x
                    if y:
                        u[k] = y
                    else:
                        u.pop(k, None)
        piv[p] = r
    return piv


def _kernel_block(rows, cols):
    piv = _rref(rows)
    free = sorted(cols - set(piv))
    out = []
    for f in free:
        v = {f: Fraction(1)}
        for p, r in piv.items():
            c = r.get(f)
            if c:
                v[p] = -c
        out.append(v)
    return out


def free_index(v):
    """The free index of an RREF kernel vector (pivot entries sit below it)."""
    return max(v) if v else -1


def dense_rank(matrix):
    """Plain Gaussian elimination over Fractions (slow oracle)."""
    m = [[Fraction(x) for x in row] for row in matrix]
    if not m:
        return 0
    nr, nc = len(m), len(m[0])
    r = 0
    for c in range(nc):
        p = next((i for i in range(r, nr) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        for i in range(nr):
            if i != r and m[i][c] != 0:
                f = m[i][c] / m[r][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
        if r == nr:
            break
    return r


def to_dense(columns, nrows):
    """Columns (sparse) -> dense row-major matrix."""
    m = [[0] * len(columns) for _ in range(nrows)]
    for j, col in enumerate(columns):
        for i, c in col.items():
            m[i][j] = c
    return m
