"""Representation functor: matrix-entry coordinates of path algebra presentations."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .dbracket import BracketTable, double_bracket, single_bracket, verify_axioms
from .ncalg import NCElement, Word
from .poly import GradedRing, Poly, Var, derive
from .report import Report


class RepError(ValueError):
    pass


class DimensionVector:
    def __init__(self, quiver, dims):
        if isinstance(dims, int):
            dims = [dims]
        if isinstance(dims, dict):
            dims = [dims[v] for v in quiver.vertices]
        dims = list(dims)
        if len(dims) != len(quiver.vertices):
            raise RepError(f"dimension vector has {len(dims)} entries for {len(quiver.vertices)} vertices")
        if any(not isinstance(n, int) or n <= 0 for n in dims):
            raise RepError("dimension vector entries must be positive integers")
        self.vertices = tuple(quiver.vertices)
        self.dims = dict(zip(self.vertices, dims))
        self.offsets = {}
        off = 0
        for v in self.vertices:
            self.offsets[v] = off
            off += self.dims[v]
        self.total = off

    def block(self, v):
        return range(self.offsets[v], self.offsets[v] + self.dims[v])

    def as_list(self):
        return [self.dims[v] for v in self.vertices]

    def __repr__(self):
        return f"DimensionVector({self.as_list()})"


class PolyMatrix:
    """n×n matrix of polynomials, stored sparsely."""

    def __init__(self, ring, n, entries=None):
        self.ring = ring
        self.n = n
        self.entries = {k: p for k, p in (entries or {}).items() if not p.is_zero()}

    def __getitem__(self, rs):
        return self.entries.get(rs) or self.ring.zero()

    def __add__(self, other):
        d = dict(self.entries)
        for k, p in other.entries.items():
            d[k] = d[k] + p if k in d else p
        return PolyMatrix(self.ring, self.n, d)

    def scale(self, c):
        return PolyMatrix(self.ring, self.n, {k: p * c for k, p in self.entries.items()})

    def __mul__(self, other):
        rows = {}
        for (r, u), p in self.entries.items():
            rows.setdefault(u, []).append((r, p))
        d = {}
        for (u, s), q in other.entries.items():
            for r, p in rows.get(u, ()):
                t = p * q
                d[(r, s)] = d[(r, s)] + t if (r, s) in d else t
        return PolyMatrix(self.ring, self.n, d)

    def __eq__(self, other):
        return self.entries == other.entries

    __hash__ = None

    def trace(self):
        out = self.ring.zero()
        for r in range(self.n):
            out = out + self[(r, r)]
        return out

    def __repr__(self):
        return "PolyMatrix(" + ", ".join(f"{k}: {p}" for k, p in sorted(self.entries.items())) + ")"


def _entry_name(tok, r, s, n):
    return f"{tok}_{r + 1}{s + 1}" if n < 10 else f"{tok}_{r + 1},{s + 1}"


class CommutativeDGA:
    """Rep_n of a presentation: variables a_rs, entrywise differential."""

    def __init__(self, A, nv: DimensionVector):
        self.source = A
        self.ctx = A.ctx
        self.nv = nv
        n = nv.total
        q = A.quiver
        laurent = [a.name for a in q.arrows if a.invertible]
        if laurent and n != 1:
            raise RepError(f"invertible generators {laurent} are only supported at total dimension 1")
        variables, self.var_of, self.var_token = [], {}, []
        for a in q.arrows:
            for r in nv.block(a.target):
                for s in nv.block(a.source):
                    self.var_of[(a.name, r, s)] = len(variables)
                    self.var_token.append((a.name, r, s))
                    variables.append(Var(_entry_name(a.name, r, s, n), a.degree, a.weight))
        self.ring = GradedRing(variables)
        self.n = n
        self._wcache = {}
        self.d_images = {}
        for i, (tok, r, s) in enumerate(self.var_token):
            img = A.d.on_token(tok)
            if not img.is_zero():
                p = self.rep(img)[(r, s)]
                if not p.is_zero():
                    self.d_images[i] = p
        self.poisson = None
        self.table = None

    def __repr__(self):
        return f"CommutativeDGA({self.source.label}, n={self.nv.as_list()}, {len(self.ring)} vars)"

    # -- representation of words/elements
    def token_matrix(self, tok) -> PolyMatrix:
        info = self.ctx.tokens[tok]
        ring = self.ring
        if info.inverse:
            i = self.var_of[(info.base, 0, 0)]
            return PolyMatrix(ring, self.n, {(0, 0): Poly(ring, {((i, -1),): 1})})
        d = {}
        for r in self.nv.block(info.target):
            for s in self.nv.block(info.source):
                d[(r, s)] = ring.var(self.var_of[(tok, r, s)])
        return PolyMatrix(ring, self.n, d)

    def word_matrix(self, w: Word) -> PolyMatrix:
        hit = self._wcache.get(w)
        if hit is not None:
            return hit
        if not w.tokens:
            m = PolyMatrix(self.ring, self.n, {(r, r): self.ring.const(1) for r in self.nv.block(w.source)})
        elif len(w.tokens) == 1:
            m = self.token_matrix(w.tokens[0])
        else:
            t = w.tokens[0]
            rest = Word(w.tokens[1:], w.source, self.ctx.tokens[t].source)
            m = self.token_matrix(t) * self.word_matrix(rest)
        self._wcache[w] = m
        return m

    def rep(self, a: NCElement) -> PolyMatrix:
        if a.ctx != self.ctx:
            raise RepError("element lives over a different context")
        out = PolyMatrix(self.ring, self.n)
        for w, c in a.terms.items():
            out = out + self.word_matrix(w).scale(c)
        return out

    def trace(self, a: NCElement) -> Poly:
        return self.rep(a).trace()

    # -- structure
    def var(self, tok, r, s) -> Poly:
        """Entry (r, s) of a generator, 1-based indices."""
        return self.ring.var(self.var_of[(tok, r - 1, s - 1)])

    def d(self, p: Poly) -> Poly:
        return derive(self.ring, self.d_images, -1, p)

    def bracket(self, f: Poly, g: Poly) -> Poly:
        if self.poisson is None:
            raise RepError("no Poisson structure attached; call induced_poisson first")
        return poisson_bracket(self.ring, self.poisson, f, g)

    @property
    def weight_homogeneous(self):
        ring = self.ring
        return all(p.weight == ring.vars[i].weight for i, p in self.d_images.items())

    def as_dict(self):
        ring = self.ring
        return {
            "variables": [{"name": v.name, "degree": v.degree, "weight": v.weight} for v in ring.vars],
            "differential": {ring.vars[i].name: [[ring.mono_str(m), str(c)] for m, c in sorted(p.terms.items())]
                             for i, p in sorted(self.d_images.items())},
        }


def rep_algebra(A, nv) -> CommutativeDGA:
    if not isinstance(nv, DimensionVector):
        nv = DimensionVector(A.quiver, nv)
    return CommutativeDGA(A, nv)


def rep_element(a: NCElement, cd: CommutativeDGA) -> PolyMatrix:
    return cd.rep(a)


def trace(a: NCElement, cd: CommutativeDGA) -> Poly:
    return cd.trace(a)


# ------------------------------------------------------------ Poisson bracket

def _odd_count(ring, mono, lo, hi):
    return sum(1 for i, _ in mono[lo:hi] if ring.odd[i])


def _drop_one(mono, pos):
    i, e = mono[pos]
    if e == 1:
        return mono[:pos] + mono[pos + 1:]
    return mono[:pos] + ((i, e - 1),) + mono[pos + 1:]


def poisson_bracket(ring: GradedRing, table: dict, f: Poly, g: Poly) -> Poly:
    """Graded biderivation extension of a generator table {v_i, v_j}.

    For each variable v in a monomial of f and u in a monomial of g, move v to
    the right end of f and u to the left end of g (Koszul signs), then
    contribute f'·{v,u}·g'.
    """
    out = ring.zero()
    for m1, a in f.terms.items():
        for m2, b in g.terms.items():
            for p1, (i, e1) in enumerate(m1):
                s1 = -1 if ring.odd[i] and _odd_count(ring, m1, p1 + 1, len(m1)) % 2 else 1
                f1 = None
                for p2, (j, e2) in enumerate(m2):
                    val = table.get((i, j))
                    if val is None:
                        continue
                    if f1 is None:
                        f1 = Poly(ring, {_drop_one(m1, p1): 1})
                    s2 = -1 if ring.odd[j] and _odd_count(ring, m2, 0, p2) % 2 else 1
                    g1 = Poly(ring, {_drop_one(m2, p2): 1})
                    out = out + (f1 * val * g1) * (a * b * e1 * e2 * s1 * s2)
    return out


def induced_poisson(tbl: BracketTable, cd: CommutativeDGA) -> dict:
    """{a_rs, b_uv} = ⟨⟨a,b⟩⟩'_us ⟨⟨a,b⟩⟩''_rv on generator entries.

    Attaches the table to ``cd`` and returns it.
    """
    if tbl.ctx != cd.ctx:
        raise RepError("bracket table and representation use different contexts")
    if tbl.verified is None:
        verify_axioms(tbl, max_word_len=1, samples=0, almost_jacobi=False)
    if not tbl.verified:
        raise RepError("bracket table failed verification; refusing to induce a Poisson bracket")
    ctx = cd.ctx
    toks = ctx.generator_tokens(inverses=False)
    table = {}
    for a in toks:
        for b in toks:
            T = double_bracket(tbl, ctx.gen(a), ctx.gen(b))
            if T.is_zero():
                continue
            mats = [(cd.word_matrix(u), cd.word_matrix(v), c) for (u, v), c in T.terms.items()]
            ia = [(k, v) for k, v in cd.var_of.items() if k[0] == a]
            ib = [(k, v) for k, v in cd.var_of.items() if k[0] == b]
            for (_, r, s), i in ia:
                for (_, u_, v_), j in ib:
                    val = cd.ring.zero()
                    for U, V, c in mats:
                        x, y = U[(u_, s)], V[(r, v_)]
                        if not x.is_zero() and not y.is_zero():
                            val = val + (x * y) * c
                    if not val.is_zero():
                        table[(i, j)] = val
    cd.poisson = table
    cd.table = tbl
    return table


# ------------------------------------------------------------ gl action

def gl_derivations(cd: CommutativeDGA, check=True):
    """One even derivation per elementary matrix E_pq inside a vertex block.

    D(X^a) = E_pq X^a − X^a E_pq blockwise, i.e.
    D(x_rs) = δ_rp x_qs − δ_sq x_rp.
    """
    ring = cd.ring
    out = []
    for v in cd.nv.vertices:
        for p in cd.nv.block(v):
            for q in cd.nv.block(v):
                images = {}
                for i, (tok, r, s) in enumerate(cd.var_token):
                    img = ring.zero()
                    if r == p and (tok, q, s) in cd.var_of:
                        img = img + ring.var(cd.var_of[(tok, q, s)])
                    if s == q and (tok, r, p) in cd.var_of:
                        img = img - ring.var(cd.var_of[(tok, r, p)])
                    if not img.is_zero():
                        images[i] = img
                out.append(((p, q), images))
    if check:
        for pq, images in out:
            for i in range(len(ring)):
                v = ring.var(i)
                lhs = derive(ring, images, 0, cd.d(v))
                rhs = cd.d(derive(ring, images, 0, v))
                if lhs != rhs:
                    raise RepError(f"gl derivation E{pq} does not commute with d on {ring.vars[i].name}")
    return out


# ------------------------------------------------------------ verification

def _sgn(e):
    return -1 if e % 2 else 1


def verify_rep_laws(A, tbl: BracketTable, gamma, nv, n_pairs=50, seed=0, max_triples=5000) -> Report:
    cd = rep_algebra(A, nv)
    induced_poisson(tbl, cd)
    ctx = A.ctx
    ring = cd.ring
    rng = random.Random(seed)
    rep = Report(f"representation laws, n={cd.nv.as_list()}")

    words = ctx.words(2)
    bad = None
    for _ in range(n_pairs):
        u, v = rng.choice(words), rng.choice(words)
        lhs = cd.rep(ctx.elem(u) * ctx.elem(v))
        if lhs != cd.word_matrix(u) * cd.word_matrix(v):
            bad = f"{ctx.word_str(u)} · {ctx.word_str(v)}"
            break
    rep.add("functoriality (ab)_rs = Σ a_ru b_us", bad is None, f"{n_pairs} word pairs", bad)

    long_words = ctx.words(3, 1)
    bad = None
    for _ in range(n_pairs):
        a = ctx.elem(rng.choice(long_words), rng.randint(1, 3))
        b = ctx.elem(rng.choice(long_words), rng.randint(-3, -1))
        lhs = cd.trace(single_bracket(tbl, a, b))
        rhs = cd.bracket(cd.trace(a), cd.trace(b))
        if lhs != rhs:
            bad = f"a={a}, b={b}"
            break
    rep.add("tr{a,b} = {tr a, tr b}", bad is None, f"{n_pairs} pairs", bad)

    if gamma is not None:
        tg = cd.trace(gamma)
        bad = next((ring.vars[i].name for i in range(len(ring))
                    if cd.d(ring.var(i)) != cd.bracket(tg, ring.var(i))), None)
        rep.add("d = {tr γ, −} on generator entries", bad is None, f"{len(ring)} entries", bad)

    idx = list(range(len(ring)))
    triples = list(itertools.product(idx, repeat=3))
    if len(triples) > max_triples:
        triples = rng.sample(triples, max_triples)
    deg = [v.degree for v in ring.vars]
    bad_anti, bad_jac = None, None
    for i, j in itertools.product(idx, repeat=2):
        f, g = ring.var(i), ring.var(j)
        if cd.bracket(f, g) != cd.bracket(g, f) * (-_sgn(deg[i] * deg[j])):
            bad_anti = (ring.vars[i].name, ring.vars[j].name)
            break
    for i, j, k in triples:
        f, g, h = ring.var(i), ring.var(j), ring.var(k)
        lhs = cd.bracket(f, cd.bracket(g, h))
        rhs = cd.bracket(cd.bracket(f, g), h) + cd.bracket(g, cd.bracket(f, h)) * _sgn(deg[i] * deg[j])
        if lhs != rhs:
            bad_jac = (ring.vars[i].name, ring.vars[j].name, ring.vars[k].name)
            break
    rep.add("induced bracket antisymmetry", bad_anti is None, f"{len(idx) ** 2} pairs", bad_anti)
    rep.add("induced bracket Jacobi", bad_jac is None, f"{len(triples)} triples", bad_jac)
    return rep


def gauge_bracket_report(A, nv) -> Report:
    """On Sym(gl_n): Casimirs commute and {t_rs, t_uv} = t_us δ_rv − δ_us t_rv."""
    cd = rep_algebra(A, nv)
    induced_poisson(A.table, cd)
    ring = cd.ring
    rep = Report(f"gauge bracket, n={cd.nv.as_list()}")
    loops = [a for a in A.quiver.arrows if a.degree == 0 and a.is_loop]
    for a in loops:
        t = A.ctx.gen(a.name)
        val = cd.bracket(cd.trace(t * t), cd.trace(t * t * t))
        rep.add(f"{{tr {a.name}², tr {a.name}³}} = 0", val.is_zero(), "", None if val.is_zero() else str(val))
    bad = None
    for (t1, r, s), i in cd.var_of.items():
        for (t2, u, v), j in cd.var_of.items():
            want = ring.zero()
            if t1 == t2:
                if r == v:
                    want = want + ring.var(cd.var_of[(t1, u, s)])
                if u == s:
                    want = want - ring.var(cd.var_of[(t1, r, v)])
            if cd.bracket(ring.var(i), ring.var(j)) != want:
                bad = (ring.vars[i].name, ring.vars[j].name)
                break
        if bad:
            break
    rep.add("{t_rs, t_uv} = t_us δ_rv − δ_us t_rv", bad is None, f"{len(ring) ** 2} pairs", bad)
    return rep
