"""Double, triple and single brackets evaluated from generator tables."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .linalg import in_span
from .ncalg import (AlgebraContext, Derivation, NCElement, TensorElement, Word,
                    build_path_algebra, cycle, graded_commutator, inverse_token, swap,
                    tensor_permute)
from .report import Report


class MissingBracketError(ValueError):
    pass


class ChargeError(ValueError):
    pass


def _sgn(e):
    return -1 if e % 2 else 1


class BracketTable:
    """Values of ⟨⟨g,h⟩⟩ on generator pairs.

    ``factors`` lists generator sets of a free product; pairs from different
    factors are 0.  Any other missing pair is an error unless its reverse is
    stored, in which case it is derived by cyclic antisymmetry.
    """

    def __init__(self, ctx: AlgebraContext, entries: dict, factors=None, name=""):
        self.ctx = ctx
        self.name = name
        self.entries = {}
        for (g, h), val in entries.items():
            for x in (g, h):
                if x not in ctx.tokens or ctx.tokens[x].inverse:
                    raise ValueError(f"table entry names unknown generator {x!r}")
            if val.ctx != ctx:
                val = TensorElement(ctx, 2, val.terms)
            if val.arity != 2:
                raise ValueError("table values must lie in A⊗A")
            want = ctx.tokens[g].degree + ctx.tokens[h].degree
            if not val.is_zero() and val.degree != want:
                raise ValueError(f"⟨⟨{g},{h}⟩⟩ is not homogeneous of degree {want}")
            self.entries[(g, h)] = val
        self.factors = tuple(frozenset(f) for f in factors) if factors else ()
        self._cache = {}
        self.verified = None

    def __repr__(self):
        return f"BracketTable({self.name or 'custom'}, {len(self.entries)} entries)"

    @property
    def generators(self):
        gens = set()
        for g, h in self.entries:
            gens.update((g, h))
        for f in self.factors:
            gens |= f
        return [t for t in self.ctx.generator_tokens(inverses=False) if t in gens]

    def _factor(self, g):
        for i, f in enumerate(self.factors):
            if g in f:
                return i
        return None

    def lookup(self, g, h) -> TensorElement:
        if (g, h) in self.entries:
            return self.entries[(g, h)]
        if (h, g) in self.entries:
            s = self.ctx.tokens[g].degree * self.ctx.tokens[h].degree
            return swap(self.entries[(h, g)]) * (-_sgn(s))
        fg, fh = self._factor(g), self._factor(h)
        if fg is not None and fh is not None and fg != fh:
            return TensorElement.zero(self.ctx, 2)
        raise MissingBracketError(f"no bracket value for ({g}, {h})")

    def embed(self, ctx: AlgebraContext) -> "BracketTable":
        entries = {k: TensorElement(ctx, 2, v.terms) for k, v in self.entries.items()}
        return BracketTable(ctx, entries, self.factors, self.name)

    # ---- evaluation on words
    def on_words(self, a: Word, b: Word) -> TensorElement:
        key = (a, b)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        ctx = self.ctx
        toks = ctx.tokens
        if not a.tokens or not b.tokens:
            r = TensorElement.zero(ctx, 2)
        elif len(b.tokens) > 1:
            # outer Leibniz in the second slot: ⟨⟨a, b1 b'⟩⟩ = ⟨⟨a,b1⟩⟩·b' + (−1)^{|a||b1|} b1·⟨⟨a,b'⟩⟩
            t = b.tokens[0]
            b1 = Word((t,), toks[t].source, toks[t].target)
            rest = Word(b.tokens[1:], b.source, toks[t].source)
            s = ctx.word_degree(a) * toks[t].degree
            r = self.on_words(a, b1).rmul(ctx.elem(rest)) \
                + self.on_words(a, rest).lmul(ctx.elem(b1)) * _sgn(s)
        elif toks[b.tokens[0]].inverse:
            # ⟨⟨a, y⁻¹⟩⟩ = −y⁻¹·⟨⟨a,y⟩⟩·y⁻¹
            y = inverse_token(b.tokens[0])
            yw = Word((y,), toks[y].source, toks[y].target)
            yi = ctx.elem(b)
            r = -(self.on_words(a, yw).lmul(yi).rmul(yi))
        elif len(a.tokens) > 1:
            # inner Leibniz in the first slot: ⟨⟨a' a_r, c⟩⟩ = a'∗⟨⟨a_r,c⟩⟩ + (−1)^{|a_r||c|}⟨⟨a',c⟩⟩∗a_r
            t = a.tokens[-1]
            ar = Word((t,), toks[t].source, toks[t].target)
            rest = Word(a.tokens[:-1], toks[t].target, a.target)
            s = toks[t].degree * ctx.word_degree(b)
            r = self.on_words(ar, b).inner_lmul(ctx.elem(rest)) \
                + self.on_words(rest, b).inner_rmul(ctx.elem(ar)) * _sgn(s)
        elif toks[a.tokens[0]].inverse:
            # ⟨⟨x⁻¹, c⟩⟩ = −x⁻¹∗⟨⟨x,c⟩⟩∗x⁻¹
            x = inverse_token(a.tokens[0])
            xw = Word((x,), toks[x].source, toks[x].target)
            xi = ctx.elem(a)
            r = -(self.on_words(xw, b).inner_lmul(xi).inner_rmul(xi))
        else:
            r = self.lookup(a.tokens[0], b.tokens[0])
        self._cache[key] = r
        return r


def _same_ctx(tbl, *elems):
    for e in elems:
        if e.ctx != tbl.ctx:
            raise ValueError("element and table live over different contexts")


def double_bracket(tbl: BracketTable, a: NCElement, b: NCElement) -> TensorElement:
    _same_ctx(tbl, a, b)
    out = TensorElement.zero(tbl.ctx, 2)
    for u, x in a.terms.items():
        for v, y in b.terms.items():
            out = out + tbl.on_words(u, v) * (x * y)
    return out


def single_bracket(tbl, a, b) -> NCElement:
    return double_bracket(tbl, a, b).multiply()


def bracket_L(tbl, a: NCElement, t: TensorElement) -> TensorElement:
    """⟨⟨a, u⊗v⟩⟩_L = ⟨⟨a,u⟩⟩ ⊗ v."""
    ctx = tbl.ctx
    out = TensorElement.zero(ctx, 3)
    for (u, v), c in t.terms.items():
        out = out + double_bracket(tbl, a, ctx.elem(u)).extend(ctx.elem(v)) * c
    return out


C123 = cycle(3, 1, 2, 3)
C132 = cycle(3, 1, 3, 2)


def _deg(x):
    d = x.degree
    if d is None:
        raise ValueError("homogeneous input required")
    return d


def triple_bracket(tbl, a, b, c) -> TensorElement:
    da, db, dc = _deg(a), _deg(b), _deg(c)
    t1 = bracket_L(tbl, a, double_bracket(tbl, b, c))
    t2 = tensor_permute(C123, bracket_L(tbl, b, double_bracket(tbl, c, a))) * _sgn(da * (db + dc))
    t3 = tensor_permute(C132, bracket_L(tbl, c, double_bracket(tbl, a, b))) * _sgn(dc * (da + db))
    return t1 + t2 + t3


def bracket_on_tensor(tbl, a, t: TensorElement) -> TensorElement:
    """{a, u⊗v} = {a,u}⊗v + (−1)^{|a||u|} u⊗{a,v}."""
    ctx = tbl.ctx
    da = _deg(a)
    out = TensorElement.zero(ctx, 2)
    for (u, v), c in t.terms.items():
        U, V = ctx.elem(u), ctx.elem(v)
        out = out + TensorElement.from_elements(single_bracket(tbl, a, U), V) * c
        s = da * ctx.word_degree(u)
        out = out + TensorElement.from_elements(U, single_bracket(tbl, a, V)) * (c * _sgn(s))
    return out


def almost_jacobi_sides(tbl, a, b, c):
    """Both sides of the almost-Jacobi identity (with {a,c} in the third term)."""
    da, db = _deg(a), _deg(b)
    s = _sgn(da * db)
    lhs = bracket_on_tensor(tbl, a, double_bracket(tbl, b, c)) \
        - double_bracket(tbl, single_bracket(tbl, a, b), c) \
        - double_bracket(tbl, b, single_bracket(tbl, a, c)) * s
    rhs = triple_bracket(tbl, a, b, c).multiply_pair(0) \
        - triple_bracket(tbl, b, a, c).multiply_pair(1) * s
    return lhs, rhs


def tensor_differential(d: Derivation, t: TensorElement) -> TensorElement:
    """d(u⊗v) = du⊗v + (−1)^{|u|} u⊗dv."""
    ctx = d.ctx
    out = TensorElement.zero(ctx, t.arity)
    for k, c in t.terms.items():
        sign = 1
        for i, w in enumerate(k):
            dw = d.on_word(w)
            if not dw.is_zero():
                parts = [ctx.elem(x) for x in k]
                parts[i] = dw
                out = out + TensorElement.from_elements(*parts) * (c * sign)
            sign *= _sgn(ctx.word_degree(w))
    return out


# ------------------------------------------------------------- verification

def _sample_words(ctx, max_len, count, rng):
    words = [w for w in ctx.words(max_len, 1)]
    if len(words) <= count:
        return words
    return rng.sample(words, count)


def verify_axioms(tbl: BracketTable, max_word_len=2, differential: Derivation | None = None,
                  samples=12, seed=0, almost_jacobi=True) -> Report:
    """Cyclic antisymmetry, double Jacobi, almost-Jacobi and d-compatibility."""
    ctx = tbl.ctx
    rep = Report(f"bracket axioms ({tbl.name or 'custom'})")
    rng = random.Random(seed)
    gens = [ctx.gen(t) for t in ctx.generator_tokens()]
    words = [ctx.elem(w) for w in _sample_words(ctx, max_word_len, samples, rng)]
    pool = gens + [w for w in words if len(next(iter(w.terms)).tokens) > 1]

    def first_failure(items, test):
        for item in items:
            if not test(*item):
                return item
        return None

    def label(items):
        return " , ".join(repr(x) for x in items)

    pairs = list(itertools.product(gens, gens)) + [(rng.choice(pool), rng.choice(pool)) for _ in range(samples)]
    triples = list(itertools.product(gens, gens, gens)) + \
        [(rng.choice(pool), rng.choice(pool), rng.choice(pool)) for _ in range(samples)]

    def antisym(a, b):
        s = _deg(a) * _deg(b)
        return double_bracket(tbl, a, b) == swap(double_bracket(tbl, b, a)) * (-_sgn(s))

    bad = first_failure(pairs, antisym)
    rep.add("cyclic antisymmetry", bad is None, f"{len(pairs)} pairs", label(bad) if bad else None)

    bad = first_failure(triples, lambda a, b, c: triple_bracket(tbl, a, b, c).is_zero())
    detail = f"{len(triples)} triples"
    if bad:
        detail += f"; value {triple_bracket(tbl, *bad)}"
    rep.add("double Jacobi", bad is None, detail, label(bad) if bad else None)

    if almost_jacobi:
        def aj(a, b, c):
            lhs, rhs = almost_jacobi_sides(tbl, a, b, c)
            return lhs == rhs
        bad = first_failure(triples, aj)
        rep.add("almost-Jacobi identity", bad is None, f"{len(triples)} triples", label(bad) if bad else None)

    if differential is not None:
        d = differential

        def compat(a, b):
            lhs = tensor_differential(d, double_bracket(tbl, a, b))
            rhs = double_bracket(tbl, d(a), b) + double_bracket(tbl, a, d(b)) * _sgn(_deg(a))
            return lhs == rhs
        bad = first_failure(pairs, compat)
        rep.add("d-compatibility", bad is None, f"{len(pairs)} pairs", label(bad) if bad else None)
    tbl.verified = rep.ok if tbl.verified is None else (tbl.verified and rep.ok)
    return rep


# ------------------------------------------------------------ standard tables

def _e(ctx, v):
    return ctx.e(v)


def _cotangent_entries(ctx, q):
    if not q.dual_pairs:
        raise ValueError("cotangent table needs a doubled quiver")
    gens = []
    entries = {}
    for x, xs in q.dual_pairs:
        a = q.arrow(x)
        gens += [x, xs]
        entries[(x, xs)] = TensorElement.from_elements(_e(ctx, a.source), _e(ctx, a.target))
        entries[(xs, x)] = -TensorElement.from_elements(_e(ctx, a.target), _e(ctx, a.source))
    for g in gens:
        for h in gens:
            entries.setdefault((g, h), TensorElement.zero(ctx, 2))
    return gens, entries


def _gauge_entries(ctx, q):
    loops = [a for a in q.arrows if a.degree == 0]
    if any(not a.is_loop for a in loops) or sorted(map(str, (a.source for a in loops))) != sorted(map(str, q.vertices)):
        raise ValueError("gauge table needs exactly one degree-0 loop per vertex")
    entries = {}
    for a in loops:
        for b in loops:
            if a is b:
                t, e = ctx.gen(a.name), _e(ctx, a.source)
                entries[(a.name, b.name)] = TensorElement.from_elements(t, e) - TensorElement.from_elements(e, t)
            else:
                entries[(a.name, b.name)] = TensorElement.zero(ctx, 2)
    return [a.name for a in loops], entries


def _brst_entries(ctx, q):
    entries = {}
    gens = []
    for v in q.vertices:
        th = [a for a in q.loops_at(v) if a.degree == 1]
        et = [a for a in q.loops_at(v) if a.degree == -1]
        if len(th) != 1 or len(et) != 1:
            raise ValueError("brst_pairing needs one degree-1 and one degree-(−1) loop per vertex")
        gens += [th[0].name, et[0].name]
    for g in gens:
        for h in gens:
            a, b = q.arrow(g), q.arrow(h)
            if a.degree == 1 and b.degree == -1 and a.source == b.source:
                entries[(g, h)] = TensorElement.from_elements(_e(ctx, a.source), _e(ctx, a.source))
            elif a.degree == -1 and b.degree == 1 and a.source == b.source:
                entries[(g, h)] = TensorElement.from_elements(_e(ctx, a.source), _e(ctx, a.source))
            else:
                entries[(g, h)] = TensorElement.zero(ctx, 2)
    return gens, entries


_KINDS = {"cotangent": _cotangent_entries, "gauge": _gauge_entries, "brst_pairing": _brst_entries}


def standard_table(kind: str, q) -> BracketTable:
    """kind is a name from cotangent/gauge/brst_pairing, or several joined by '+'
    for their free product."""
    ctx = build_path_algebra(q)
    parts = kind.split("+")
    for p in parts:
        if p not in _KINDS:
            raise ValueError(f"unknown table kind {p!r}")
    tables = []
    for p in parts:
        gens, entries = _KINDS[p](ctx, q)
        tables.append(BracketTable(ctx, entries, [gens], p))
    return tables[0] if len(tables) == 1 else free_product(*tables)


def free_product(*tables) -> BracketTable:
    ctx = tables[0].ctx
    entries, factors = {}, []
    for t in tables:
        if t.ctx != ctx:
            raise ValueError("free product of tables over different contexts")
        fs = t.factors or [set(x for k in t.entries for x in k)]
        for f in fs:
            if any(f & g for g in factors):
                raise ValueError("free product factors overlap")
            factors.append(frozenset(f))
        entries.update(t.entries)
    return BracketTable(ctx, entries, factors, "+".join(t.name for t in tables))


# ------------------------------------------------------------ Hamiltonian data

@dataclass
class HamiltonianData:
    deltas: dict  # vertex -> NCElement

    @property
    def total(self):
        vals = list(self.deltas.values())
        out = vals[0]
        for v in vals[1:]:
            out = out + v
        return out

    def retarget(self, ctx):
        return HamiltonianData({v: d.retarget(ctx) for v, d in self.deltas.items()})

    def validate(self):
        for v, d in self.deltas.items():
            for w in d.terms:
                if w.source != v or w.target != v:
                    raise ValueError(f"δ_{v} has a term off the loops at {v}")
            if d.degree not in (0, None) or (d.terms and d.degree is None):
                raise ValueError(f"δ_{v} must have degree 0")


def cotangent_moment(q) -> HamiltonianData:
    """δ_i = e_i (Σ_x [x, x*]) e_i."""
    ctx = build_path_algebra(q)
    total = ctx.zero()
    for x, xs in q.dual_pairs:
        total = total + graded_commutator(ctx.gen(x), ctx.gen(xs))
    return HamiltonianData({v: ctx.e(v) * total * ctx.e(v) for v in q.vertices})


def check_hamiltonian(tbl: BracketTable, ham: HamiltonianData) -> Report:
    ctx = tbl.ctx
    rep = Report("Hamiltonian identity")
    ham = ham.retarget(ctx) if any(d.ctx != ctx for d in ham.deltas.values()) else ham

    def expected(v, g):
        e = ctx.e(v)
        return TensorElement.from_elements(g * e, e) - TensorElement.from_elements(e, e * g)

    for v, delta in ham.deltas.items():
        witness = None
        for t in ctx.generator_tokens():
            g = ctx.gen(t)
            if double_bracket(tbl, delta, g) != expected(v, g):
                witness = t
                break
        rep.add(f"generators, vertex {v}", witness is None, "", {"g": witness} if witness else None)
        witness = None
        for w in ctx.words(2, 2):
            g = ctx.elem(w)
            if double_bracket(tbl, delta, g) != expected(v, g):
                witness = ctx.word_str(w)
                break
        rep.add(f"length-2 words, vertex {v}", witness is None, "", {"g": witness} if witness else None)
    return rep


# ------------------------------------------------------------ commutators

def commutator_membership(a: NCElement, w=None) -> bool:
    """Is a in the span of graded commutators?

    Commutators [u,v] only relate a word to its rotations (and, with inverses,
    to its cyclic reductions), so the linear system is solved on the closure of
    supp(a) under those moves.  Splits never lengthen a word, so the closure
    is finite.
    """
    ctx = a.ctx
    if a.is_zero():
        return True
    if a.degree is None or a.weight is None:
        raise ValueError("commutator membership needs a homogeneous element")
    if w is None:
        raise ValueError("commutator membership needs a weight bound")
    if a.weight > w:
        raise ValueError(f"element weight {a.weight} exceeds the bound {w}")
    gens, todo = [], list(a.terms)
    seen = set(todo)
    while todo:
        word = todo.pop()
        toks = word.tokens
        splits = [(ctx.elem(ctx.idem(word.target)), ctx.elem(word))]
        for i in range(1, len(toks)):
            u = ctx.elem(ctx.word(toks[:i]))
            v = ctx.elem(ctx.word(toks[i:]))
            splits.append((u, v))
        for u, v in splits:
            c = graded_commutator(u, v)
            gens.append(c)
            for x in c.terms:
                if x not in seen:
                    seen.add(x)
                    todo.append(x)
    order = sorted(seen, key=ctx.word_key)
    index = {x: i for i, x in enumerate(order)}
    vecs = [{index[x]: c for x, c in g.terms.items()} for g in gens]
    return in_span(vecs, {index[x]: c for x, c in a.terms.items()})


@dataclass
class Charge:
    gamma: NCElement

    def __post_init__(self):
        if not self.gamma.is_zero() and self.gamma.degree != -1:
            raise ChargeError("a charge must have homological degree −1")


def charge_differential(tbl: BracketTable, gamma) -> Derivation:
    """d(g) = {γ, g} on generators; checks {γ,γ} ∈ [A,A] and d² = 0."""
    if isinstance(gamma, Charge):
        gamma = gamma.gamma
    Charge(gamma)
    ctx = tbl.ctx
    if not gamma.is_zero():
        gg = single_bracket(tbl, gamma, gamma)
        if not gg.is_zero() and not commutator_membership(gg, gg.weight):
            raise ChargeError("{γ,γ} is not in the commutator subspace")
    images = {t: single_bracket(tbl, gamma, ctx.gen(t)) for t in ctx.generator_tokens(inverses=False)}
    d = Derivation(ctx, images, -1)
    for t in ctx.generator_tokens():
        if not d(d(ctx.gen(t))).is_zero():
            raise ChargeError(f"d² ≠ 0 on {t}")
    return d
