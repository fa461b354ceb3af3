"""Graded path algebras over S = kI.

Words are composed right to left: the word ``(a, b)`` means ``a`` after ``b``,
so it is nonzero only when ``source(a) == target(b)``.  Formal inverses of
invertible arrows are the tokens ``name^-1``.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, NamedTuple

INV = "^-1"


class QuiverError(ValueError):
    pass


class ContextError(ValueError):
    pass


@dataclass(frozen=True)
class Arrow:
    name: str
    source: object
    target: object
    degree: int = 0
    weight: int = 1
    invertible: bool = False

    @property
    def is_loop(self):
        return self.source == self.target


@dataclass(frozen=True)
class Quiver:
    vertices: tuple
    arrows: tuple
    # (x, x*) pairs recorded by double_quiver or by presets
    dual_pairs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "arrows", tuple(self.arrows))
        object.__setattr__(self, "dual_pairs", tuple(tuple(p) for p in self.dual_pairs))
        if len(set(self.vertices)) != len(self.vertices):
            raise QuiverError("duplicate vertex ids")
        names = [a.name for a in self.arrows]
        dup = {n for n in names if names.count(n) > 1}
        if dup:
            raise QuiverError(f"duplicate arrow names: {sorted(dup)}")
        vs = set(self.vertices)
        for a in self.arrows:
            if not a.name or INV in a.name or " " in a.name:
                raise QuiverError(f"bad arrow name {a.name!r}")
            if a.source not in vs or a.target not in vs:
                raise QuiverError(f"arrow {a.name}: endpoint not a declared vertex")
            if a.invertible and a.degree != 0:
                raise QuiverError(f"arrow {a.name}: invertible arrows must have degree 0")
            if a.weight < 0:
                raise QuiverError(f"arrow {a.name}: negative weight")
        for x, y in self.dual_pairs:
            if x not in names or y not in names:
                raise QuiverError(f"dual pair ({x}, {y}) names unknown arrows")

    def arrow(self, name):
        for a in self.arrows:
            if a.name == name:
                return a
        raise KeyError(name)

    @property
    def names(self):
        return [a.name for a in self.arrows]

    def loops_at(self, v):
        return [a for a in self.arrows if a.source == v and a.target == v]


def double_quiver(q: Quiver, names: dict | None = None) -> Quiver:
    """Add a reversed dual arrow for every arrow (default name ``x*``)."""
    if q.dual_pairs or any(a.name.endswith("*") for a in q.arrows):
        raise QuiverError("quiver is already doubled")
    names = names or {}
    new = []
    pairs = []
    for a in q.arrows:
        if a.degree != 0:
            raise QuiverError(f"cannot double graded arrow {a.name}")
        d = names.get(a.name, a.name + "*")
        new.append(Arrow(d, a.target, a.source, 0, 1, False))
        pairs.append((a.name, d))
    taken = set(q.names)
    for a in new:
        if a.name in taken:
            raise QuiverError(f"name collision: {a.name}")
        taken.add(a.name)
    return Quiver(q.vertices, q.arrows + tuple(new), tuple(pairs))


def loop_name(q: Quiver, prefix, v):
    return prefix if len(q.vertices) == 1 else f"{prefix}{v}"


def adjoin_loops(q: Quiver, prefix: str, degree: int, weight: int) -> Quiver:
    """One new loop per vertex, named ``prefix`` (one vertex) or ``prefix<v>``."""
    new = [Arrow(loop_name(q, prefix, v), v, v, degree, weight) for v in q.vertices]
    taken = set(q.names)
    for a in new:
        if a.name in taken:
            raise QuiverError(f"name collision: {a.name}")
    return Quiver(q.vertices, q.arrows + tuple(new), q.dual_pairs)


def localize(q: Quiver, names: Iterable[str]) -> Quiver:
    names = set(names)
    unknown = names - set(q.names)
    if unknown:
        raise QuiverError(f"unknown arrows {sorted(unknown)}")
    arrows = []
    for a in q.arrows:
        if a.name in names:
            if a.degree != 0:
                raise QuiverError(f"cannot localize {a.name}: degree {a.degree}")
            a = Arrow(a.name, a.source, a.target, a.degree, a.weight, True)
        arrows.append(a)
    return Quiver(q.vertices, arrows, q.dual_pairs)


class Word(NamedTuple):
    tokens: tuple
    source: object
    target: object

    @property
    def is_idempotent(self):
        return not self.tokens


class TokenInfo(NamedTuple):
    source: object
    target: object
    degree: int
    weight: int
    base: str
    inverse: bool
    order: int


def inverse_token(tok):
    return tok[: -len(INV)] if tok.endswith(INV) else tok + INV


class AlgebraContext:
    """Path algebra of a quiver: token table, word arithmetic, generators."""

    def __init__(self, q: Quiver):
        self.quiver = q
        self.tokens = {}
        for i, a in enumerate(q.arrows):
            self.tokens[a.name] = TokenInfo(a.source, a.target, a.degree, a.weight, a.name, False, 2 * i)
            if a.invertible:
                self.tokens[a.name + INV] = TokenInfo(a.target, a.source, 0, -a.weight, a.name, True, 2 * i + 1)
        self._vorder = {v: i for i, v in enumerate(q.vertices)}

    def __eq__(self, other):
        return self is other or (isinstance(other, AlgebraContext) and self.quiver == other.quiver)

    def __hash__(self):
        return hash(self.quiver)

    def __repr__(self):
        return f"AlgebraContext({self.quiver.names})"

    # -- words
    def idem(self, v) -> Word:
        if v not in self._vorder:
            raise ContextError(f"unknown vertex {v!r}")
        return Word((), v, v)

    def word(self, tokens) -> Word:
        """Normalize a raw token sequence (free reduction of inverse pairs)."""
        if isinstance(tokens, str):
            tokens = tokens.split()
        tokens = list(tokens)
        if not tokens:
            raise ContextError("empty token list; use idem(v)")
        for t in tokens:
            if t not in self.tokens:
                raise ContextError(f"unknown token {t!r}")
        for left, right in zip(tokens, tokens[1:]):
            if self.tokens[left].source != self.tokens[right].target:
                return None
        src, tgt = self.tokens[tokens[-1]].source, self.tokens[tokens[0]].target
        stack = []
        for t in tokens:
            if stack and stack[-1] == inverse_token(t):
                stack.pop()
            else:
                stack.append(t)
        return Word(tuple(stack), src, tgt)

    def mul_words(self, u: Word, v: Word):
        """u·v, or None when not composable."""
        if u.source != v.target:
            return None
        a, b = list(u.tokens), v.tokens
        i = 0
        while a and i < len(b) and a[-1] == inverse_token(b[i]):
            a.pop()
            i += 1
        return Word(tuple(a) + b[i:], v.source, u.target)

    def word_degree(self, w: Word):
        return sum(self.tokens[t].degree for t in w.tokens)

    def word_weight(self, w: Word):
        return sum(self.tokens[t].weight for t in w.tokens)

    def word_key(self, w: Word):
        return (len(w.tokens), tuple(self.tokens[t].order for t in w.tokens),
                self._vorder[w.source], self._vorder[w.target])

    def word_str(self, w: Word):
        return " ".join(w.tokens) if w.tokens else f"e_{w.source}"

    def parse_word(self, s: str) -> Word:
        s = s.strip()
        if s.startswith("e_") and s[2:] not in self.tokens:
            key = s[2:]
            for v in self.quiver.vertices:
                if str(v) == key:
                    return self.idem(v)
            raise ContextError(f"unknown vertex in {s!r}")
        w = self.word(s)
        if w is None:
            raise ContextError(f"word {s!r} is not a composable path")
        return w

    # -- elements
    def elem(self, w: Word, c=1) -> "NCElement":
        return NCElement(self, {w: c})

    def e(self, v) -> "NCElement":
        return self.elem(self.idem(v))

    def gen(self, name) -> "NCElement":
        if name not in self.tokens:
            raise ContextError(f"unknown generator {name!r}")
        return self.elem(Word((name,), self.tokens[name].source, self.tokens[name].target))

    def inv(self, name) -> "NCElement":
        return self.gen(name + INV)

    def parse(self, s: str) -> "NCElement":
        """Parse a linear combination such as ``x y - y x`` or ``1/2 x + e_1``.

        Tokens within a word are separated by spaces; a bare coefficient is a
        multiple of the unit.
        """
        parts = re.split(r"(?<!\^)([+-])", s.strip())
        out = self.zero()
        sign = 1
        seen = False
        for p in parts:
            p = p.strip()
            if p in ("+", "-"):
                sign = -sign if p == "-" else sign
                continue
            if not p:
                continue
            toks = p.split()
            coef = Fraction(1)
            if toks and _NUM.fullmatch(toks[0]):
                coef = Fraction(toks.pop(0))
            if not toks:
                term = NCElement(self, {self.idem(v): 1 for v in self.quiver.vertices})
            else:
                term = self.elem(self.parse_word(" ".join(toks)))
            out = out + term * (sign * coef)
            sign = 1
            seen = True
        if not seen:
            raise ContextError(f"cannot parse element {s!r}")
        return out

    @property
    def one(self) -> "NCElement":
        return NCElement(self, {self.idem(v): 1 for v in self.quiver.vertices})

    def zero(self) -> "NCElement":
        return NCElement(self, {})

    def generator_tokens(self, inverses=True):
        return [t for t, info in self.tokens.items() if inverses or not info.inverse]

    def words(self, max_len, min_len=0):
        """All normalized words of length min_len..max_len, deterministic order."""
        out = []
        if min_len == 0:
            out.extend(self.idem(v) for v in self.quiver.vertices)
        layer = [Word((t,), i.source, i.target) for t, i in self.tokens.items()]
        for n in range(1, max_len + 1):
            if n >= min_len:
                out.extend(layer)
            nxt = []
            for w in layer:
                for t, i in self.tokens.items():
                    if i.target == w.source and (not w.tokens or w.tokens[-1] != inverse_token(t)):
                        nxt.append(Word(w.tokens + (t,), i.source, w.target))
            layer = nxt
        return out


_NUM = re.compile(r"\d+(/\d+)?")


@lru_cache(maxsize=None)
def build_path_algebra(q: Quiver) -> AlgebraContext:
    return AlgebraContext(q)


def _check_ctx(a, b):
    if a.ctx is not b.ctx and a.ctx != b.ctx:
        raise ContextError("elements live over different contexts")


def _clean(d):
    return {k: v for k, v in d.items() if v != 0}


class NCElement:
    """Rational linear combination of words."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: AlgebraContext, terms=None):
        self.ctx = ctx
        self.terms = _clean(terms or {})

    # arithmetic
    def __add__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return self
        _check_ctx(self, other)
        d = dict(self.terms)
        for w, c in other.terms.items():
            d[w] = d.get(w, 0) + c
        return NCElement(self.ctx, d)

    __radd__ = __add__

    def __neg__(self):
        return NCElement(self.ctx, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return NCElement(self.ctx, {w: c * other for w, c in self.terms.items()})
        _check_ctx(self, other)
        d = {}
        mul = self.ctx.mul_words
        for u, a in self.terms.items():
            for v, b in other.terms.items():
                w = mul(u, v)
                if w is not None:
                    d[w] = d.get(w, 0) + a * b
        return NCElement(self.ctx, d)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __pow__(self, k):
        out = self
        for _ in range(k - 1):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return not self.terms
            return self == self.ctx.one * other
        if not isinstance(other, NCElement):
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms

    __hash__ = None

    def is_zero(self):
        return not self.terms

    @property
    def degree(self):
        ds = {self.ctx.word_degree(w) for w in self.terms}
        return ds.pop() if len(ds) == 1 else (0 if not ds else None)

    @property
    def weight(self):
        ws = {self.ctx.word_weight(w) for w in self.terms}
        return ws.pop() if len(ws) == 1 else (0 if not ws else None)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: self.ctx.word_key(kv[0]))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for w, c in self.sorted_terms():
            parts.append(f"{c}*{self.ctx.word_str(w)}" if c != 1 else self.ctx.word_str(w))
        return " + ".join(parts)

    def retarget(self, ctx: AlgebraContext) -> "NCElement":
        """Re-express over a context whose quiver contains this one's tokens."""
        for w in self.terms:
            for t in w.tokens:
                if t not in ctx.tokens:
                    raise ContextError(f"token {t!r} missing in target context")
        return NCElement(ctx, self.terms)


def graded_commutator(a: NCElement, b: NCElement) -> NCElement:
    da, db = a.degree, b.degree
    if da is None or db is None:
        raise ValueError("graded commutator needs homogeneous inputs")
    return a * b - (b * a) * (-1) ** ((da * db) % 2)


# ---------------------------------------------------------------- tensors

def permutation_sign(sigma, degrees):
    """Koszul sign exponent for moving factor k to slot sigma[k]."""
    s = 0
    n = len(sigma)
    for k in range(n):
        for l in range(k + 1, n):
            if sigma[k] > sigma[l]:
                s += degrees[k] * degrees[l]
    return s % 2


def cycle(n, *points):
    """Permutation of range(n) (0-based, one-line) from 1-based cycle notation."""
    sigma = list(range(n))
    pts = [p - 1 for p in points]
    for i, p in enumerate(pts):
        sigma[p] = pts[(i + 1) % len(pts)]
    return tuple(sigma)


def compose(sigma, rho):
    """(sigma∘rho)(k) = sigma(rho(k))."""
    return tuple(sigma[rho[k]] for k in range(len(rho)))


class TensorElement:
    """Element of A^{⊗n}, stored on tuples of words."""

    __slots__ = ("ctx", "arity", "terms")

    def __init__(self, ctx, arity, terms=None):
        self.ctx = ctx
        self.arity = arity
        self.terms = _clean(terms or {})

    @classmethod
    def from_elements(cls, *elems):
        ctx = elems[0].ctx
        terms = {}
        for combo in itertools.product(*[e.terms.items() for e in elems]):
            key = tuple(w for w, _ in combo)
            c = 1
            for _, x in combo:
                c *= x
            terms[key] = terms.get(key, 0) + c
        return cls(ctx, len(elems), terms)

    @classmethod
    def zero(cls, ctx, arity):
        return cls(ctx, arity, {})

    def _same(self, other):
        if self.arity != other.arity:
            raise ValueError("arity mismatch")
        _check_ctx(self, other)

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        self._same(other)
        d = dict(self.terms)
        for k, c in other.terms.items():
            d[k] = d.get(k, 0) + c
        return TensorElement(self.ctx, self.arity, d)

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        return TensorElement(self.ctx, self.arity, {k: v * c for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, TensorElement):
            return NotImplemented
        return self.arity == other.arity and self.ctx == other.ctx and self.terms == other.terms

    __hash__ = None

    def is_zero(self):
        return not self.terms

    @property
    def degree(self):
        ds = {sum(self.ctx.word_degree(w) for w in k) for k in self.terms}
        return ds.pop() if len(ds) == 1 else (0 if not ds else None)

    def __repr__(self):
        if not self.terms:
            return "0"
        items = sorted(self.terms.items(), key=lambda kv: [self.ctx.word_key(w) for w in kv[0]])
        return " + ".join(f"{c}*(" + " ⊗ ".join(self.ctx.word_str(w) for w in k) + ")" for k, c in items)

    def _map2(self, f):
        d = {}
        for k, c in self.terms.items():
            for nk, s in f(k):
                d[nk] = d.get(nk, 0) + c * s
        return TensorElement(self.ctx, self.arity, d)

    # outer bimodule on A⊗A: a·(u⊗v)·b = au ⊗ vb
    def lmul(self, a: NCElement):
        mul = self.ctx.mul_words

        def f(k):
            for w, c in a.terms.items():
                u = mul(w, k[0])
                if u is not None:
                    yield (u,) + k[1:], c
        return self._map2(f)

    def rmul(self, b: NCElement):
        mul = self.ctx.mul_words

        def f(k):
            for w, c in b.terms.items():
                v = mul(k[-1], w)
                if v is not None:
                    yield k[:-1] + (v,), c
        return self._map2(f)

    # inner bimodule on A⊗A: a∗(u⊗v)∗b = ± ub ⊗ av
    def inner_lmul(self, a: NCElement):
        mul, deg = self.ctx.mul_words, self.ctx.word_degree

        def f(k):
            u, v = k
            for w, c in a.terms.items():
                av = mul(w, v)
                if av is not None:
                    yield (u, av), c * (-1) ** ((deg(w) * deg(u)) % 2)
        return self._map2(f)

    def inner_rmul(self, b: NCElement):
        mul, deg = self.ctx.mul_words, self.ctx.word_degree

        def f(k):
            u, v = k
            for w, c in b.terms.items():
                ub = mul(u, w)
                if ub is not None:
                    yield (ub, v), c * (-1) ** ((deg(w) * deg(v)) % 2)
        return self._map2(f)

    def multiply(self) -> NCElement:
        """m: A⊗A → A."""
        if self.arity != 2:
            raise ValueError("multiply needs arity 2")
        d = {}
        for (u, v), c in self.terms.items():
            w = self.ctx.mul_words(u, v)
            if w is not None:
                d[w] = d.get(w, 0) + c
        return NCElement(self.ctx, d)

    def multiply_pair(self, i) -> "TensorElement":
        """Multiply factors i and i+1 (so (m⊗1) is i=0, (1⊗m) is i=1)."""
        d = {}
        for k, c in self.terms.items():
            w = self.ctx.mul_words(k[i], k[i + 1])
            if w is not None:
                nk = k[:i] + (w,) + k[i + 2:]
                d[nk] = d.get(nk, 0) + c
        return TensorElement(self.ctx, self.arity - 1, d)

    def extend(self, b: NCElement) -> "TensorElement":
        """self ⊗ b."""
        d = {}
        for k, c in self.terms.items():
            for w, x in b.terms.items():
                d[k + (w,)] = d.get(k + (w,), 0) + c * x
        return TensorElement(self.ctx, self.arity + 1, d)

    def prepend(self, a: NCElement) -> "TensorElement":
        """a ⊗ self."""
        d = {}
        for k, c in self.terms.items():
            for w, x in a.terms.items():
                d[(w,) + k] = d.get((w,) + k, 0) + c * x
        return TensorElement(self.ctx, self.arity + 1, d)


def tensor_permute(sigma, t: TensorElement) -> TensorElement:
    """τ_σ: the factor in slot k moves to slot sigma[k], with Koszul sign."""
    sigma = tuple(sigma)
    if len(sigma) != t.arity or sorted(sigma) != list(range(t.arity)):
        raise ValueError("permutation does not match tensor arity")
    deg = t.ctx.word_degree
    d = {}
    for k, c in t.terms.items():
        new = [None] * t.arity
        for i, w in enumerate(k):
            new[sigma[i]] = w
        s = permutation_sign(sigma, [deg(w) for w in k])
        nk = tuple(new)
        d[nk] = d.get(nk, 0) + (-c if s else c)
    return TensorElement(t.ctx, t.arity, d)


def swap(t: TensorElement) -> TensorElement:
    """(−)° = τ_(12)."""
    return tensor_permute((1, 0), t)


# ---------------------------------------------------------------- derivations

class Derivation:
    """Graded derivation of a path algebra, given on generator tokens.

    Missing generators map to 0.  Inverses follow D(x⁻¹) = −x⁻¹ D(x) x⁻¹.
    """

    def __init__(self, ctx: AlgebraContext, images: dict, degree: int):
        self.ctx = ctx
        self.degree = degree
        self.images = {}
        for g, img in images.items():
            if g not in ctx.tokens or ctx.tokens[g].inverse:
                raise ContextError(f"derivation image for unknown generator {g!r}")
            self.images[g] = img.retarget(ctx) if img.ctx != ctx else img
        self._cache = {}

    def on_token(self, t) -> NCElement:
        info = self.ctx.tokens[t]
        if info.inverse:
            xi = self.ctx.gen(t)
            return -(xi * self.on_token(info.base) * xi)
        return self.images.get(t, self.ctx.zero())

    def on_word(self, w: Word) -> NCElement:
        if w in self._cache:
            return self._cache[w]
        ctx = self.ctx
        out = ctx.zero()
        toks = w.tokens
        prefix_deg = 0
        for i, t in enumerate(toks):
            img = self.on_token(t)
            if not img.is_zero():
                left = ctx.elem(ctx.word(toks[:i])) if i else ctx.e(ctx.tokens[t].target)
                right = ctx.elem(ctx.word(toks[i + 1:])) if i + 1 < len(toks) else ctx.e(ctx.tokens[t].source)
                term = left * img * right
                out = out + (term if (self.degree * prefix_deg) % 2 == 0 else -term)
            prefix_deg += ctx.tokens[t].degree
        self._cache[w] = out
        return out

    def __call__(self, a: NCElement) -> NCElement:
        out = self.ctx.zero()
        for w, c in a.terms.items():
            out = out + self.on_word(w) * c
        return out
