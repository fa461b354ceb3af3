"""Graded-commutative polynomials with exact coefficients.

A monomial is a sorted tuple of ``(variable index, exponent)`` pairs.  Odd
variables appear with exponent 1; even variables may carry negative exponents
(Laurent variables at n = 1).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class Var:
    name: str
    degree: int
    weight: int


class GradedRing:
    def __init__(self, variables):
        self.vars = list(variables)
        self.index = {v.name: i for i, v in enumerate(self.vars)}
        if len(self.index) != len(self.vars):
            raise ValueError("duplicate variable names")
        self.odd = [v.degree % 2 == 1 for v in self.vars]
        self._mm = {}

    def __len__(self):
        return len(self.vars)

    def __getstate__(self):
        d = dict(self.__dict__)
        d["_mm"] = {}
        return d

    def var(self, name) -> "Poly":
        i = self.index[name] if isinstance(name, str) else name
        return Poly(self, {((i, 1),): 1})

    def const(self, c) -> "Poly":
        return Poly(self, {(): c} if c else {})

    def zero(self):
        return Poly(self, {})

    def mono_degree(self, m):
        return sum(self.vars[i].degree * e for i, e in m)

    def mono_weight(self, m):
        return sum(self.vars[i].weight * e for i, e in m)

    def mono_mul(self, m1, m2):
        """(sign, monomial) of m1·m2, or None if it vanishes."""
        key = (m1, m2)
        hit = self._mm.get(key)
        if hit is not None or key in self._mm:
            return hit
        odd = self.odd
        sign = 1
        # each odd variable of m2 passes the odd variables of m1 with larger index
        o1 = [i for i, _ in m1 if odd[i]]
        for j, _ in m2:
            if odd[j]:
                if j in o1:
                    self._mm[key] = None
                    return None
                if sum(1 for i in o1 if i > j) % 2:
                    sign = -sign
        d = dict(m1)
        for i, e in m2:
            x = d.get(i, 0) + e
            if x:
                d[i] = x
            else:
                del d[i]
        res = (sign, tuple(sorted(d.items())))
        if len(self._mm) < 2_000_000:
            self._mm[key] = res
        return res

    def mono_str(self, m):
        if not m:
            return "1"
        return "*".join(self.vars[i].name + (f"^{e}" if e != 1 else "") for i, e in m)


class Poly:
    __slots__ = ("ring", "terms")

    def __init__(self, ring: GradedRing, terms=None):
        self.ring = ring
        self.terms = {m: c for m, c in (terms or {}).items() if c != 0}

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        d = dict(self.terms)
        for m, c in other.terms.items():
            x = d.get(m, 0) + c
            if x:
                d[m] = x
            else:
                d.pop(m, None)
        return Poly(self.ring, d)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Poly(self.ring, {m: c * other for m, c in self.terms.items()})
        mm = self.ring.mono_mul
        d = {}
        for m1, a in self.terms.items():
            for m2, b in other.terms.items():
                r = mm(m1, m2)
                if r is None:
                    continue
                s, m = r
                x = d.get(m, 0) + s * a * b
                if x:
                    d[m] = x
                else:
                    d.pop(m, None)
        return Poly(self.ring, d)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None

    def is_zero(self):
        return not self.terms

    @property
    def degree(self):
        ds = {self.ring.mono_degree(m) for m in self.terms}
        return ds.pop() if len(ds) == 1 else (0 if not ds else None)

    @property
    def weight(self):
        ws = {self.ring.mono_weight(m) for m in self.terms}
        return ws.pop() if len(ws) == 1 else (0 if not ws else None)

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{self.ring.mono_str(m)}" for m, c in sorted(self.terms.items()))

    def substitute(self, images: dict, target: GradedRing) -> "Poly":
        """Ring map sending variable i to images[i] (a Poly over target, or 0)."""
        out = Poly(target, {})
        for m, c in self.terms.items():
            p = target.const(c)
            for i, e in m:
                img = images.get(i)
                if img is None or img.is_zero():
                    p = None
                    break
                if e < 0:
                    raise ValueError("cannot substitute into a Laurent monomial")
                for _ in range(e):
                    p = p * img
            if p is not None:
                out = out + p
        return out


def apply_derivation(ring: GradedRing, images: dict, ddeg: int, mono) -> dict:
    """D(mono) for the graded derivation with D(v_i) = images[i] (degree ddeg).

    Returns a term dict.  D(v^e) = e v^{e−1} D(v) for even v.
    """
    out = {}
    mm = ring.mono_mul
    prefix_deg = 0
    for pos, (i, e) in enumerate(mono):
        img = images.get(i)
        vdeg = ring.vars[i].degree
        if img is not None and img.terms:
            left = mono[:pos]
            right = mono[pos + 1:]
            if e != 1:
                right = ((i, e - 1),) + right if e - 1 else right
                # keep sorted order: (i, e−1) precedes later indices
            sign = -1 if (ddeg * prefix_deg) % 2 else 1
            coef = sign * e
            for m, c in img.terms.items():
                r1 = mm(left, m)
                if r1 is None:
                    continue
                r2 = mm(r1[1], right)
                if r2 is None:
                    continue
                key = r2[1]
                x = out.get(key, 0) + coef * r1[0] * r2[0] * c
                if x:
                    out[key] = x
                else:
                    out.pop(key, None)
        prefix_deg += vdeg * e
    return out


def derive(ring, images, ddeg, p: Poly) -> Poly:
    out = {}
    for m, c in p.terms.items():
        for k, v in apply_derivation(ring, images, ddeg, m).items():
            x = out.get(k, 0) + c * v
            if x:
                out[k] = x
            else:
                out.pop(k, None)
    return Poly(ring, out)
