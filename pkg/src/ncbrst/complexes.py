"""Shafarevich, Chevalley–Eilenberg and BRST dg algebras on path algebras."""
from __future__ import annotations

import random

from .dbracket import (BracketTable, ChargeError, HamiltonianData, charge_differential,
                       check_hamiltonian, free_product, standard_table)
from .ncalg import (Arrow, Derivation, NCElement, Quiver, adjoin_loops, build_path_algebra,
                    graded_commutator, loop_name)
from .report import Report


class PresentationError(ValueError):
    pass


THETA, ETA = "theta", "eta"


class DGAPresentation:
    """Path algebra with a differential given on generators.

    ``gauge`` holds the gauge elements (images of the loops t_i), ``parent`` the
    presentation this one was built from, ``parts`` named pieces of d.
    """

    def __init__(self, quiver: Quiver, differential=None, table: BracketTable | None = None,
                 charge: NCElement | None = None, gauge: HamiltonianData | None = None,
                 label="", parent=None, parts=None, validate=True):
        self.quiver = quiver
        self.ctx = build_path_algebra(quiver)
        if isinstance(differential, Derivation):
            differential = differential.images
        self.d = Derivation(self.ctx, dict(differential or {}), -1)
        self.table = table
        self.charge = charge
        self.gauge = gauge
        self.label = label
        self.parent = parent
        self.parts = parts or {}
        if validate:
            self.validate()

    def __repr__(self):
        return f"DGAPresentation({self.label or self.quiver.names})"

    @property
    def generators(self):
        return self.ctx.generator_tokens(inverses=False)

    def validate(self):
        ctx = self.ctx
        for t in self.generators:
            img = self.d.on_token(t)
            if img.is_zero():
                continue
            if img.degree != ctx.tokens[t].degree - 1:
                raise PresentationError(f"d({t}) does not have degree {ctx.tokens[t].degree - 1}")
            if not self.d(img).is_zero():
                raise PresentationError(f"d² ≠ 0 on {t}")

    @property
    def weight_homogeneous(self):
        for t in self.generators:
            img = self.d.on_token(t)
            if not img.is_zero() and img.weight != self.ctx.tokens[t].weight:
                return False
        return True

    def check_words(self, max_len=4, samples=200, seed=0) -> Report:
        """d² = 0 on words and weight preservation on generators."""
        rng = random.Random(seed)
        words = self.ctx.words(max_len, 1)
        if len(words) > samples:
            words = rng.sample(words, samples)
        bad = next((w for w in words if not self.d(self.d(self.ctx.elem(w))).is_zero()), None)
        rep = Report(f"differential checks ({self.label})")
        rep.add("d² = 0 on words", bad is None, f"{len(words)} words of length ≤ {max_len}",
                self.ctx.word_str(bad) if bad else None)
        rep.add("weight-homogeneous", self.weight_homogeneous)
        return rep

    def as_dict(self):
        ctx = self.ctx
        return {
            "label": self.label,
            "generators": [
                {"name": a.name, "source": a.source, "target": a.target, "degree": a.degree,
                 "weight": a.weight, "invertible": a.invertible} for a in self.quiver.arrows],
            "differential": {t: _terms(self.d.on_token(t)) for t in self.generators
                             if not self.d.on_token(t).is_zero()},
            "charge": _terms(self.charge) if self.charge is not None else None,
        }


def _terms(x: NCElement):
    return [[x.ctx.word_str(w), str(c)] for w, c in x.sorted_terms()]


def presentation(q: Quiver, table=None, gauge=None, label="") -> DGAPresentation:
    """Presentation with zero differential."""
    return DGAPresentation(q, {}, table=table, gauge=gauge, label=label)


def _common_weight(ham: HamiltonianData, default=2):
    ws = {d.weight for d in ham.deltas.values() if not d.is_zero()}
    if len(ws) == 1 and None not in ws:
        return ws.pop()
    return default


def shafarevich(A: DGAPresentation, ham: HamiltonianData, theta_weight=None) -> DGAPresentation:
    """Adjoin ϑ_i of degree 1 with dϑ_i = δ_i.

    ϑ takes the common weight of the gauge elements (2 for moment maps of
    doubled quivers) so that d stays weight-homogeneous.
    """
    if any(a.degree != 0 for a in A.quiver.arrows):
        raise PresentationError("Shafarevich construction needs an ungraded algebra")
    if A.table is None:
        raise PresentationError("a bracket table is needed to check the Hamiltonian data")
    ham.validate()
    chk = check_hamiltonian(A.table, ham)
    if not chk.ok:
        raise PresentationError(f"Hamiltonian check failed: {chk.failures()[0].witness}")
    w = _common_weight(ham) if theta_weight is None else theta_weight
    q = adjoin_loops(A.quiver, THETA, 1, w)
    ctx = build_path_algebra(q)
    images = {t: img.retarget(ctx) for t, img in A.d.images.items()}
    for v, delta in ham.deltas.items():
        images[loop_name(A.quiver, THETA, v)] = delta.retarget(ctx)
    return DGAPresentation(q, images, gauge=ham.retarget(ctx), label=f"Sh({A.label})", parent=A)


def chevalley_eilenberg(A: DGAPresentation) -> DGAPresentation:
    """Adjoin η_i of degree −1: d(a) = d_old(a) − [Ση_i, a], d(η_i) = −η_i²."""
    if A.gauge is None:
        raise PresentationError("CE construction needs gauge data (a T_S(L)-structure)")
    q = adjoin_loops(A.quiver, ETA, -1, 0)
    ctx = build_path_algebra(q)
    etas = {v: ctx.gen(loop_name(A.quiver, ETA, v)) for v in A.quiver.vertices}
    eta = sum((e for e in etas.values()), ctx.zero())
    old = {t: img.retarget(ctx) for t, img in A.d.images.items()}
    ce = {}
    for t in A.generators:
        ce[t] = -graded_commutator(eta, ctx.gen(t))
    for v, e in etas.items():
        ce[loop_name(A.quiver, ETA, v)] = -(e * e)
    total = dict(ce)
    for t, img in old.items():
        total[t] = total[t] + img
    try:
        B = DGAPresentation(q, total, gauge=A.gauge.retarget(ctx), label=f"CE({A.label})",
                            parent=A, parts={"old": Derivation(ctx, old, -1), "ce": Derivation(ctx, ce, -1)})
    except PresentationError as exc:
        raise PresentationError(f"CE differential: {exc}") from exc
    return B


def supercommute_report(B: DGAPresentation) -> Report:
    """d_old, d_CE square to zero and super-commute on generators."""
    d1, d2 = B.parts["old"], B.parts["ce"]
    rep = Report("CE differentials")
    bad = {"d_old²": None, "d_CE²": None, "d_old d_CE + d_CE d_old": None}
    for t in B.generators:
        g = B.ctx.gen(t)
        if bad["d_old²"] is None and not d1(d1(g)).is_zero():
            bad["d_old²"] = t
        if bad["d_CE²"] is None and not d2(d2(g)).is_zero():
            bad["d_CE²"] = t
        if bad["d_old d_CE + d_CE d_old"] is None and not (d1(d2(g)) + d2(d1(g))).is_zero():
            bad["d_old d_CE + d_CE d_old"] = t
    for k, v in bad.items():
        rep.add(f"{k} = 0", v is None, "", v)
    return rep


def brst_charge(B: DGAPresentation) -> NCElement:
    """γ = Σ η_i δ_i − Σ η_i² ϑ_i."""
    base = B.parent.parent.quiver
    ctx = B.ctx
    gamma = ctx.zero()
    for v in base.vertices:
        eta = ctx.gen(loop_name(base, ETA, v))
        theta = ctx.gen(loop_name(base, THETA, v))
        gamma = gamma + eta * B.gauge.deltas[v] - eta * eta * theta
    return gamma


def brst(A: DGAPresentation, ham: HamiltonianData) -> DGAPresentation:
    """CE(Sh(A)) with the free-product table and the BRST charge attached."""
    sh = shafarevich(A, ham)
    B = chevalley_eilenberg(sh)
    table = free_product(A.table.embed(B.ctx), standard_table("brst_pairing", B.quiver))
    gamma = brst_charge(B)
    d = charge_differential(table, gamma)
    for t in B.generators:
        if d.on_token(t) != B.d.on_token(t):
            raise ChargeError(f"charge differential disagrees with the CE differential on {t}")
    return DGAPresentation(B.quiver, B.d, table=table, charge=gamma, gauge=B.gauge,
                           label=f"BRST({A.label})", parent=sh, parts=B.parts)


def brst_formula_report(B: DGAPresentation) -> Report:
    """Compare d_BRST with the closed formulas on x, x*, ϑ_i, η_i."""
    base = B.parent.parent.quiver
    ctx = B.ctx
    eta = sum((ctx.gen(loop_name(base, ETA, v)) for v in base.vertices), ctx.zero())
    rep = Report("BRST differential formulas")
    for a in base.arrows:
        g = ctx.gen(a.name)
        rep.add(f"d {a.name} = −[η,{a.name}]", B.d(g) == -graded_commutator(eta, g))
    for v in base.vertices:
        th = ctx.gen(loop_name(base, THETA, v))
        et = ctx.gen(loop_name(base, ETA, v))
        delta = B.gauge.deltas[v]
        rep.add(f"d ϑ_{v} = δ_{v} − [η_{v},ϑ_{v}]", B.d(th) == delta - graded_commutator(et, th))
        rep.add(f"d η_{v} = −η_{v}²", B.d(et) == -(et * et))
    return rep


def gauge_quiver(vertices=(1,)) -> Quiver:
    q = Quiver(list(vertices), [])
    return adjoin_loops(q, "t", 0, 1)


def contraction_check(max_len=4, vertex_counts=(1, 2)) -> Report:
    """dh + hd = length·id on T_S(L⊕L[1]), with dϑ = t and h(t) = ϑ."""
    rep = Report("Shafarevich contraction")
    for nv in vertex_counts:
        q = adjoin_loops(gauge_quiver(range(1, nv + 1)), THETA, 1, 1)
        ctx = build_path_algebra(q)
        ts = [loop_name(q, "t", v) for v in q.vertices]
        ths = [loop_name(q, THETA, v) for v in q.vertices]
        d = Derivation(ctx, {th: ctx.gen(t) for t, th in zip(ts, ths)}, -1)
        h = Derivation(ctx, {t: ctx.gen(th) for t, th in zip(ts, ths)}, 1)
        bad = None
        words = ctx.words(max_len)
        for w in words:
            a = ctx.elem(w)
            if d(h(a)) + h(d(a)) != a * len(w.tokens):
                bad = ctx.word_str(w)
                break
        rep.add(f"|I|={nv}: dh+hd = length", bad is None, f"{len(words)} words", bad)
    return rep


def eta_zero_map(B: DGAPresentation, sh: DGAPresentation | None = None) -> Report:
    """Check that η_i ↦ 0 intertwines d_BRST with the Shafarevich differential."""
    sh = sh or B.parent
    eta_tokens = {t for t in B.ctx.tokens if t not in sh.ctx.tokens}

    def ev(x: NCElement) -> NCElement:
        keep = {w: c for w, c in x.terms.items() if not eta_tokens.intersection(w.tokens)}
        return NCElement(sh.ctx, keep)

    rep = Report("η = 0 evaluation")
    for t in B.generators:
        g = B.ctx.gen(t)
        lhs = ev(B.d(g))
        rhs = sh.d(ev(g))
        rep.add(f"ev(d {t}) = d_Sh(ev {t})", lhs == rhs, "" if lhs == rhs else f"{lhs} vs {rhs}")
    return rep
