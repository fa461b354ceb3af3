import pytest

from ncbrst.complexes import (DGAPresentation, PresentationError, brst, brst_formula_report, chevalley_eilenberg,
                              contraction_check, eta_zero_map, gauge_quiver, presentation, shafarevich,
                              supercommute_report)
from ncbrst.dbracket import HamiltonianData, standard_table
from ncbrst.ncalg import Derivation, adjoin_loops, build_path_algebra, graded_commutator

from conftest import cotangent, genus_quiver, star_quiver


def test_shafarevich_jordan(jordan_sh):
    ctx = jordan_sh.ctx
    assert jordan_sh.d(ctx.gen("theta")) == ctx.parse("x y - y x")
    assert jordan_sh.quiver.arrow("theta").weight == 2


def test_shafarevich_genus2():
    sh = shafarevich(*cotangent(genus_quiver(2)))
    assert sh.d(sh.ctx.gen("theta")) == sh.ctx.parse("x1 y1 - y1 x1 + x2 y2 - y2 x2")


def test_shafarevich_gauge(gauge):
    ctx = gauge.ctx
    sh = shafarevich(gauge, HamiltonianData({1: ctx.gen("t")}))
    assert sh.d(sh.ctx.gen("theta")) == sh.ctx.gen("t")
    assert sh.quiver.arrow("theta").weight == 1


def test_shafarevich_rejects_non_moment(jordan):
    A, _ = jordan
    with pytest.raises(PresentationError):
        shafarevich(A, HamiltonianData({1: A.ctx.gen("x")}))


def test_brst_formulas_jordan(jordan_brst):
    assert brst_formula_report(jordan_brst).ok
    assert supercommute_report(jordan_brst).ok
    ctx = jordan_brst.ctx
    eta, th = ctx.gen("eta"), ctx.gen("theta")
    assert jordan_brst.d(th) == ctx.parse("x y - y x") - graded_commutator(eta, th)
    assert jordan_brst.d(eta) == ctx.parse("eta eta") * -1


def test_brst_star_two_vertices(star):
    B = brst(*star)
    names = set(B.quiver.names)
    assert {"theta1", "theta2", "eta1", "eta2"} <= names
    ctx = B.ctx
    eta = ctx.gen("eta1") + ctx.gen("eta2")
    assert B.d(ctx.gen("x")) == -graded_commutator(eta, ctx.gen("x"))
    assert brst_formula_report(B).ok


def test_brst_d_squared_on_words(jordan_brst):
    rep = jordan_brst.check_words(max_len=4, samples=400)
    assert rep.ok


def test_ce_with_zero_old_differential(gauge):
    ctx = gauge.ctx
    A = DGAPresentation(gauge.quiver, {}, table=gauge.table,
                        gauge=HamiltonianData({1: ctx.gen("t")}), label="gauge")
    ce = chevalley_eilenberg(A)
    eta, t = ce.ctx.gen("eta"), ce.ctx.gen("t")
    assert ce.d(t) == -graded_commutator(eta, t)


def test_ce_needs_gauge_data(jordan):
    with pytest.raises(PresentationError):
        chevalley_eilenberg(jordan[0])


def test_contraction_by_hand():
    q = adjoin_loops(gauge_quiver([1, 2]), "theta", 1, 1)
    ctx = build_path_algebra(q)
    d = Derivation(ctx, {"theta1": ctx.gen("t1"), "theta2": ctx.gen("t2")}, -1)
    h = Derivation(ctx, {"t1": ctx.gen("theta1"), "t2": ctx.gen("theta2")}, 1)
    # t1 ϑ1 has length 2
    w = ctx.parse("t1 theta1")
    assert d(h(w)) + h(d(w)) == w * 2
    e = ctx.e(1)
    assert (d(h(e)) + h(d(e))).is_zero()


def test_contraction_check():
    rep = contraction_check(max_len=4, vertex_counts=(1, 2))
    assert rep.ok and len(rep.checks) == 2


def test_eta_zero_map(jordan_brst, jordan_sh):
    assert eta_zero_map(jordan_brst, jordan_sh).ok


def test_eta_zero_map_gauge(gauge):
    B = brst(gauge, HamiltonianData({1: gauge.ctx.gen("t")}))
    assert eta_zero_map(B).ok


def test_eta_zero_map_detects_mutation(jordan_brst, jordan_sh):
    B = jordan_brst
    ctx = B.ctx
    images = dict(B.d.images)
    # dϑ = 2δ − [η,ϑ] keeps degree and weight but breaks η ↦ 0
    images["theta"] = B.gauge.deltas[1] * 2 - graded_commutator(ctx.gen("eta"), ctx.gen("theta"))
    bad = DGAPresentation(B.quiver, images, table=B.table, gauge=B.gauge, parent=jordan_sh, validate=False)
    rep = eta_zero_map(bad, jordan_sh)
    assert [c.name for c in rep.failures()] == ["ev(d theta) = d_Sh(ev theta)"]


def test_brst_table_compatible_with_d(jordan_brst):
    from ncbrst.dbracket import verify_axioms
    rep = verify_axioms(jordan_brst.table, max_word_len=2, differential=jordan_brst.d)
    assert rep.ok, str(rep)


def test_presentation_rejects_wrong_degree(jordan):
    A, _ = jordan
    q = adjoin_loops(A.quiver, "theta", 1, 2)
    ctx = build_path_algebra(q)
    with pytest.raises(PresentationError):
        DGAPresentation(q, {"x": ctx.gen("y")})


def test_as_dict_lists_differential(jordan_brst):
    d = jordan_brst.as_dict()
    assert set(d["differential"]) == {"x", "y", "theta", "eta"}
    assert d["charge"]
