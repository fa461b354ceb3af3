import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from ncbrst.complexes import brst, presentation
from ncbrst.dbracket import (BracketTable, ChargeError, HamiltonianData, MissingBracketError, charge_differential,
                             check_hamiltonian, commutator_membership, cotangent_moment, double_bracket,
                             free_product, single_bracket, standard_table, triple_bracket, verify_axioms)
from ncbrst.ncalg import TensorElement, adjoin_loops, build_path_algebra, graded_commutator, localize, swap

from conftest import genus_quiver, jordan_quiver, star_quiver

T = TensorElement.from_elements


@pytest.fixture(scope="module")
def jtab():
    return standard_table("cotangent", jordan_quiver())


def test_dual_pairing_on_star():
    tbl = standard_table("cotangent", star_quiver())
    ctx = tbl.ctx
    x, xs = ctx.gen("x"), ctx.gen("x*")
    assert double_bracket(tbl, x, xs) == T(ctx.e(1), ctx.e(2))
    assert double_bracket(tbl, xs, x) == T(ctx.e(2), ctx.e(1)) * -1
    assert double_bracket(tbl, x, x).is_zero()


def test_gauge_values(gauge):
    tbl, ctx = gauge.table, gauge.ctx
    t, e = ctx.gen("t"), ctx.e(1)
    assert double_bracket(tbl, t, t) == T(t, e) - T(e, t)
    assert single_bracket(tbl, t, t).is_zero()
    assert triple_bracket(tbl, t, t, t).is_zero()


def test_gauge_two_vertices_is_diagonal():
    from ncbrst.complexes import gauge_quiver
    q = gauge_quiver([1, 2])
    tbl = standard_table("gauge", q)
    ctx = tbl.ctx
    assert double_bracket(tbl, ctx.gen("t1"), ctx.gen("t2")).is_zero()
    assert verify_axioms(tbl).ok


def test_idempotent_arguments_vanish(jtab):
    ctx = jtab.ctx
    a = ctx.parse("x y y")
    assert double_bracket(jtab, a, ctx.e(1)).is_zero()
    assert double_bracket(jtab, ctx.e(1), a).is_zero()
    assert single_bracket(jtab, ctx.e(1), a).is_zero()
    assert triple_bracket(jtab, ctx.e(1), a, ctx.gen("y")).is_zero()


def test_commutator_against_x(jtab):
    # by hand: ⟨⟨xy,x⟩⟩ = x∗⟨⟨y,x⟩⟩ = x∗(−e⊗e) = −e⊗x and ⟨⟨yx,x⟩⟩ = ⟨⟨y,x⟩⟩∗x = −x⊗e
    ctx = jtab.ctx
    e, x = ctx.e(1), ctx.gen("x")
    assert double_bracket(jtab, ctx.parse("x y"), x) == T(e, x) * -1
    assert double_bracket(jtab, ctx.parse("y x"), x) == T(x, e) * -1
    assert double_bracket(jtab, ctx.parse("x y - y x"), x) == T(x, e) - T(e, x)


def test_single_bracket_pairing(jtab):
    ctx = jtab.ctx
    assert single_bracket(jtab, ctx.gen("x"), ctx.gen("y")) == ctx.e(1)


@pytest.mark.parametrize("q", [jordan_quiver(), genus_quiver(2), star_quiver()], ids=["jordan", "genus2", "star"])
def test_cotangent_axioms(q):
    rep = verify_axioms(standard_table("cotangent", q), max_word_len=2)
    assert rep.ok, str(rep)


def test_triple_bracket_vanishes_on_jordan_generators(jtab):
    ctx = jtab.ctx
    gens = [ctx.gen(t) for t in ctx.generator_tokens()]
    for a, b, c in itertools.product(gens, repeat=3):
        assert triple_bracket(jtab, a, b, c).is_zero()


def test_corrupted_table_detected(jtab):
    ctx = jtab.ctx
    e, x = ctx.e(1), ctx.gen("x")
    entries = dict(jtab.entries)
    entries[("x", "y")] = T(e, e) + T(x, e)
    del entries[("y", "x")]
    bad = BracketTable(ctx, entries, name="mutant")
    rep = verify_axioms(bad)
    failed = {c.name for c in rep.failures()}
    assert "double Jacobi" in failed
    assert bad.verified is False


def test_almost_jacobi_detects_a_non_poisson_table():
    # ⟨⟨x,x⟩⟩ = x⊗e − e⊗x stacked on the pairing: still antisymmetric
    q = jordan_quiver()
    tbl = standard_table("cotangent", q)
    ctx = tbl.ctx
    e, x = ctx.e(1), ctx.gen("x")
    entries = dict(tbl.entries)
    entries[("x", "x")] = T(x, e) - T(e, x)
    rep = verify_axioms(BracketTable(ctx, entries, name="mutant"))
    status = {c.name: c.status for c in rep.checks}
    assert status["cyclic antisymmetry"] == "PASS"
    assert status["double Jacobi"] == "FAIL"


def test_missing_pair_raises():
    ctx = build_path_algebra(jordan_quiver())
    tbl = BracketTable(ctx, {("x", "y"): T(ctx.e(1), ctx.e(1))})
    with pytest.raises(MissingBracketError):
        double_bracket(tbl, ctx.gen("x"), ctx.gen("x"))


def test_inhomogeneous_entry_rejected():
    ctx = build_path_algebra(adjoin_loops(jordan_quiver(), "theta", 1, 2))
    with pytest.raises(ValueError):
        BracketTable(ctx, {("x", "theta"): T(ctx.e(1), ctx.e(1))})


def test_brst_pairing_and_free_product():
    q = adjoin_loops(adjoin_loops(jordan_quiver(), "theta", 1, 2), "eta", -1, 0)
    ctx = build_path_algebra(q)
    pair = standard_table("brst_pairing", q)
    e = ctx.e(1)
    th, et, x = ctx.gen("theta"), ctx.gen("eta"), ctx.gen("x")
    assert double_bracket(pair, th, et) == T(e, e)
    assert double_bracket(pair, et, th) == T(e, e)
    assert double_bracket(pair, th, th).is_zero()
    fp = standard_table("cotangent+brst_pairing", q)
    assert double_bracket(fp, x, th).is_zero()
    assert double_bracket(fp, et, x).is_zero()
    assert double_bracket(fp, x, ctx.gen("y")) == T(e, e)
    assert verify_axioms(fp).ok


def test_two_vertex_brst_pairing_is_diagonal():
    base = star_quiver()
    q = adjoin_loops(adjoin_loops(base, "theta", 1, 2), "eta", -1, 0)
    tbl = standard_table("brst_pairing", q)
    ctx = tbl.ctx
    assert double_bracket(tbl, ctx.gen("theta1"), ctx.gen("eta2")).is_zero()
    assert double_bracket(tbl, ctx.gen("theta2"), ctx.gen("eta2")) == T(ctx.e(2), ctx.e(2))


@pytest.mark.parametrize("q", [jordan_quiver(), genus_quiver(2), star_quiver()], ids=["jordan", "genus2", "star"])
def test_moment_map_is_hamiltonian(q):
    rep = check_hamiltonian(standard_table("cotangent", q), cotangent_moment(q))
    assert rep.ok, str(rep)


@pytest.mark.parametrize("names", [["x"], ["x", "y"]], ids=["laurent", "group-group"])
def test_localized_moment_map(names):
    q = localize(jordan_quiver(), names)
    tbl = standard_table("cotangent", q)
    ctx = tbl.ctx
    ham = HamiltonianData({1: ctx.parse("x y - y x")})
    assert check_hamiltonian(tbl, ham).ok


def test_non_moment_element_fails_with_witness(jtab):
    ctx = jtab.ctx
    rep = check_hamiltonian(jtab, HamiltonianData({1: ctx.gen("x")}))
    assert not rep.ok
    assert rep.failures()[0].witness == {"g": "x"}


def test_commutator_membership_examples(jtab):
    ctx = jtab.ctx
    assert commutator_membership(ctx.parse("x y - y x"), 2)
    assert not commutator_membership(ctx.e(1), 0)
    assert not commutator_membership(ctx.parse("x y"), 2)
    assert commutator_membership(ctx.parse("x x y - x y x"), 3)
    with pytest.raises(ValueError):
        commutator_membership(ctx.parse("x y"), 1)


def test_charge_self_bracket_is_commutator(jordan_brst):
    B = jordan_brst
    gg = single_bracket(B.table, B.charge, B.charge)
    assert commutator_membership(gg, gg.weight)


def test_zero_charge_gives_zero_differential(jordan_brst):
    d = charge_differential(jordan_brst.table, jordan_brst.ctx.zero())
    assert all(d.on_token(t).is_zero() for t in jordan_brst.generators)


def test_eta_charge_acts_by_commutator(jordan_brst):
    B = jordan_brst
    ctx = B.ctx
    eta = ctx.gen("eta")
    d = charge_differential(B.table, eta)
    for t in ("x", "y"):
        assert d.on_token(t).is_zero()
    assert d.on_token("theta") == ctx.e(1)
    with pytest.raises(ChargeError):
        charge_differential(B.table, ctx.gen("x"))


JW = build_path_algebra(jordan_quiver()).words(3, 1)


@given(st.sampled_from(JW), st.sampled_from(JW), st.sampled_from(JW))
@settings(max_examples=60, deadline=None)
def test_single_bracket_laws(u, v, c):
    tbl = standard_table("cotangent", jordan_quiver())
    ctx = tbl.ctx
    a, b, w = ctx.elem(u), ctx.elem(v), ctx.elem(c)
    # {a,−} is a derivation; {−,c} kills commutators
    assert single_bracket(tbl, a, b * w) == single_bracket(tbl, a, b) * w + b * single_bracket(tbl, a, w)
    assert single_bracket(tbl, graded_commutator(a, b), w).is_zero()
    # cyclic antisymmetry on words
    assert double_bracket(tbl, a, b) == swap(double_bracket(tbl, b, a)) * -1
