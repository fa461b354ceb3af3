import itertools

import pytest
from hypothesis import given, settings, strategies as st

from ncbrst.complexes import brst, shafarevich
from ncbrst.dbracket import HamiltonianData, standard_table
from ncbrst.ncalg import localize
from ncbrst.poly import GradedRing, Poly, Var, derive
from ncbrst.repfun import (RepError, gauge_bracket_report, gl_derivations, induced_poisson, rep_algebra,
                           verify_rep_laws)
from ncbrst.complexes import presentation

from conftest import cotangent, jordan_quiver, star_quiver


def test_graded_commutative_ring():
    R = GradedRing([Var("a", 0, 1), Var("u", 1, 1), Var("v", 1, 1)])
    a, u, v = R.var("a"), R.var("u"), R.var("v")
    assert u * v == -(v * u)
    assert (u * u).is_zero()
    assert a * u == u * a
    d = {0: u}  # d(a) = u, odd derivation of degree +1
    assert derive(R, d, 1, a * a) == a * u * 2


def test_gauge_rep_is_gl(gauge):
    cd = rep_algebra(gauge, [3])
    assert [v.name for v in cd.ring.vars][:3] == ["t_11", "t_12", "t_13"]
    assert len(cd.ring) == 9


def test_koszul_differential(jordan_sh):
    K = rep_algebra(jordan_sh, [2])
    x, y = K.rep(K.ctx.gen("x")), K.rep(K.ctx.gen("y"))
    comm = x * y + (y * x).scale(-1)
    for r, s in itertools.product(range(2), repeat=2):
        assert K.d(K.var("theta", r + 1, s + 1)) == comm[(r, s)]


def test_brst_rep_variables(jordan_brst):
    B = rep_algebra(jordan_brst, [2])
    assert len(B.ring) == 16
    assert {v.name[:3] for v in B.ring.vars} == {"x_1", "x_2", "y_1", "y_2", "the", "eta"}


def test_product_of_matrices(jordan):
    A, _ = jordan
    cd = rep_algebra(A, [2])
    m = cd.rep(A.ctx.parse("x y"))
    R = cd.ring
    for r, s in itertools.product(range(1, 3), repeat=2):
        want = sum((cd.var("x", r, u) * cd.var("y", u, s) for u in (1, 2)), R.zero())
        assert m[(r - 1, s - 1)] == want


def test_idempotent_blocks(star):
    A, _ = star
    cd = rep_algebra(A, [1, 2])
    e1, e2 = cd.rep(A.ctx.e(1)), cd.rep(A.ctx.e(2))
    assert [e1[(i, i)] == 1 for i in range(3)] == [True, False, False]
    assert [e2[(i, i)] == 1 for i in range(3)] == [False, True, True]
    assert cd.trace(A.ctx.e(2)) == 2


def test_traces(jordan_sh):
    K = rep_algebra(jordan_sh, [3])
    ctx = K.ctx
    assert K.trace(ctx.parse("x y - y x")).is_zero()
    assert K.trace(ctx.parse("x y")) == K.trace(ctx.parse("y x"))
    assert K.trace(ctx.e(1)) == 3
    tr = sum((K.var("theta", r, r) for r in (1, 2, 3)), K.ring.zero())
    assert K.trace(ctx.gen("theta")) == tr


def test_cotangent_structure_constants(jordan):
    A, _ = jordan
    cd = rep_algebra(A, [2])
    induced_poisson(A.table, cd)
    for r, s, u, v in itertools.product(range(1, 3), repeat=4):
        val = cd.bracket(cd.var("x", r, s), cd.var("y", u, v))
        assert val == (1 if (u == s and r == v) else 0)
    assert cd.bracket(cd.var("x", 1, 2), cd.ring.const(5)).is_zero()


def test_gauge_structure_constants(gauge):
    rep = gauge_bracket_report(gauge, [2])
    assert rep.ok, str(rep)
    cd = rep_algebra(gauge, [2])
    induced_poisson(gauge.table, cd)
    assert cd.bracket(cd.var("t", 1, 2), cd.var("t", 2, 1)) == cd.var("t", 2, 2) - cd.var("t", 1, 1)


def test_gl_derivations(jordan_sh):
    K = rep_algebra(jordan_sh, [2])
    ders = gl_derivations(K)
    assert len(ders) == 4
    x = K.ctx.gen("x")
    for _, images in ders:
        for k in (1, 2, 3):
            assert derive(K.ring, images, 0, K.trace(x ** k)).is_zero()
    images = dict(ders)[(0, 1)]
    # D(x_rs) = δ_rp x_qs − δ_sq x_rp with p=1, q=2
    assert derive(K.ring, images, 0, K.var("x", 1, 1)) == K.var("x", 2, 1)
    assert derive(K.ring, images, 0, K.var("x", 2, 2)) == -K.var("x", 2, 1)


def test_gl_derivations_respect_blocks(star):
    A, _ = star
    cd = rep_algebra(A, [1, 2])
    ders = dict(gl_derivations(cd))
    assert set(ders) == {(0, 0), (1, 1), (1, 2), (2, 1), (2, 2)}
    # E_11 of vertex 1 scales x (1→2) by −1 and x* by +1
    e11 = ders[(0, 0)]
    x_img = derive(cd.ring, e11, 0, cd.var("x", 2, 1))
    assert x_img == -cd.var("x", 2, 1)


@pytest.mark.parametrize("n", [1, 2])
def test_rep_laws_jordan_brst(jordan_brst, n):
    rep = verify_rep_laws(jordan_brst, jordan_brst.table, jordan_brst.charge, [n])
    assert rep.ok, str(rep)


def test_traces_of_commutators_commute_at_n1(jordan):
    A, _ = jordan
    cd = rep_algebra(A, [1])
    induced_poisson(A.table, cd)
    ctx = A.ctx
    for a, b in itertools.combinations(["x y - y x", "x x y - x y x", "y y x - y x y"], 2):
        assert cd.bracket(cd.trace(ctx.parse(a)), cd.trace(ctx.parse(b))).is_zero()


def test_laurent_rep_at_dimension_one():
    q = localize(jordan_quiver(), ["x"])
    A = presentation(q, standard_table("cotangent", q))
    ham = HamiltonianData({1: A.ctx.parse("x y - y x")})
    B = brst(A, ham)
    cd = rep_algebra(B, [1])
    xi = cd.rep(B.ctx.inv("x"))[(0, 0)]
    assert next(iter(xi.terms)) == ((cd.var_of[("x", 0, 0)], -1),)
    assert verify_rep_laws(B, B.table, B.charge, [1]).ok
    with pytest.raises(RepError):
        rep_algebra(B, [2])


@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3))
@settings(max_examples=30, deadline=None)
def test_trace_bracket_compatibility_on_powers(i, j, k):
    q = jordan_quiver()
    A = presentation(q, standard_table("cotangent", q))
    cd = rep_algebra(A, [2])
    induced_poisson(A.table, cd)
    from ncbrst.dbracket import single_bracket
    ctx = A.ctx
    a = ctx.gen("x") ** (i + 1) * ctx.gen("y") ** j
    b = ctx.gen("y") ** (k + 1) * ctx.gen("x")
    assert cd.trace(single_bracket(A.table, a, b)) == cd.bracket(cd.trace(a), cd.trace(b))
