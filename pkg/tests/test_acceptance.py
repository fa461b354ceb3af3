"""Acceptance criteria 1-10, one PASS/FAIL line each."""
import time

import pytest

from ncbrst.complexes import brst, brst_formula_report, contraction_check
from ncbrst.dbracket import (HamiltonianData, check_hamiltonian, commutator_membership, single_bracket,
                             standard_table, verify_axioms)
from ncbrst.homology import betti, diagonal_check, phi_psi, verify_decomposition, weight_slice
from ncbrst.ncalg import localize
from ncbrst.complexes import presentation, shafarevich
from ncbrst.repfun import gauge_bracket_report, rep_algebra, verify_rep_laws

from conftest import cotangent, genus_quiver, jordan_quiver, star_quiver

QUIVERS = {"jordan": jordan_quiver, "genus-2": lambda: genus_quiver(2), "star": star_quiver}


@pytest.fixture
def verdict(capsys):
    def report(n, title, ok, elapsed=None, limit=None, note=""):
        in_time = limit is None or elapsed < limit
        status = "PASS" if ok and in_time else "FAIL"
        timing = f" [{elapsed:.2f}s < {limit}s]" if limit is not None else ""
        if limit is not None and not in_time:
            timing = f" [{elapsed:.2f}s exceeds {limit}s]"
        with capsys.disabled():
            print(f"\ncriterion {n:2d}: {status} {title}{timing}{' ' + note if note else ''}")
        assert ok, title
        assert in_time, f"{title}: too slow ({elapsed:.2f}s)"
    return report


def test_criterion_01_bracket_axioms(verdict):
    t0 = time.perf_counter()
    ok = True
    for make in QUIVERS.values():
        q = make()
        rep = verify_axioms(standard_table("cotangent", q), max_word_len=1, samples=0)
        ok &= rep.ok and {c.name for c in rep.checks} >= {"cyclic antisymmetry", "double Jacobi",
                                                           "almost-Jacobi identity"}
    verdict(1, "cotangent double Jacobi, antisymmetry, almost-Jacobi on generator triples", ok,
            time.perf_counter() - t0, 1)


def test_criterion_02_hamiltonian(verdict):
    t0 = time.perf_counter()
    ok = all(check_hamiltonian(*_table_and_moment(make())).ok for make in QUIVERS.values())
    for names in (["x"], ["x", "y"]):
        q = localize(jordan_quiver(), names)
        tbl = standard_table("cotangent", q)
        ok &= check_hamiltonian(tbl, HamiltonianData({1: tbl.ctx.parse("x y - y x")})).ok
    verdict(2, "Hamiltonian identity on doubled quivers and localized Jordan", ok, time.perf_counter() - t0, 1)


def _table_and_moment(q):
    A, ham = cotangent(q)
    return A.table, ham


def test_criterion_03_brst_charge(verdict):
    t0 = time.perf_counter()
    ok = True
    for make in QUIVERS.values():
        B = brst(*cotangent(make()))
        gg = single_bracket(B.table, B.charge, B.charge)
        ok &= commutator_membership(gg, gg.weight)
        ok &= brst_formula_report(B).ok
        ok &= B.check_words(max_len=4, samples=10 ** 6).ok
    verdict(3, "BRST charge: {γ,γ} in commutators, {γ,−} = BRST differential, d² = 0 on words ≤ 4", ok,
            time.perf_counter() - t0, 5)


def test_criterion_04_contraction(verdict):
    t0 = time.perf_counter()
    ok = contraction_check(max_len=4, vertex_counts=(1, 2)).ok
    verdict(4, "Shafarevich contraction dh + hd = length", ok, time.perf_counter() - t0, 1)


def test_criterion_05_rep_laws(verdict):
    t0 = time.perf_counter()
    B = brst(*cotangent(jordan_quiver()))
    ok = all(verify_rep_laws(B, B.table, B.charge, [n], n_pairs=50).ok for n in (1, 2))
    verdict(5, "representation laws for the Jordan BRST complex at n = 1, 2", ok, time.perf_counter() - t0, 30)


def test_criterion_06_gauge(verdict, gauge):
    rep = gauge_bracket_report(gauge, [2])
    verdict(6, "Sym(gl_2): Casimirs commute and structure constants match", rep.ok)


def test_criterion_07_decomposition(verdict):
    t0 = time.perf_counter()
    jordan, genus = cotangent(jordan_quiver()), cotangent(genus_quiver(2))
    runs = [verify_decomposition(*jordan, [1], 6), verify_decomposition(*jordan, [2], 4),
            verify_decomposition(*genus, [2], 3)]
    ok = all(r.ok for r in runs)
    positive = runs[2].data["K_GL_positive_degrees"]
    verdict(7, "decomposition H(B_n) = H(K_n)^GL ⊗ H(gl_n)", ok, time.perf_counter() - t0, 600,
            note=f"(genus-2 H_>=1(K)^GL by weight: {positive})")


def test_criterion_08_closed_form(verdict):
    A, ham = cotangent(jordan_quiver())
    K = rep_algebra(shafarevich(A, ham), [1])
    B = rep_algebra(brst(A, ham), [1])
    ok = True
    for w in range(7):
        hk = betti(weight_slice(K, w))
        hb = betti(weight_slice(B, w))
        ok &= hk.get(0, 0) == w + 1 and hk.get(1, 0) == max(w - 1, 0)
        expect = {k: hk.get(k, 0) + hk.get(k + 1, 0) for k in range(-1, 2)}
        ok &= {k: v for k, v in hb.items() if v} == {k: v for k, v in expect.items() if v}
    verdict(8, "n=1 Jordan: H(K_1) = (w+1, max(w-1,0)) and H(B_1) = H(K_1) ⊗ (1,1)", ok)


def test_criterion_09_phi_psi(verdict):
    rep = phi_psi(*cotangent(jordan_quiver()), 2, 4)
    verdict(9, "φψ+ψφ = n, φ² = ψ² = 0 and the ker φ / im ψ splitting at n=2, w ≤ 4", rep.ok)


def test_criterion_10_diagonal(verdict):
    A, ham = cotangent(jordan_quiver())
    one = diagonal_check(A, ham, 1, 4)
    two = diagonal_check(A, ham, 2, 4)
    finding = "agree" if two.data["diagonal_agree"] else "DISAGREE"
    verdict(10, "diagonal restriction: quasi-isomorphism at n=1", one.ok and one.data["diagonal_agree"] and two.ok,
            note=f"(FINDING: n=2 Betti tables {finding} for w ≤ 4)")
