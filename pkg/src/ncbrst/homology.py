"""Weight-truncated homology of commutative dg algebras and the GL-reduction checks."""
from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import linalg
from .complexes import THETA, ETA, brst, shafarevich
from .ncalg import loop_name
from .poly import GradedRing, Poly, Var, apply_derivation, derive
from .repfun import CommutativeDGA, gl_derivations, induced_poisson, rep_algebra
from .report import FINDING, Report


class SliceError(ValueError):
    pass


# ------------------------------------------------------------ slices

def monomials_of_weight(ring: GradedRing, w):
    """All monomials of total weight w, grouped by homological degree."""
    vs = ring.vars
    for v in vs:
        if v.weight < 0:
            raise SliceError(f"variable {v.name} has negative weight; slices would be infinite")
        if v.weight == 0 and v.degree % 2 == 0:
            raise SliceError(f"even variable {v.name} has weight 0; slices would be infinite")
    order = list(range(len(vs)))
    out = {}
    # suffix sums of odd weight-0 variables do not bound anything; plain recursion
    cur = []

    def rec(pos, remaining, degree):
        if pos == len(order):
            if remaining == 0:
                out.setdefault(degree, []).append(tuple(cur))
            return
        i = order[pos]
        v = vs[i]
        emax = 1 if ring.odd[i] else (remaining // v.weight if v.weight else 0)
        if v.weight:
            emax = min(emax, remaining // v.weight)
        for e in range(emax + 1):
            if e:
                cur.append((i, e))
            rec(pos + 1, remaining - e * v.weight, degree + e * v.degree)
            if e:
                cur.pop()

    rec(0, w, 0)
    for k in out:
        out[k].sort()
    return out


@dataclass
class ChainComplexSlice:
    """Per degree k: a basis and the columns of d_k : C_k → C_{k−1}.

    Column j of ``matrices[k]`` is d(basis[k][j]) in coordinates of basis[k−1].
    Basis labels are monomials, or coordinate vectors (monomial → coefficient)
    for invariant subcomplexes.
    """
    weight: int
    ring: GradedRing
    basis: dict
    matrices: dict
    labels_are_vectors: bool = False

    def dims(self):
        return {k: len(b) for k, b in sorted(self.basis.items()) if b}

    def vector(self, k, j) -> dict:
        lab = self.basis[k][j]
        return dict(lab) if self.labels_are_vectors else {lab: 1}

    def degrees(self):
        return sorted(k for k, b in self.basis.items() if b)

    def check_d_squared(self):
        for k in self.degrees():
            if k - 1 not in self.matrices:
                continue
            lower = self.matrices.get(k - 1)
            if lower is None:
                continue
            for col in self.matrices[k]:
                acc = {}
                for i, c in col.items():
                    for r, x in lower[i].items():
                        acc[r] = acc.get(r, 0) + c * x
                if any(v != 0 for v in acc.values()):
                    return False
        return True


def weight_slice(cd: CommutativeDGA, w) -> ChainComplexSlice:
    inv = [a.name for a in cd.source.quiver.arrows if a.invertible]
    if inv:
        raise SliceError(f"homology with invertible generators {inv} is not supported (slices are infinite)")
    if w < 0:
        raise SliceError("weight must be non-negative")
    if not cd.weight_homogeneous:
        raise SliceError("differential is not weight-homogeneous")
    ring = cd.ring
    basis = monomials_of_weight(ring, w)
    index = {k: {m: j for j, m in enumerate(ms)} for k, ms in basis.items()}
    mats = {}
    for k, ms in basis.items():
        cols = []
        target = index.get(k - 1, {})
        for m in ms:
            img = apply_derivation(ring, cd.d_images, -1, m)
            col = {}
            for mm, c in img.items():
                j = target.get(mm)
                if j is None:
                    raise SliceError(f"d({ring.mono_str(m)}) leaves the slice")
                col[j] = c
            cols.append(col)
        mats[k] = cols
    return ChainComplexSlice(w, ring, basis, mats)


def _ranks(sl: ChainComplexSlice):
    return {k: linalg.rank(cols) for k, cols in sl.matrices.items()}


def betti(sl: ChainComplexSlice) -> dict:
    """dim H_k = dim C_k − rank d_k − rank d_{k+1}."""
    r = _ranks(sl)
    return {k: len(sl.basis[k]) - r.get(k, 0) - r.get(k + 1, 0) for k in sl.degrees()}


def betti_oracle(sl: ChainComplexSlice) -> dict:
    """Same as betti, via dense rational elimination."""
    r = {}
    for k, cols in sl.matrices.items():
        nrows = len(sl.basis.get(k - 1, []))
        r[k] = linalg.dense_rank(linalg.to_dense(cols, nrows)) if cols and nrows else 0
    return {k: len(sl.basis[k]) - r.get(k, 0) - r.get(k + 1, 0) for k in sl.degrees()}


# ------------------------------------------------------------ invariants

def _diagonal_weights(ring, derivations):
    """Split derivations into diagonal ones (eigenvalue per variable) and the rest."""
    diag, other = [], []
    for label, images in derivations:
        lam = {}
        ok = True
        for i, p in images.items():
            if len(p.terms) == 1 and next(iter(p.terms)) == ((i, 1),):
                lam[i] = next(iter(p.terms.values()))
            else:
                ok = False
                break
        (diag if ok else other).append((label, lam if ok else images))
    return diag, other


def invariant_vectors(ring, monomials, derivations):
    """Basis of the joint kernel of the derivations on span(monomials).

    Vectors are dicts monomial → Fraction in RREF form over ``monomials``.
    """
    diag, other = _diagonal_weights(ring, derivations)
    kept = []
    for m in monomials:
        if all(sum(lam.get(i, 0) * e for i, e in m) == 0 for _, lam in diag):
            kept.append(m)
    rows = {}
    for j, m in enumerate(kept):
        for a, (_, images) in enumerate(other):
            for mm, c in apply_derivation(ring, images, 0, m).items():
                rows.setdefault((a, mm), {})[j] = c
    ker = linalg.kernel_rows(list(rows.values()), len(kept))
    return [{kept[j]: c for j, c in v.items()} for v in ker], kept


def invariant_subcomplex(sl: ChainComplexSlice, cd: CommutativeDGA, derivations=None) -> ChainComplexSlice:
    """Subcomplex of GL-invariants: joint kernel of the gl-derivations, d restricted."""
    ring = sl.ring
    if derivations is None:
        derivations = gl_derivations(cd)
    basis, free = {}, {}
    for k in sl.degrees():
        vecs, kept = invariant_vectors(ring, sl.basis[k], derivations)
        basis[k] = vecs
        # free index of an RREF kernel vector is its largest kept position
        pos = {m: j for j, m in enumerate(kept)}
        free[k] = [kept[max(pos[m] for m in v)] for v in vecs]
    mats = {}
    for k, vecs in basis.items():
        cols = []
        lower = basis.get(k - 1, [])
        lower_free = free.get(k - 1, [])
        for v in vecs:
            img = derive(ring, cd.d_images, -1, Poly(ring, v)).terms
            col = {t: img[m] for t, m in enumerate(lower_free) if img.get(m)}
            recon = {}
            for t, c in col.items():
                for m, x in lower[t].items():
                    recon[m] = recon.get(m, 0) + c * x
            if {m: c for m, c in recon.items() if c} != img:
                raise SliceError("gl-derivations do not commute with d (invariants not preserved)")
            cols.append(col)
        mats[k] = cols
    return ChainComplexSlice(sl.weight, ring, basis, mats, labels_are_vectors=True)


def cycles_boundaries(inv: ChainComplexSlice, k):
    """Cycle and boundary spanning sets in degree k, as monomial vectors."""
    def to_mono(coords, vecs):
        out = {}
        for t, c in coords.items():
            for m, x in vecs[t].items():
                out[m] = out.get(m, 0) + c * x
        return {m: c for m, c in out.items() if c}

    vecs = inv.basis.get(k, [])
    Z = [to_mono(z, vecs) for z in linalg.kernel(inv.matrices.get(k, []), len(vecs))] if vecs else []
    upper = inv.matrices.get(k + 1, [])
    B = [to_mono(col, vecs) for col in upper if col]
    return Z, B


def induced_rank(images_of_cycles, boundaries):
    """Rank of the map induced on homology: dim(f(Z) + B') − dim B'."""
    return linalg.rank(list(images_of_cycles) + list(boundaries)) - linalg.rank(boundaries)


# ------------------------------------------------------------ gl cohomology

@dataclass
class LieCohomologyProfile:
    dims: dict  # homological degree -> dimension

    @property
    def total(self):
        return sum(self.dims.values())


def lie_cohomology(nv) -> LieCohomologyProfile:
    """Exterior algebra on classes of degree −1, −3, …, −(2n_i−1) per vertex."""
    if hasattr(nv, "as_list"):
        nv = nv.as_list()
    if isinstance(nv, int):
        nv = [nv]
    dims = {0: 1}
    for n in nv:
        for i in range(1, n + 1):
            g = -(2 * i - 1)
            new = dict(dims)
            for d, c in dims.items():
                new[d + g] = new.get(d + g, 0) + c
            dims = new
    return LieCohomologyProfile(dict(sorted(dims.items(), reverse=True)))


# ------------------------------------------------------------ pipeline helpers

def _b_and_k(A, ham, nv):
    sh = shafarevich(A, ham)
    B = brst(A, ham)
    return sh, B, rep_algebra(sh, nv), rep_algebra(B, nv)


def _weight_job(args):
    Kn, Bn, w = args
    derivs = gl_derivations(Kn, check=False)
    kslice = weight_slice(Kn, w)
    kb = betti(kslice)
    kinv = betti(invariant_subcomplex(kslice, Kn, derivs))
    bb = betti(weight_slice(Bn, w))
    return w, kb, kinv, bb


def _map_jobs(fn, args, jobs):
    if jobs and jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, args))
    return [fn(a) for a in args]


def _table_rows(tab):
    return [[w, k, d] for w in sorted(tab) for k, d in sorted(tab[w].items(), reverse=True)]


def betti_tables(Kn, Bn, max_w, jobs=1):
    """Betti numbers of K, K^GL and B for weights 0..max_w, keyed by weight."""
    tabK, tabInv, tabB = {}, {}, {}
    for w, kb, kinv, bb in _map_jobs(_weight_job, [(Kn, Bn, w) for w in range(max_w + 1)], jobs):
        tabK[w], tabInv[w], tabB[w] = kb, kinv, bb
    return tabK, tabInv, tabB


ORACLE_LIMIT = 200


def slice_report(cd: CommutativeDGA, max_w, label="") -> Report:
    """d² = 0, Euler characteristic and (for small slices) the dense-rank oracle."""
    rep = Report(f"slice checks {label}".strip())
    bad = {"d² = 0": None, "Euler characteristic": None, "dense oracle": None}
    compared = 0
    for w in range(max_w + 1):
        sl = weight_slice(cd, w)
        if not sl.check_d_squared() and bad["d² = 0"] is None:
            bad["d² = 0"] = w
        b = betti(sl)
        chi_c = sum((-1) ** (k % 2) * n for k, n in sl.dims().items())
        chi_h = sum((-1) ** (k % 2) * n for k, n in b.items())
        if chi_c != chi_h and bad["Euler characteristic"] is None:
            bad["Euler characteristic"] = w
        if max(sl.dims().values(), default=0) <= ORACLE_LIMIT:
            compared += 1
            if betti_oracle(sl) != b and bad["dense oracle"] is None:
                bad["dense oracle"] = w
    for name, w in bad.items():
        detail = f"{compared} slices compared" if name == "dense oracle" else f"w ≤ {max_w}"
        rep.add(name, w is None, detail, {"weight": w} if w is not None else None)
    return rep


def verify_decomposition(A, ham, nv, max_w, jobs=1) -> Report:
    """dim_w H_k(B_n) = Σ_{i+j=k} dim_w H_i(K_n)^GL · dim H^j(gl)."""
    sh, B, Kn, Bn = _b_and_k(A, ham, nv)
    gl_derivations(Kn)  # asserts commutation with d
    gl_derivations(Bn)
    lie = lie_cohomology(Kn.nv)
    rep = Report(f"decomposition H(B) = H(K)^GL ⊗ H(gl), n={Kn.nv.as_list()}, w ≤ {max_w}")
    tabK, tabInv, tabB = betti_tables(Kn, Bn, max_w, jobs)
    for w in range(max_w + 1):
        kinv, bb = tabInv[w], tabB[w]
        predicted = {}
        for i, a in kinv.items():
            for j, b in lie.dims.items():
                if a and b:
                    predicted[i + j] = predicted.get(i + j, 0) + a * b
        actual = {k: v for k, v in bb.items() if v}
        predicted = {k: v for k, v in predicted.items() if v}
        bad = [k for k in set(actual) | set(predicted) if actual.get(k, 0) != predicted.get(k, 0)]
        rep.add(f"weight {w}", not bad, f"H(B) = {dict(sorted(actual.items()))}",
                {"degrees": sorted(bad), "actual": actual, "predicted": predicted} if bad else None)
    higher = {w: {k: d for k, d in t.items() if k >= 1 and d} for w, t in tabInv.items()}
    rep.data.update({
        "betti_B": _table_rows(tabB), "betti_K": _table_rows(tabK), "betti_K_GL": _table_rows(tabInv),
        "lie_cohomology": lie.dims,
        "K_GL_positive_degrees": {w: h for w, h in higher.items() if h},
    })
    return rep


# ------------------------------------------------------------ φ / ψ

class PhiPsi:
    """φ = {tr η, −} and ψ = tr(ϑ)·(−) on K_n, built from the BRST side."""

    def __init__(self, A, ham, n):
        self.sh, self.B, self.K, self.Bn = _b_and_k(A, ham, [n])
        self.n = n
        base = A.quiver
        if len(base.vertices) != 1:
            raise ValueError("φ/ψ are defined here for one-vertex quivers")
        induced_poisson(self.B.table, self.Bn)
        eta = self.B.ctx.gen(loop_name(base, ETA, base.vertices[0]))
        theta_sh = self.sh.ctx.gen(loop_name(base, THETA, base.vertices[0]))
        theta_b = self.B.ctx.gen(loop_name(base, THETA, base.vertices[0]))
        self.tr_eta = self.Bn.trace(eta)
        self.tr_theta = self.K.trace(theta_sh)
        self.tr_theta_B = self.Bn.trace(theta_b)
        Bring, Kring = self.Bn.ring, self.K.ring
        self.phi_B = {}
        for i in range(len(Bring)):
            img = self.Bn.bracket(self.tr_eta, Bring.var(i))
            if not img.is_zero():
                self.phi_B[i] = img
        # restrict to K: variables match by name, images must avoid η
        kidx = {v.name: i for i, v in enumerate(Kring.vars)}
        self.phi_K = {}
        for i, img in self.phi_B.items():
            name = Bring.vars[i].name
            if name not in kidx:
                continue
            terms = {}
            for m, c in img.terms.items():
                mm = []
                for j, e in m:
                    if Bring.vars[j].name not in kidx:
                        raise ValueError("φ does not preserve the Koszul subalgebra")
                    mm.append((kidx[Bring.vars[j].name], e))
                terms[tuple(sorted(mm))] = c
            self.phi_K[kidx[name]] = Poly(Kring, terms)

    def phi(self, m) -> dict:
        return apply_derivation(self.K.ring, self.phi_K, -1, m)

    def psi(self, m) -> dict:
        return (self.tr_theta * Poly(self.K.ring, {m: 1})).terms

    @staticmethod
    def apply(f, vec):
        out = {}
        for m, c in vec.items():
            for mm, x in f(m).items():
                out[mm] = out.get(mm, 0) + c * x
        return {m: c for m, c in out.items() if c}

    def vec_phi(self, v):
        return self.apply(self.phi, v)

    def vec_psi(self, v):
        return self.apply(self.psi, v)

    def vec_d(self, v):
        return self.apply(lambda m: apply_derivation(self.K.ring, self.K.d_images, -1, m), v)


def _add(*vs, coef=None):
    out = {}
    for i, v in enumerate(vs):
        c = 1 if coef is None else coef[i]
        for m, x in v.items():
            out[m] = out.get(m, 0) + c * x
    return {m: c for m, c in out.items() if c}


def phi_psi(A, ham, n, max_w) -> Report:
    P = PhiPsi(A, ham, n)
    K, ring = P.K, P.K.ring
    rep = Report(f"φ/ψ relations, n={n}, w ≤ {max_w}")
    one = {(): 1}
    rep.add("ψ(1) = tr ϑ", P.vec_psi(one) == P.tr_theta.terms)
    rep.add("φ(tr ϑ) = n", P.vec_phi(P.tr_theta.terms) == {(): n})

    # BRST side: φ anticommutes with d_B on generators; d_B(tr ϑ) = 0
    Bring = P.Bn.ring
    bad = None
    for i in range(len(Bring)):
        v = Bring.var(i)
        lhs = derive(Bring, P.phi_B, -1, P.Bn.d(v)) + P.Bn.d(derive(Bring, P.phi_B, -1, v))
        if not lhs.is_zero():
            bad = Bring.vars[i].name
            break
    rep.add("φ d_BRST + d_BRST φ = 0 (generators)", bad is None, "", bad)
    rep.add("d_BRST(tr ϑ) = 0, so ψ d + d ψ = 0", P.Bn.d(P.tr_theta_B).is_zero())

    fails = {"φψ+ψφ = n": None, "φ² = 0": None, "ψ² = 0": None, "φd + dφ = 0": None, "ψd + dψ = 0": None}
    count = 0
    for w in range(max_w + 1):
        for k, ms in monomials_of_weight(ring, w).items():
            for m in ms:
                count += 1
                e = {m: 1}
                checks = {
                    "φψ+ψφ = n": _add(P.vec_phi(P.vec_psi(e)), P.vec_psi(P.vec_phi(e))) == {m: n},
                    "φ² = 0": not P.vec_phi(P.vec_phi(e)),
                    "ψ² = 0": not P.vec_psi(P.vec_psi(e)),
                    "φd + dφ = 0": not _add(P.vec_phi(P.vec_d(e)), P.vec_d(P.vec_phi(e))),
                    "ψd + dψ = 0": not _add(P.vec_psi(P.vec_d(e)), P.vec_d(P.vec_psi(e))),
                }
                for name, ok in checks.items():
                    if not ok and fails[name] is None:
                        fails[name] = f"w={w}, k={k}, m={ring.mono_str(m)}"
    for name, bad in fails.items():
        rep.add(f"{name} on K slices", bad is None, f"{count} basis monomials", bad)

    # splitting of H(K)^GL
    derivs = gl_derivations(K)
    ZB = {}
    dims = {}
    for w in range(max_w + 1):
        inv = invariant_subcomplex(weight_slice(K, w), K, derivs)
        b = betti(inv)
        for k in inv.degrees():
            ZB[(w, k)] = cycles_boundaries(inv, k)
            dims[(w, k)] = b[k]
    rows = []
    ok_all = True
    for (w, k), h in sorted(dims.items()):
        Z, _ = ZB[(w, k)]
        if (w - 2, k - 1) in ZB:
            Bt = ZB[(w - 2, k - 1)][1]
            rphi = induced_rank([P.vec_phi(z) for z in Z], Bt)
        else:
            rphi = 0
        ker = h - rphi
        if (w - 2, k - 1) in ZB:
            Zs = ZB[(w - 2, k - 1)][0]
            im = induced_rank([P.vec_psi(z) for z in Zs], ZB[(w, k)][1])
        else:
            im = 0
        rows.append([w, k, h, ker, im])
        ok_all &= (h == ker + im)
    rep.add("dim H = dim ker φ + dim im ψ on H(K)^GL", ok_all, "rows (w, k, dim H, dim ker φ, dim im ψ)")
    rep.data["phi_psi_splitting"] = rows
    return rep


# ------------------------------------------------------------ diagonal restriction

def diagonal_ring(n):
    vs = [Var(f"x_{i}", 0, 1) for i in range(1, n + 1)] + [Var(f"y_{i}", 0, 1) for i in range(1, n + 1)] \
        + [Var(f"theta_{i}", 1, 2) for i in range(1, n + 1)]
    return GradedRing(vs)


def multisym_invariants(n, w, ring=None) -> dict:
    """Basis (per degree) of S_n-invariants of weight w in k[x_i, y_i, ϑ_i]."""
    ring = ring or diagonal_ring(n)
    perms = list(itertools.permutations(range(n)))

    def act(sigma, m):
        images = {}
        for i, v in enumerate(ring.vars):
            block, idx = divmod(i, n)
            images[i] = ring.var(block * n + sigma[idx])
        return Poly(ring, {m: 1}).substitute(images, ring)

    out = {}
    for k, ms in monomials_of_weight(ring, w).items():
        ech = linalg.Echelon()
        seen = set()
        basis = []
        for m in ms:
            if m in seen:
                continue
            s = ring.zero()
            for sigma in perms:
                img = act(sigma, m)
                seen.update(img.terms)
                s = s + img
            if not s.is_zero() and ech.add(s.terms):
                basis.append(s)
        out[k] = basis
    return out


def diagonal_check(A, ham, n, max_w) -> Report:
    """Compare H(K_n)^GL with k[x_i,y_i,ϑ_i]^{S_n} under diagonal restriction."""
    sh = shafarevich(A, ham)
    K = rep_algebra(sh, [n])
    ring = K.ring
    T = diagonal_ring(n)
    names = [a.name for a in sh.quiver.arrows]
    if len(names) != 3:
        raise ValueError("diagonal restriction is defined for the doubled Jordan quiver")
    images = {}
    for i, (tok, r, s) in enumerate(K.var_token):
        if r == s:
            images[i] = T.var(names.index(tok) * n + r)
    derivs = gl_derivations(K)
    rep = Report(f"diagonal restriction, n={n}, w ≤ {max_w}")
    rows = []
    agree_all = True
    chain_ok = True
    for w in range(max_w + 1):
        inv = invariant_subcomplex(weight_slice(K, w), K, derivs)
        b = betti(inv)
        target = multisym_invariants(n, w, T)
        for k in sorted(set(b) | {k for k, v in target.items() if v}):
            Z, Bd = cycles_boundaries(inv, k) if k in b else ([], [])
            rZ = [Poly(ring, z).substitute(images, T).terms for z in Z]
            for bd in Bd:
                if not Poly(ring, bd).substitute(images, T).is_zero():
                    chain_ok = False
            r = linalg.rank(rZ)
            tdim = len(target.get(k, []))
            ech = linalg.Echelon()
            for t in target.get(k, []):
                ech.add(t.terms)
            inside = all(ech.contains(v) for v in rZ)
            h = b.get(k, 0)
            agree = (h == tdim == r) and inside
            agree_all &= agree
            rows.append([w, k, h, tdim, r])
    rep.add("restriction kills boundaries", chain_ok)
    verdict = "consistent with the conjecture" if agree_all else "disagreement found"
    rep.add("quasi-isomorphism at every (w, k)", FINDING, verdict)
    rep.data["diagonal"] = rows
    rep.data["diagonal_agree"] = agree_all
    return rep
