"""
Artinian algebras and first-order deformations of a dg operad.

A first-order deformation of P over k ⋉ A (A with zero differential) is
d' = d + Σ_a δ_a·a and ∘' = ∘ + Σ_a γ_a·a on P ⊗ (k ⊕ A), subject to the
t-linear parts of the dg-operad axioms, with the unit held fixed.  Gauge
transformations are the automorphisms id + Σ_a ξ_a·a with ξ_a equivariant
and vanishing on units.
"""

from itertools import product

from . import perms
from .chaincore import ChainComplex
from .collection import arity, substitute
from .linalg import QQ, Echelon, kernel, nullspace, vadd


def _sgn(k):
    return -1 if k % 2 else 1


# ---------------------------------------------------------------------------
# artinian algebras

class ArtinianAlgebra:
    """
    R: a ChainComplex; mult (i, j) -> vector; unit: vector; aug: dict
    index -> scalar (the augmentation on basis elements).
    """

    def __init__(self, R, mult, unit, aug, name="R"):
        self.R = R
        self.F = R.F
        self.mult = {k: dict(v) for k, v in mult.items()}
        self.unit = dict(unit)
        self.aug = dict(aug)
        self.name = name

    def mul(self, u, v):
        out = {}
        for i, x in u.items():
            for j, y in v.items():
                vadd(out, self.mult.get((i, j), {}), x * y, self.F)
        return out

    def eps(self, v):
        s = 0
        for i, x in v.items():
            s += x * self.aug.get(i, 0)
        return self.F.norm(s)


def dual_numbers(field=QQ):
    R = ChainComplex(["1", "t"], [0, 0], None, field)
    return ArtinianAlgebra(R, {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}}, {0: 1}, {0: 1}, "k[t]/t^2")


def product_kk(field=QQ):
    """k × k with idempotent basis e1, e2 and augmentation the first projection."""
    R = ChainComplex(["e1", "e2"], [0, 0], None, field)
    return ArtinianAlgebra(R, {(0, 0): {0: 1}, (1, 1): {1: 1}}, {0: 1, 1: 1}, {0: 1}, "k×k")


def square_zero_ext(A, field=None, name=None):
    """k ⋉ A: basis 1 followed by the basis of A, all products in A zero."""
    F = field or A.F
    labels = ["1"] + [("A", l) for l in A.labels]
    degs = [0] + list(A.degrees)
    d = [{}] + [{j + 1: x for j, x in img.items()} for img in A.d]
    R = ChainComplex(labels, degs, d, F, check=False)
    mult = {(0, 0): {0: 1}}
    for i in range(len(A.labels)):
        mult[(0, i + 1)] = {i + 1: 1}
        mult[(i + 1, 0)] = {i + 1: 1}
    return ArtinianAlgebra(R, mult, {0: 1}, {0: 1}, name or "k⋉A")


class ArtinianWitness:
    def __init__(self, ok, reason=None, detail=None):
        self.ok = ok
        self.reason = reason
        self.detail = detail

    def __bool__(self):
        return self.ok

    def __repr__(self):
        return "ArtinianWitness(%s%s)" % (self.ok, "" if self.ok else ", %s" % self.reason)


def is_artinian(Ra):
    """Axioms, finiteness and locality of π_0 (ker π_0(ε) nilpotent)."""
    R, F = Ra.R, Ra.F
    n = len(R.labels)
    degs = R.degrees
    basis = [{i: 1} for i in range(n)]
    for i, j in product(range(n), repeat=2):
        ij = Ra.mul(basis[i], basis[j])
        for k in ij:
            if degs[k] != degs[i] + degs[j]:
                return ArtinianWitness(False, "degree", (i, j))
        ji = Ra.mul(basis[j], basis[i])
        if vadd(dict(ij), ji, -_sgn(degs[i] * degs[j]), F):
            return ArtinianWitness(False, "commutativity", (i, j))
        lhs = R.apply_d(ij)
        rhs = vadd(Ra.mul(R.d[i], basis[j]), Ra.mul(basis[i], R.d[j]), _sgn(degs[i]), F)
        if vadd(dict(lhs), rhs, -1, F):
            return ArtinianWitness(False, "leibniz", (i, j))
        if F.norm(Ra.eps(ij) - Ra.eps(basis[i]) * Ra.eps(basis[j])):
            return ArtinianWitness(False, "augmentation", (i, j))
        for k in range(n):
            a = Ra.mul(ij, basis[k])
            b = Ra.mul(basis[i], Ra.mul(basis[j], basis[k]))
            if vadd(dict(a), b, -1, F):
                return ArtinianWitness(False, "associativity", (i, j, k))
    for i in range(n):
        if Ra.mul(Ra.unit, basis[i]) != basis[i] or Ra.mul(basis[i], Ra.unit) != basis[i]:
            return ArtinianWitness(False, "unit", (i,))
    if F.norm(Ra.eps(Ra.unit) - 1):
        return ArtinianWitness(False, "augmentation", ("unit",))
    for i in range(n):
        if degs[i] != 0 and Ra.aug.get(i):
            return ArtinianWitness(False, "augmentation", ("degree", i))
        if Ra.aug.get(i) and R.d[i]:
            return ArtinianWitness(False, "augmentation", ("chain", i))
    # π_0 = Z_0 / B_0; m = kernel of ε on it
    z0 = [i for i in range(n) if degs[i] == 0]
    one = [i for i in range(n) if degs[i] == 1]
    cycles = kernel([R.d[i] for i in z0], F, len(z0))
    cycles = [{z0[k]: x for k, x in v.items()} for v in cycles]
    bounds = [R.d[i] for i in one]
    m = []
    for v in cycles:
        e = Ra.eps(v)
        if e:
            v = vadd(dict(v), Ra.unit, -e, F)
        if v:
            m.append(v)

    def span_mod_b(vs):
        E = Echelon(F)
        for b in bounds:
            E.add(b)
        base = E.rank
        for v in vs:
            E.add(v)
        return E.rank - base

    power = m
    for _ in range(n + 1):
        if span_mod_b(power) == 0:
            return ArtinianWitness(True)
        power = [Ra.mul(a, b) for a in power for b in m]
        power = [v for v in power if v]
    return ArtinianWitness(False, "not local", "maximal ideal of π_0 is not nilpotent")


# ---------------------------------------------------------------------------
# the linear system

class _System:
    def __init__(self, P, shifts, top):
        self.P = P
        self.F = P.F
        self.shifts = list(shifts)
        self.top = top
        self.var = {}
        self.rows = []

    def v(self, key):
        k = self.var.get(key)
        if k is None:
            k = len(self.var)
            self.var[key] = k
        return k

    # symbolic vectors: dict target basis index -> row
    def delta(self, a, seq, vec):
        P = self.P
        L = P.level(seq)
        e = self.shifts[a]
        out = {}
        for i, x in vec.items():
            want = L.degrees[i] - 1 - e
            for t in range(len(L.labels)):
                if L.degrees[t] == want:
                    out.setdefault(t, {})
                    vadd(out[t], {self.v(("d", a, seq, i, t)): x}, 1, self.F)
        return out

    def gamma(self, a, s1, v1, slot, s2, v2):
        P = self.P
        s12 = substitute(s1, slot, s2)
        L12 = P.level(s12)
        e = self.shifts[a]
        out = {}
        for i, x in v1.items():
            for j, y in v2.items():
                want = P.level(s1).degrees[i] + P.level(s2).degrees[j] - e
                for t in range(len(L12.labels)):
                    if L12.degrees[t] == want:
                        out.setdefault(t, {})
                        vadd(out[t], {self.v(("g", a, s1, i, slot, s2, j, t)): x * y}, 1, self.F)
        return out

    def sym_apply(self, S, fn):
        out = {}
        for t, row in S.items():
            for u, c in fn(t).items():
                out.setdefault(u, {})
                vadd(out[u], row, c, self.F)
        return out

    def emit(self, *terms):
        """Σ coeff·S = 0 coordinatewise; terms are (coeff, S)."""
        acc = {}
        for c, S in terms:
            for t, row in S.items():
                acc.setdefault(t, {})
                vadd(acc[t], row, c, self.F)
        for row in acc.values():
            if row:
                self.rows.append(row)


def _ok(P, top, *ns):
    return all(n <= top and P.available(n) for n in ns)


def _build(P, shifts, top):
    S = _System(P, shifts, top)
    seqs = [s for s in P.all_seqs(top)]
    by_out = {}
    for s in seqs:
        by_out.setdefault(s[1], []).append(s)
    for a in range(len(shifts)):
        e = shifts[a]
        for seq in seqs:
            L = P.level(seq)
            n = arity(seq)
            for i in range(len(L.labels)):
                # dδ + δd = 0
                S.emit((1, S.sym_apply(S.delta(a, seq, {i: 1}), lambda t, L=L: L.d[t])),
                       (1, S.delta(a, seq, L.d[i])))
                # δ equivariant
                for q in range(n - 1):
                    p = perms.transposition(n, q)
                    s2, v = P.act(seq, {i: 1}, p)
                    S.emit((1, S.delta(a, s2, v)),
                           (-1, S.sym_apply(S.delta(a, seq, {i: 1}), lambda t, seq=seq, p=p: P.act_basis(seq, t, p))))
        for s1 in seqs:
            n1 = arity(s1)
            L1 = P.level(s1)
            for slot in range(n1):
                for s2 in by_out.get(s1[0][slot], []):
                    n2 = arity(s2)
                    if not _ok(P, top, n1 + n2 - 1):
                        continue
                    L2 = P.level(s2)
                    s12 = substitute(s1, slot, s2)
                    L12 = P.level(s12)
                    for i, j in product(range(len(L1.labels)), range(len(L2.labels))):
                        di, dj = L1.degrees[i], L2.degrees[j]
                        g = S.gamma(a, s1, {i: 1}, slot, s2, {j: 1})
                        # d' a derivation of ∘'
                        S.emit((1, S.sym_apply(g, lambda t, L12=L12: L12.d[t])),
                               (1, S.sym_apply(S.delta(a, s12, P.compose_basis(s1, i, slot, s2, j)), lambda t: {t: 1})),
                               (-1, S.gamma(a, s1, L1.d[i], slot, s2, {j: 1})),
                               (-_sgn(e * dj), S.sym_apply(S.delta(a, s1, {i: 1}),
                                                           lambda t, s1=s1, slot=slot, s2=s2, j=j: P.compose_basis(s1, t, slot, s2, j))),
                               (-_sgn(di), S.gamma(a, s1, {i: 1}, slot, s2, L2.d[j])),
                               (-_sgn(di), S.sym_apply(S.delta(a, s2, {j: 1}),
                                                       lambda t, s1=s1, i=i, slot=slot, s2=s2: P.compose_basis(s1, i, slot, s2, t))))
                        # units stay units
                        if n1 == 1 and s1[0][0] == s1[1] and i == P.unit(s1[1]):
                            S.emit((1, g))
                        if n2 == 1 and s2[0][0] == s2[1] and j == P.unit(s2[1]):
                            S.emit((1, g))
                        # equivariance in the first factor
                        for q in range(n1 - 1):
                            p = perms.transposition(n1, q)
                            aa = perms.inverse(p)[slot]
                            sx, vx = P.act(s1, {i: 1}, p)
                            sizes = [n2 if k == slot else 1 for k in range(n1)]
                            bp = perms.block_perm(p, sizes)
                            S.emit((1, S.gamma(a, sx, vx, aa, s2, {j: 1})),
                                   (-1, S.sym_apply(g, lambda t, s12=s12, bp=bp: P.act_basis(s12, t, bp))))
                        # equivariance in the second factor
                        for q in range(n2 - 1):
                            p = perms.transposition(n2, q)
                            sy, vy = P.act(s2, {j: 1}, p)
                            big = list(range(n1 + n2 - 1))
                            big[slot:slot + n2] = [slot + r for r in p]
                            big = tuple(big)
                            S.emit((1, S.gamma(a, s1, {i: 1}, slot, sy, vy)),
                                   (-1, S.sym_apply(g, lambda t, s12=s12, big=big: P.act_basis(s12, t, big))))
                    # associativity
                    for i, j in product(range(len(L1.labels)), range(len(L2.labels))):
                        if not L2.labels:
                            continue
                        xy = P.compose_basis(s1, i, slot, s2, j)
                        g12 = S.gamma(a, s1, {i: 1}, slot, s2, {j: 1})
                        for t in range(n2):
                            for s3 in by_out.get(s2[0][t], []):
                                n3 = arity(s3)
                                if not _ok(P, top, n2 + n3 - 1, n1 + n2 + n3 - 2):
                                    continue
                                s23 = substitute(s2, t, s3)
                                for k in range(P.dim(s3)):
                                    dk = P.level(s3).degrees[k]
                                    yz = P.compose_basis(s2, j, t, s3, k)
                                    S.emit((1, S.gamma(a, s12, xy, slot + t, s3, {k: 1})),
                                           (_sgn(e * dk), S.sym_apply(g12, lambda w, s12=s12, st=slot + t, s3=s3, k=k:
                                                                      P.compose_basis(s12, w, st, s3, k))),
                                           (-1, S.gamma(a, s1, {i: 1}, slot, s23, yz)),
                                           (-1, S.sym_apply(S.gamma(a, s2, {j: 1}, t, s3, {k: 1}),
                                                            lambda w, s1=s1, i=i, slot=slot, s23=s23:
                                                            P.compose_basis(s1, i, slot, s23, w))))
                        for u in range(slot + 1, n1):
                            for s3 in by_out.get(s1[0][u], []):
                                n3 = arity(s3)
                                if not _ok(P, top, n1 + n3 - 1, n1 + n2 + n3 - 2):
                                    continue
                                s13 = substitute(s1, u, s3)
                                for k in range(P.dim(s3)):
                                    dj = L2.degrees[j]
                                    dk = P.level(s3).degrees[k]
                                    xz = P.compose_basis(s1, i, u, s3, k)
                                    g13 = S.gamma(a, s1, {i: 1}, u, s3, {k: 1})
                                    sg = _sgn(dj * dk)
                                    S.emit((1, S.gamma(a, s12, xy, u + n2 - 1, s3, {k: 1})),
                                           (_sgn(e * dk), S.sym_apply(g12, lambda w, s12=s12, uu=u + n2 - 1, s3=s3, k=k:
                                                                      P.compose_basis(s12, w, uu, s3, k))),
                                           (-sg, S.gamma(a, s13, xz, slot, s2, {j: 1})),
                                           (-sg * _sgn(e * dj), S.sym_apply(g13, lambda w, s13=s13, slot=slot, s2=s2, j=j:
                                                                            P.compose_basis(s13, w, slot, s2, j))))
    return S


def _gauge_images(S):
    """Images of the equivariant gauge parameters ξ, as vectors over S.var."""
    P, F, top = S.P, S.F, S.top
    seqs = list(P.all_seqs(top))
    xvar = {}
    for a, e in enumerate(S.shifts):
        for seq in seqs:
            L = P.level(seq)
            for i in range(len(L.labels)):
                if arity(seq) == 1 and seq[0][0] == seq[1] and i == P.unit(seq[1]):
                    continue
                for t in range(len(L.labels)):
                    if L.degrees[t] == L.degrees[i] - e:
                        xvar[(a, seq, i, t)] = len(xvar)
    # equivariance of ξ
    rows = []
    for a in range(len(S.shifts)):
        for seq in seqs:
            n = arity(seq)
            L = P.level(seq)
            for i in range(len(L.labels)):
                for q in range(n - 1):
                    p = perms.transposition(n, q)
                    s2, v = P.act(seq, {i: 1}, p)
                    acc = {}
                    for i2, x in v.items():
                        for t in range(P.dim(s2)):
                            kk = xvar.get((a, s2, i2, t))
                            if kk is not None:
                                acc.setdefault(t, {})
                                vadd(acc[t], {kk: x}, 1, F)
                    for t in range(len(L.labels)):
                        kk = xvar.get((a, seq, i, t))
                        if kk is None:
                            continue
                        for u, c in P.act_basis(seq, t, p).items():
                            acc.setdefault(u, {})
                            vadd(acc[u], {kk: c}, -1, F)
                    rows.extend(r for r in acc.values() if r)
    xis = nullspace(rows, len(xvar), F)
    names = sorted(xvar, key=xvar.get)
    images = []
    for xi in xis:
        table = {}
        for kk, x in xi.items():
            a, seq, i, t = names[kk]
            table.setdefault((a, seq, i), {})[t] = x

        def X(a, seq, vec):
            out = {}
            for i, x in vec.items():
                vadd(out, table.get((a, seq, i), {}), x, F)
            return out

        img = {}
        for key, k in S.var.items():
            if key[0] == "d":
                _, a, seq, i, t = key
                L = P.level(seq)
                # δ_ξ = ξd - dξ
                val = vadd(X(a, seq, L.d[i]), L.apply_d(X(a, seq, {i: 1})), -1, F)
            else:
                _, a, s1, i, slot, s2, j, t = key
                e = S.shifts[a]
                dj = P.level(s2).degrees[j]
                # γ_ξ = ξ(x∘y) - ξx∘y - x∘ξy
                val = X(a, substitute(s1, slot, s2), P.compose_basis(s1, i, slot, s2, j))
                _, w = P.compose(s1, X(a, s1, {i: 1}), slot, s2, {j: 1})
                vadd(val, w, -_sgn(e * dj), F)
                _, w = P.compose(s1, {i: 1}, slot, s2, X(a, s2, {j: 1}))
                vadd(val, w, -1, F)
            c = val.get(t)
            if c:
                img[k] = c
        images.append(img)
    return images


class Def1Space:
    def __init__(self, cocycles, gauge_rank, representatives, shifts, nvars):
        self.cocycles = cocycles
        self.gauge_rank = gauge_rank
        self.representatives = representatives
        self.shifts = shifts
        self.nvars = nvars

    @property
    def dim(self):
        return len(self.cocycles) - self.gauge_rank

    def __repr__(self):
        return "Def1Space(dim=%d, cocycles=%d, gauge=%d)" % (self.dim, len(self.cocycles), self.gauge_rank)


def _solve(P, shifts, top):
    top = P.ceiling if top is None else top
    S = _build(P, shifts, top)
    coc = nullspace(S.rows, len(S.var), S.F)
    return S, coc


def def1_cocycles(P, top=None):
    _, coc = _solve(P, [0], top)
    return coc


def _quotient(P, shifts, top):
    F = P.F
    S, coc = _solve(P, shifts, top)
    gauge = _gauge_images(S)
    # boundaries are cocycles
    for g in gauge:
        for row in S.rows:
            acc = 0
            for k, x in row.items():
                c = g.get(k)
                if c:
                    acc += c * x
            if F.norm(acc):
                raise AssertionError("gauge image is not a cocycle")
    E = Echelon(F)
    for g in gauge:
        E.add(g)
    r = E.rank
    reps = []
    for v in coc:
        if E.add(v):
            reps.append(v)
    if len(coc) - r != len(reps):
        raise AssertionError("rank-nullity mismatch in def1")
    return Def1Space(coc, r, reps, shifts, len(S.var))


def def1_space(P, top=None):
    return _quotient(P, [0], top)


def def1_direction(P, A, top=None):
    """First-order deformations over k ⋉ A, A a complex with zero differential."""
    if not A.is_zero_differential():
        raise NotImplementedError("directions with a differential are not supported")
    if A.labels and min(A.degrees) < 0:
        raise ValueError("direction must be connective")
    if not A.labels:
        return Def1Space([], 0, [], [], 0)
    return _quotient(P, list(A.degrees), top)


def direction(dims, field=QQ):
    """A complex k^{dims[n]} in degree n with zero differential."""
    from .chaincore import from_dims
    return from_dims(dims, field)
