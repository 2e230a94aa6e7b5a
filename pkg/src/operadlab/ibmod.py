"""
Infinitesimal bimodules over an operad, the enriched category Ib^P and
the constructions living there: free objects, the cotangent object L̄_P,
tangent structures, derivations, Kähler differentials Ω_P and the strict
sequence Ω_P -> P∘₍₁₎P -> L̄_P.

Slots are 0-based.  left(s1, i, slot, s2, j) is μ∘^{slot ℓ} m for μ a
basis element of P(s1) and m of M(s2); right(s1, i, slot, s2, j) is
m∘^{slot r} ν with m in M(s1) and ν in P(s2).
"""

from itertools import product

from . import perms
from .category import CatModule, DgCategory
from .chaincore import ChainComplex, direct_sum, zero_complex
from .collection import Collection, arity, seq_act, substitute, unit_I
from .linalg import Quotient, nullspace, vadd, vscale
from .operads import AxiomReport, Operad, OperadMap, _max_entry


def _sgn(k):
    return -1 if k % 2 else 1


class IBimod(Collection):
    """
    Base class.  Subclasses implement _build_level, an action, and
    _left_basis / _right_basis.  Levels exist up to the ceiling.
    """

    name = "M"

    def __init__(self, P, ceiling=None):
        N = P.ceiling if ceiling is None else ceiling
        Collection.__init__(self, P.colors, P.F, N, max_arity=N, zero_above=False)
        self.P = P
        self._lact = {}
        self._ract = {}

    def _left_basis(self, s1, i, slot, s2, j):
        raise NotImplementedError

    def _right_basis(self, s1, i, slot, s2, j):
        raise NotImplementedError

    def left_basis(self, s1, i, slot, s2, j):
        key = (s1, i, slot, s2, j)
        r = self._lact.get(key)
        if r is None:
            if s1[0][slot] != s2[1]:
                raise ValueError("color mismatch")
            r = self._left_basis(s1, i, slot, s2, j)
            self._lact[key] = r
        return r

    def right_basis(self, s1, i, slot, s2, j):
        key = (s1, i, slot, s2, j)
        r = self._ract.get(key)
        if r is None:
            if s1[0][slot] != s2[1]:
                raise ValueError("color mismatch")
            r = self._right_basis(s1, i, slot, s2, j)
            self._ract[key] = r
        return r

    def left(self, s1, v1, slot, s2, v2):
        out = {}
        for i, x in v1.items():
            for j, y in v2.items():
                vadd(out, self.left_basis(s1, i, slot, s2, j), x * y, self.F)
        return substitute(s1, slot, s2), out

    def right(self, s1, v1, slot, s2, v2):
        out = {}
        for i, x in v1.items():
            for j, y in v2.items():
                vadd(out, self.right_basis(s1, i, slot, s2, j), x * y, self.F)
        return substitute(s1, slot, s2), out


# ---------------------------------------------------------------------------
# basic examples

class SelfIB(IBimod):
    """P^si: P acting on itself by composition."""

    def __init__(self, P, ceiling=None):
        IBimod.__init__(self, P, ceiling)
        self.name = "%s^si" % P.name

    def _build_level(self, seq):
        return self.P.level(seq)

    def act_basis(self, seq, i, p):
        return self.P.act_basis(seq, i, p)

    def _left_basis(self, s1, i, slot, s2, j):
        return self.P.compose_basis(s1, i, slot, s2, j)

    def _right_basis(self, s1, i, slot, s2, j):
        return self.P.compose_basis(s1, i, slot, s2, j)


def self_ib(P, ceiling=None):
    return SelfIB(P, ceiling)


class ZeroIB(IBimod):
    def _build_level(self, seq):
        return zero_complex(self.F)

    def act_basis(self, seq, i, p):
        return {}

    def _left_basis(self, s1, i, slot, s2, j):
        return {}

    def _right_basis(self, s1, i, slot, s2, j):
        return {}


class CotangentIB(IBimod):
    """
    L̄_P: level (c_1..c_m; c) is m labeled copies μ^{(k)} of P(c_1..c_m; c),
    the label k marking the input that carries the unit.  Basis index is
    k·dim P(seq) + μ.
    """

    def __init__(self, P, ceiling=None):
        IBimod.__init__(self, P, ceiling)
        self.name = "Lbar_%s" % P.name

    def _build_level(self, seq):
        L = self.P.level(seq)
        m = arity(seq)
        if not L.labels or m == 0:
            return zero_complex(self.F)
        n = len(L.labels)
        labels, degs, d = [], [], []
        for k in range(m):
            for i in range(n):
                labels.append((("lbl", k), L.labels[i]))
                degs.append(L.degrees[i])
                d.append({k * n + j: c for j, c in L.d[i].items()})
        return ChainComplex(labels, degs, d, self.F, check=False)

    def split(self, seq, idx):
        return divmod(idx, self.P.dim(seq))

    def act_basis(self, seq, idx, p):
        k, mu = self.split(seq, idx)
        s2, v = self.P.act(seq, {mu: 1}, p)
        k2 = perms.inverse(p)[k]
        n2 = self.P.dim(s2)
        return {k2 * n2 + j: c for j, c in v.items()}

    def _left_basis(self, s1, i, slot, s2, j):
        k, mu = self.split(s2, j)
        s12 = substitute(s1, slot, s2)
        if arity(s12) > self.ceiling:
            raise ValueError("action leaves the ceiling")
        v = self.P.compose_basis(s1, i, slot, s2, mu)
        n = self.P.dim(s12)
        lbl = slot + k
        return {lbl * n + a: c for a, c in v.items()}

    def _right_basis(self, s1, i, slot, s2, j):
        k, mu = self.split(s1, i)
        s12 = substitute(s1, slot, s2)
        if arity(s12) > self.ceiling:
            raise ValueError("action leaves the ceiling")
        v = self.P.compose_basis(s1, mu, slot, s2, j)
        n = self.P.dim(s12)
        r = arity(s2)
        if slot < k:
            lbls = [k + r - 1]
        elif slot > k:
            lbls = [k]
        else:
            lbls = [k + t for t in range(r)]
        out = {}
        for lbl in lbls:
            for a, c in v.items():
                out[lbl * n + a] = c
        return out

    def marked_unit(self, c):
        """Index of id_c^{(0)} in level ((c,), c)."""
        return self.P.unit(c)


def cotangent_ib(P, ceiling=None):
    return CotangentIB(P, ceiling)


class ShiftedIB(IBimod):
    """M[n]; μ∘^ℓ s^n m = (-1)^{n|μ|} s^n(μ∘^ℓ m)."""

    def __init__(self, M, n):
        IBimod.__init__(self, M.P, M.ceiling)
        self.M = M
        self.n = n
        self.name = "%s[%d]" % (M.name, n)

    def _build_level(self, seq):
        return self.M.level(seq).shift(self.n)

    def act_basis(self, seq, i, p):
        return self.M.act_basis(seq, i, p)

    def _left_basis(self, s1, i, slot, s2, j):
        v = self.M.left_basis(s1, i, slot, s2, j)
        if self.n % 2 and self.P.level(s1).degrees[i] % 2:
            return vscale(v, -1, self.F)
        return v

    def _right_basis(self, s1, i, slot, s2, j):
        return self.M.right_basis(s1, i, slot, s2, j)


def shift_ib(M, n):
    return ShiftedIB(M, n)


class DirectSumIB(IBimod):
    def __init__(self, parts):
        parts = list(parts)
        IBimod.__init__(self, parts[0].P, min(p.ceiling for p in parts))
        self.parts = parts
        self.name = " ⊕ ".join(p.name for p in parts)

    def _offsets(self, seq):
        out, t = [], 0
        for M in self.parts:
            out.append(t)
            t += M.dim(seq)
        return out

    def _split(self, seq, i):
        off = self._offsets(seq)
        for k in reversed(range(len(off))):
            if i >= off[k]:
                return k, i - off[k]
        raise IndexError(i)

    def _embed(self, seq, k, v):
        o = self._offsets(seq)[k]
        return {j + o: c for j, c in v.items()}

    def _build_level(self, seq):
        return direct_sum(*[M.level(seq) for M in self.parts])

    def act_basis(self, seq, i, p):
        k, a = self._split(seq, i)
        return self._embed(seq_act(seq, p), k, self.parts[k].act_basis(seq, a, p))

    def _left_basis(self, s1, i, slot, s2, j):
        k, b = self._split(s2, j)
        return self._embed(substitute(s1, slot, s2), k, self.parts[k].left_basis(s1, i, slot, s2, b))

    def _right_basis(self, s1, i, slot, s2, j):
        k, a = self._split(s1, i)
        return self._embed(substitute(s1, slot, s2), k, self.parts[k].right_basis(s1, a, slot, s2, j))


def direct_sum_ib(*parts):
    return DirectSumIB(parts)


class RestrictedIB(IBimod):
    """A Q-bimodule regarded over P along f: P -> Q."""

    def __init__(self, f, M):
        IBimod.__init__(self, f.source, M.ceiling)
        self.f = f
        self.M = M
        self.name = "%s|%s" % (M.name, f.name)
        self.colors = f.source.colors

    def _build_level(self, seq):
        return self.M.level(self.f.map_seq(seq))

    def act_basis(self, seq, i, p):
        return self.M.act_basis(self.f.map_seq(seq), i, p)

    def _left_basis(self, s1, i, slot, s2, j):
        fs = self.f.map_seq
        _, v = self.M.left(fs(s1), self.f.image_basis(s1, i), slot, fs(s2), {j: 1})
        return v

    def _right_basis(self, s1, i, slot, s2, j):
        fs = self.f.map_seq
        _, v = self.M.right(fs(s1), {i: 1}, slot, fs(s2), self.f.image_basis(s2, j))
        return v


def restrict_ib(f, M):
    if f.target is M.P:
        return RestrictedIB(f, M)
    raise ValueError("module is not over the target of the map")


# ---------------------------------------------------------------------------
# axioms

def check_ibmod(M, top=None):
    """All infinitesimal-bimodule axioms on basis instances of arity <= top."""
    P = M.P
    F = M.F
    top = M.ceiling if top is None else min(top, M.ceiling)
    rep = AxiomReport()
    seqs = [s for s in M.all_seqs(top)]
    pseqs = [s for s in P.all_seqs(top)]
    by_out = {}
    for s in pseqs:
        by_out.setdefault(s[1], []).append(s)
    for seq in seqs:
        L = M.level(seq)
        for i, img in enumerate(L.d):
            rep.checked += 1
            if L.apply_d(img):
                rep.add("d_squared", (seq, L.labels[i]))
    for a in M.check_actions(top):
        rep.add(a[0], a[1:])

    def ok(*ns):
        return all(0 <= n <= top and P.available(n) for n in ns)

    for seq in seqs:
        L = M.level(seq)
        c = seq[1]
        for i in range(len(L.labels)):
            rep.checked += 1
            _, v = M.left(P.identity_seq(c), P.unit_vec(c), 0, seq, {i: 1})
            if v != {i: 1}:
                rep.add("left_unit", (seq, L.labels[i]))
            for s in range(arity(seq)):
                cs = seq[0][s]
                rep.checked += 1
                _, v = M.right(seq, {i: 1}, s, P.identity_seq(cs), P.unit_vec(cs))
                if v != {i: 1}:
                    rep.add("right_unit", (seq, L.labels[i], s))

    # chain property and equivariance of both actions
    for s1 in pseqs:
        L1 = P.level(s1)
        n1 = arity(s1)
        for slot in range(n1):
            for s2 in seqs:
                if s2[1] != s1[0][slot] or not ok(n1 + arity(s2) - 1):
                    continue
                L2 = M.level(s2)
                s12 = substitute(s1, slot, s2)
                L12 = M.level(s12)
                for i in range(len(L1.labels)):
                    for j in range(len(L2.labels)):
                        rep.checked += 1
                        v = M.left_basis(s1, i, slot, s2, j)
                        _, a = M.left(s1, L1.d[i], slot, s2, {j: 1})
                        _, b = M.left(s1, {i: 1}, slot, s2, L2.d[j])
                        diff = vadd(vadd(dict(L12.apply_d(v)), a, -1, F), b, -_sgn(L1.degrees[i]), F)
                        if diff:
                            rep.add("left_chain", (s1, i, slot, s2, j), _max_entry(diff))
                        diff = _equiv_defect(P.act, M.act, M.act, M.left, s1, i, slot, s2, j, v)
                        rep.checked += 1
                        if diff:
                            rep.add("left_equivariance", (s1, i, slot, s2, j), _max_entry(diff))
    for s1 in seqs:
        L1 = M.level(s1)
        n1 = arity(s1)
        for slot in range(n1):
            for s2 in by_out.get(s1[0][slot], []):
                if not ok(n1 + arity(s2) - 1):
                    continue
                L2 = P.level(s2)
                s12 = substitute(s1, slot, s2)
                L12 = M.level(s12)
                for i in range(len(L1.labels)):
                    for j in range(len(L2.labels)):
                        rep.checked += 1
                        v = M.right_basis(s1, i, slot, s2, j)
                        _, a = M.right(s1, L1.d[i], slot, s2, {j: 1})
                        _, b = M.right(s1, {i: 1}, slot, s2, L2.d[j])
                        diff = vadd(vadd(dict(L12.apply_d(v)), a, -1, F), b, -_sgn(L1.degrees[i]), F)
                        if diff:
                            rep.add("right_chain", (s1, i, slot, s2, j), _max_entry(diff))
                        diff = _equiv_defect(M.act, P.act, M.act, M.right, s1, i, slot, s2, j, v)
                        rep.checked += 1
                        if diff:
                            rep.add("right_equivariance", (s1, i, slot, s2, j), _max_entry(diff))

    # left associativity: (μ∘_i μ')∘^{(i+t)ℓ} m = μ∘^{iℓ}(μ'∘^{tℓ} m)
    for s1 in pseqs:
        n1 = arity(s1)
        L1 = P.level(s1)
        for slot in range(n1):
            for s2 in by_out.get(s1[0][slot], []):
                n2 = arity(s2)
                L2 = P.level(s2)
                if not L1.labels or not L2.labels:
                    continue
                for t in range(n2):
                    for s3 in seqs:
                        n3 = arity(s3)
                        if s3[1] != s2[0][t] or not ok(n1 + n2 - 1, n2 + n3 - 1, n1 + n2 + n3 - 2):
                            continue
                        L3 = M.level(s3)
                        s12 = substitute(s1, slot, s2)
                        s23 = substitute(s2, t, s3)
                        for i, j, k in product(range(len(L1.labels)), range(len(L2.labels)),
                                               range(len(L3.labels))):
                            rep.checked += 1
                            _, a = M.left(s12, P.compose_basis(s1, i, slot, s2, j), slot + t, s3, {k: 1})
                            _, b = M.left(s1, {i: 1}, slot, s23, M.left_basis(s2, j, t, s3, k))
                            diff = vadd(dict(a), b, -1, F)
                            if diff:
                                rep.add("left_associativity", (s1, i, slot, s2, j, t, s3, k), _max_entry(diff))

    # right module axioms
    for s1 in seqs:
        n1 = arity(s1)
        L1 = M.level(s1)
        if not L1.labels:
            continue
        for slot in range(n1):
            for s2 in by_out.get(s1[0][slot], []):
                n2 = arity(s2)
                L2 = P.level(s2)
                if not L2.labels or not ok(n1 + n2 - 1):
                    continue
                s12 = substitute(s1, slot, s2)
                for t in range(n2):
                    for s3 in by_out.get(s2[0][t], []):
                        n3 = arity(s3)
                        if not ok(n2 + n3 - 1, n1 + n2 + n3 - 2):
                            continue
                        L3 = P.level(s3)
                        s23 = substitute(s2, t, s3)
                        for i, j, k in product(range(len(L1.labels)), range(len(L2.labels)),
                                               range(len(L3.labels))):
                            rep.checked += 1
                            _, a = M.right(s12, M.right_basis(s1, i, slot, s2, j), slot + t, s3, {k: 1})
                            _, b = M.right(s1, {i: 1}, slot, s23, P.compose_basis(s2, j, t, s3, k))
                            diff = vadd(dict(a), b, -1, F)
                            if diff:
                                rep.add("right_sequential", (s1, i, slot, s2, j, t, s3, k), _max_entry(diff))
                for u in range(slot + 1, n1):
                    for s3 in by_out.get(s1[0][u], []):
                        n3 = arity(s3)
                        if not ok(n1 + n3 - 1, n1 + n2 + n3 - 2):
                            continue
                        L3 = P.level(s3)
                        s13 = substitute(s1, u, s3)
                        for i, j, k in product(range(len(L1.labels)), range(len(L2.labels)),
                                               range(len(L3.labels))):
                            rep.checked += 1
                            _, a = M.right(s12, M.right_basis(s1, i, slot, s2, j), u + n2 - 1, s3, {k: 1})
                            _, b = M.right(s13, M.right_basis(s1, i, u, s3, k), slot, s2, {j: 1})
                            sg = _sgn(L2.degrees[j] * L3.degrees[k])
                            diff = vadd(dict(a), b, -sg, F)
                            if diff:
                                rep.add("right_parallel", (s1, i, slot, s2, j, u, s3, k), _max_entry(diff))

    # compatibility of the two actions
    for s1 in pseqs:
        n1 = arity(s1)
        L1 = P.level(s1)
        if not L1.labels:
            continue
        for slot in range(n1):
            for s2 in seqs:
                n2 = arity(s2)
                if s2[1] != s1[0][slot] or not ok(n1 + n2 - 1):
                    continue
                L2 = M.level(s2)
                if not L2.labels:
                    continue
                s12 = substitute(s1, slot, s2)
                # inside the module block
                for t in range(n2):
                    for s3 in by_out.get(s2[0][t], []):
                        n3 = arity(s3)
                        if not ok(n2 + n3 - 1, n1 + n2 + n3 - 2):
                            continue
                        L3 = P.level(s3)
                        s23 = substitute(s2, t, s3)
                        for i, j, k in product(range(len(L1.labels)), range(len(L2.labels)),
                                               range(len(L3.labels))):
                            rep.checked += 1
                            _, a = M.right(s12, M.left_basis(s1, i, slot, s2, j), slot + t, s3, {k: 1})
                            _, b = M.left(s1, {i: 1}, slot, s23, M.right_basis(s2, j, t, s3, k))
                            diff = vadd(dict(a), b, -1, F)
                            if diff:
                                rep.add("compatibility_inner", (s1, i, slot, s2, j, t, s3, k), _max_entry(diff))
                # at another input of μ
                for u in range(n1):
                    if u == slot:
                        continue
                    for s3 in by_out.get(s1[0][u], []):
                        n3 = arity(s3)
                        if not ok(n1 + n3 - 1, n1 + n2 + n3 - 2):
                            continue
                        L3 = P.level(s3)
                        s13 = substitute(s1, u, s3)
                        u2 = u + n2 - 1 if u > slot else u
                        slot2 = slot + n3 - 1 if u < slot else slot
                        for i, j, k in product(range(len(L1.labels)), range(len(L2.labels)),
                                               range(len(L3.labels))):
                            rep.checked += 1
                            _, a = M.right(s12, M.left_basis(s1, i, slot, s2, j), u2, s3, {k: 1})
                            _, b = M.left(s13, P.compose_basis(s1, i, u, s3, k), slot2, s2, {j: 1})
                            sg = _sgn(L2.degrees[j] * L3.degrees[k])
                            diff = vadd(dict(a), b, -sg, F)
                            if diff:
                                rep.add("compatibility_outer", (s1, i, slot, s2, j, u, s3, k), _max_entry(diff))
    return rep


def _equiv_defect(act1, act2, act12, op, s1, i, slot, s2, j, xy):
    """
    Equivariance of a partial operation op against adjacent transpositions;
    act1, act2 act on the factors and act12 on the result.
    """
    n1, n2 = arity(s1), arity(s2)
    s12 = substitute(s1, slot, s2)
    for t in range(n1 - 1):
        p = perms.transposition(n1, t)
        a = perms.inverse(p)[slot]
        sx, vx = act1(s1, {i: 1}, p)
        _, lhs = op(sx, vx, a, s2, {j: 1})
        sizes = [n2 if k == slot else 1 for k in range(n1)]
        _, rhs = act12(s12, xy, perms.block_perm(p, sizes))
        diff = {k: v for k, v in lhs.items()}
        for k, v in rhs.items():
            diff[k] = diff.get(k, 0) - v
            if not diff[k]:
                del diff[k]
        if diff:
            return diff
    for t in range(n2 - 1):
        p = perms.transposition(n2, t)
        sy, vy = act2(s2, {j: 1}, p)
        _, lhs = op(s1, {i: 1}, slot, sy, vy)
        big = list(range(n1 + n2 - 1))
        big[slot:slot + n2] = [slot + q for q in p]
        _, rhs = act12(s12, xy, tuple(big))
        diff = dict(lhs)
        for k, v in rhs.items():
            diff[k] = diff.get(k, 0) - v
            if not diff[k]:
                del diff[k]
        if diff:
            return diff
    return {}


# ---------------------------------------------------------------------------
# the category Ib^P

def _fibers(f, n):
    fib = [[] for _ in range(n + 1)]
    for j, v in enumerate(f):
        fib[v].append(j)
    return fib


def _plug(op, seq, vec, start, items, F):
    """
    x∘(y_1, ..., y_r) at consecutive slots start, start+1, ... with items
    (seq, vec, degree) or None for an identity.  Nullary and unary items
    go in first so that intermediate arities never exceed the final one;
    the reordering costs a Koszul sign.
    """
    r = len(items)
    ar = [1 if it is None else arity(it[0]) for it in items]
    order = sorted(range(r), key=lambda k: min(ar[k], 2))
    degs = [0 if it is None else it[2] for it in items]
    sign = perms.koszul_sign(tuple(order), degs) if any(x % 2 for x in degs) else 1
    done = [False] * r
    for k in order:
        it = items[k]
        if it is not None:
            pos = start + sum(ar[j] if done[j] else 1 for j in range(k))
            seq, vec = op(seq, vec, pos, it[0], it[1])
        done[k] = True
    if sign < 0:
        vec = vscale(vec, -1, F)
    return seq, vec


class IbCategory(DgCategory):
    """
    Objects: C-sequences of arity <= N.  A basis morphism s -> t (arities
    n, m) is (f, μ, (ν_1..ν_n)) with f: positions of t -> {0 (base), 1..n},
    μ in P(c, d_{f^{-1}(0)}; d) and ν_i in P(d_{f^{-1}(i)}; c_i), fibers in
    increasing order.  x·(f, μ, ν) = μ∘_0 (x∘(ν_1..ν_n)) with inputs sorted
    back into the order of t.
    """

    def __init__(self, P, N=None):
        N = P.ceiling if N is None else N
        if not P.available(N + 1):
            raise ValueError("Ib^P with ceiling %d needs P up to arity %d" % (N, N + 1))
        objs = [s for n in range(N + 1) for s in P.seqs(n)]
        DgCategory.__init__(self, objs, P.F)
        self.P = P
        self.N = N
        self._entries = {}
        self._index = {}
        self._fdata = {}

    def fdata(self, s, t, f):
        key = (s, t, f)
        r = self._fdata.get(key)
        if r is None:
            n = arity(s)
            cs, c = s
            ds, d = t
            fib = _fibers(f, n)
            rseq = ((c,) + tuple(ds[j] for j in fib[0]), d)
            nseqs = [(tuple(ds[j] for j in fib[i + 1]), cs[i]) for i in range(n)]
            r = (fib, rseq, nseqs)
            self._fdata[key] = r
        return r

    def _build_mor(self, s, t):
        P = self.P
        n, m = arity(s), arity(t)
        labels, degs, entries, factors = [], [], [], []
        for f in product(range(n + 1), repeat=m):
            fib, rseq, nseqs = self.fdata(s, t, f)
            Ls = [P.level(rseq)] + [P.level(q) for q in nseqs]
            if any(not L.labels for L in Ls):
                continue
            for combo in product(*[range(len(L.labels)) for L in Ls]):
                entries.append((f, combo[0], tuple(combo[1:])))
                labels.append(("f", f, Ls[0].labels[combo[0]],
                               tuple(L.labels[k] for L, k in zip(Ls[1:], combo[1:]))))
                degs.append(sum(L.degrees[k] for L, k in zip(Ls, combo)))
                factors.append(Ls)
        index = {e: k for k, e in enumerate(entries)}
        d = []
        for e, Ls in zip(entries, factors):
            f, mu, nus = e
            combo = (mu,) + nus
            img = {}
            before = 0
            for b, L in enumerate(Ls):
                for k2, c in L.d[combo[b]].items():
                    new = combo[:b] + (k2,) + combo[b + 1:]
                    key = (f, new[0], tuple(new[1:]))
                    vadd(img, {index[key]: c * _sgn(before)}, 1, self.F)
                before += L.degrees[combo[b]]
            d.append(img)
        self._entries[(s, t)] = entries
        self._index[(s, t)] = index
        return ChainComplex(labels, degs, d, self.F, check=False)

    def entries(self, s, t):
        self.mor(s, t)
        return self._entries[(s, t)]

    def index(self, s, t, entry):
        self.mor(s, t)
        return self._index[(s, t)][entry]

    def _tensor_to_mor(self, s, t, f, root, nuvecs, coeff=1):
        """Expand μ ⊗ ν_1 ⊗ ... (vectors) into a vector of D(s, t)."""
        self.mor(s, t)
        idx = self._index[(s, t)]
        out = {}
        F = self.F
        for combo in product(root.items(), *[v.items() for v in nuvecs]):
            c = coeff
            for _, x in combo:
                c = c * x
            key = (f, combo[0][0], tuple(k for k, _ in combo[1:]))
            vadd(out, {idx[key]: c}, 1, F)
        return out

    def unit(self, s):
        n = arity(s)
        P = self.P
        e = (tuple(range(1, n + 1)), P.unit(s[1]), tuple(P.unit(c) for c in s[0]))
        return self.index(s, s, e)

    def _compose_basis(self, s, t, u, a, b):
        P = self.P
        f, mu, nus = self.entries(s, t)[a]
        f2, mu2, nus2 = self.entries(t, u)[b]
        n, l = arity(s), arity(u)
        fib, rseq, nseqs = self.fdata(s, t, f)
        fib2, rseq2, nseqs2 = self.fdata(t, u, f2)
        h = tuple(0 if f2[k] == 0 else f[f2[k] - 1] for k in range(l))
        # Koszul sign of [μ, ν.., μ', ν'..] -> [μ', μ, ν'_{fib0}.., ν_1, ν'_{fib1}.., ...]
        degs = [P.level(rseq).degrees[mu]] + [P.level(q).degrees[k] for q, k in zip(nseqs, nus)]
        degs += [P.level(rseq2).degrees[mu2]] + [P.level(q).degrees[k] for q, k in zip(nseqs2, nus2)]
        sign = 1
        if any(x % 2 for x in degs):
            order = [n + 1, 0] + [n + 2 + j for j in fib[0]]
            for i in range(1, n + 1):
                order.append(i)
                order.extend(n + 2 + j for j in fib[i])
            sign = perms.koszul_sign(tuple(order), degs)
        def item(j):
            q = nseqs2[j]
            return (q, {nus2[j]: 1}, P.level(q).degrees[nus2[j]])

        nuvecs = []
        for i in range(n):
            labels = []
            for j in fib[i + 1]:
                labels += fib2[j + 1]
            sq, v = _plug(P.compose, nseqs[i], {nus[i]: 1}, 0, [item(j) for j in fib[i + 1]], self.F)
            sq, v, _ = P.sort_inputs(sq, v, labels)
            nuvecs.append(v)
        labels = [-1]
        for j in fib[0]:
            labels += fib2[j + 1]
        sq, v = _plug(P.compose, rseq, {mu: 1}, 1, [item(j) for j in fib[0]], self.F)
        sq, v = P.compose(rseq2, {mu2: 1}, 0, sq, v)
        labels += fib2[0]
        sq, v, _ = P.sort_inputs(sq, v, labels)
        return self._tensor_to_mor(s, u, h, v, nuvecs, sign)

    # elementary morphisms
    def perm_morphism(self, s, p):
        """(s·p, index) with x·morphism = x·p."""
        t = seq_act(s, p)
        P = self.P
        e = (tuple(q + 1 for q in p), P.unit(s[1]), tuple(P.unit(c) for c in s[0]))
        return t, self.index(s, t, e)

    def right_morphism(self, s, slot, s2, nuvec):
        """(t, vector) acting as x ↦ x∘^{slot r} ν."""
        P = self.P
        t = substitute(s, slot, s2)
        k = arity(s2)
        f = tuple(list(range(1, slot + 1)) + [slot + 1] * k
                  + list(range(slot + 2, arity(s) + 1)))
        nuvecs = [nuvec if i == slot else {P.unit(c): 1} for i, c in enumerate(s[0])]
        return t, self._tensor_to_mor(s, t, f, {P.unit(s[1]): 1}, nuvecs)

    def left_morphism(self, s1, muvec, slot, s):
        """(t, vector) acting as x ↦ (-1)^{|x||μ|} μ∘^{slot ℓ} x."""
        P = self.P
        n1 = arity(s1)
        n = arity(s)
        t = substitute(s1, slot, s)
        pi = (slot,) + tuple(k for k in range(n1) if k != slot)
        _, mv = P.act(s1, muvec, pi)
        f = tuple([0] * slot + list(range(1, n + 1)) + [0] * (n1 - slot - 1))
        nuvecs = [{P.unit(c): 1} for c in s[0]]
        return t, self._tensor_to_mor(s, t, f, mv, nuvecs)


def ib_category(P, N=None):
    N = P.ceiling if N is None else N
    cache = P.__dict__.setdefault("_ib_cache", {})
    D = cache.get(N)
    if D is None:
        D = IbCategory(P, N)
        cache[N] = D
    return D


class IbFunctor(CatModule):
    """An infinitesimal bimodule seen as a module over Ib^P."""

    def __init__(self, M, D=None):
        CatModule.__init__(self, D or ib_category(M.P, M.ceiling))
        self.M = M

    def value(self, s):
        return self.M.level(s)

    def _act_basis(self, s, t, i, a):
        M, P, D = self.M, self.D.P, self.D
        f, mu, nus = D.entries(s, t)[a]
        fib, rseq, nseqs = D.fdata(s, t, f)
        cs, c = s
        items, labels = [], []
        for k in range(arity(s)):
            if len(fib[k + 1]) == 1 and nus[k] == P.unit(cs[k]) and nseqs[k] == ((cs[k],), cs[k]):
                items.append(None)
            else:
                items.append((nseqs[k], {nus[k]: 1}, P.level(nseqs[k]).degrees[nus[k]]))
            labels += fib[k + 1]
        cur_seq, cur = _plug(M.right, s, {i: 1}, 0, items, self.F)
        if not (not fib[0] and rseq == ((c,), c) and mu == P.unit(c)):
            cur_seq, cur = M.left(rseq, {mu: 1}, 0, cur_seq, cur)
        labels += fib[0]
        cur_seq, cur, _ = M.sort_inputs(cur_seq, cur, labels)
        if M.level(s).degrees[i] % 2 and P.level(rseq).degrees[mu] % 2:
            cur = vscale(cur, -1, self.F)
        return cur


def to_functor(M, D=None):
    if isinstance(M, FunctorIB):
        return M.functor
    return IbFunctor(M, D)


class FunctorIB(IBimod):
    """A module over Ib^P read back as an infinitesimal bimodule."""

    def __init__(self, Fn, name="M"):
        D = Fn.D
        IBimod.__init__(self, D.P, D.N)
        self.functor = Fn
        self.D = D
        self.name = name

    def _build_level(self, seq):
        return self.functor.value(seq)

    def act_basis(self, seq, i, p):
        t, a = self.D.perm_morphism(seq, p)
        return self.functor.act_basis(seq, t, i, a)

    def _left_basis(self, s1, i, slot, s2, j):
        t, vec = self.D.left_morphism(s1, {i: 1}, slot, s2)
        out = self.functor.act(s2, t, {j: 1}, vec)
        if self.P.level(s1).degrees[i] % 2 and self.level(s2).degrees[j] % 2:
            out = vscale(out, -1, self.F)
        return out

    def _right_basis(self, s1, i, slot, s2, j):
        t, vec = self.D.right_morphism(s1, slot, s2, {j: 1})
        return self.functor.act(s1, t, {i: 1}, vec)


def from_functor(Fn, name="M"):
    if isinstance(Fn, IbFunctor):
        return Fn.M
    return FunctorIB(Fn, name)


# ---------------------------------------------------------------------------
# free objects and Kähler differentials

class FreeFunctor(CatModule):
    """
    t ↦ (⊕_s X(s) ⊗ D(s, t)) / ([x·τ ⊗ φ] ~ [x ⊗ τφ]); raw basis (s, a, b).
    Subclasses may add relations through _extra_relations(t, raw_index).
    """

    def __init__(self, D, X):
        CatModule.__init__(self, D)
        if tuple(X.colors) != tuple(D.P.colors):
            raise ValueError("colorset mismatch")
        self.X = X
        self._raw = {}
        self._q = {}

    def _gen_seqs(self):
        return [s for s in self.D.objects if self.X.available(arity(s)) and self.X.dim(s)]

    def raw(self, t):
        r = self._raw.get(t)
        if r is None:
            D, X = self.D, self.X
            basis, degs = [], []
            for s in self._gen_seqs():
                XL = X.level(s)
                Dm = D.mor(s, t)
                for a in range(len(XL.labels)):
                    for b in range(len(Dm.labels)):
                        basis.append((s, a, b))
                        degs.append(XL.degrees[a] + Dm.degrees[b])
            r = (basis, {e: k for k, e in enumerate(basis)}, degs)
            self._raw[t] = r
        return r

    def raw_vec(self, t, s, xvec, mvec):
        """[x ⊗ φ] for vectors x in X(s), φ in D(s, t)."""
        idx = self.raw(t)[1]
        out = {}
        for a, x in xvec.items():
            for b, y in mvec.items():
                vadd(out, {idx[(s, a, b)]: x * y}, 1, self.F)
        return out

    def raw_act(self, t, u, rvec, mvec):
        """Right action of D(t, u) on raw vectors."""
        basis = self.raw(t)[0]
        out = {}
        F = self.F
        for k, x in rvec.items():
            s, a, b = basis[k]
            comp = self.D.compose(s, t, u, {b: 1}, mvec)
            vadd(out, self.raw_vec(u, s, {a: 1}, comp), x, F)
        return out

    def _relations(self, t):
        D, X = self.D, self.X
        rels = []
        for s in self._gen_seqs():
            n = arity(s)
            for tt in range(n - 1):
                p = perms.transposition(n, tt)
                s2, tau = D.perm_morphism(s, p)
                if not X.dim(s2):
                    continue
                Dm = D.mor(s2, t)
                for a in range(X.dim(s)):
                    _, xa = X.act(s, {a: 1}, p)
                    for b in range(len(Dm.labels)):
                        r = self.raw_vec(t, s2, xa, {b: 1})
                        comp = D.compose_basis(s, s2, t, tau, b)
                        vadd(r, self.raw_vec(t, s, {a: 1}, comp), -1, self.F)
                        if r:
                            rels.append(r)
        rels.extend(self._extra_relations(t))
        return rels

    def _extra_relations(self, t):
        return []

    def quotient(self, t):
        q = self._q.get(t)
        if q is None:
            basis, _, _ = self.raw(t)
            q = Quotient(len(basis), self._relations(t), self.F)
            self._q[t] = q
        return q

    def raw_d(self, t, k):
        s, a, b = self.raw(t)[0][k]
        XL = self.X.level(s)
        Dm = self.D.mor(s, t)
        out = self.raw_vec(t, s, XL.d[a], {b: 1})
        vadd(out, self.raw_vec(t, s, {a: 1}, Dm.d[b]), _sgn(XL.degrees[a]), self.F)
        return out

    def _build_value(self, t):
        basis, _, degs = self.raw(t)
        q = self.quotient(t)
        labels = [("free", basis[k][0], self.X.level(basis[k][0]).labels[basis[k][1]],
                   self.D.mor(basis[k][0], t).labels[basis[k][2]]) for k in q.free]
        d = [q.coords(self.raw_d(t, k)) for k in q.free]
        return ChainComplex(labels, [degs[k] for k in q.free], d, self.F, check=False)

    def _act_basis(self, t, u, i, a):
        k = self.quotient(t).free[i]
        return self.quotient(u).coords(self.raw_act(t, u, {k: 1}, {a: 1}))

    def generator(self, s, a):
        """Class of [x_a ⊗ id_s] in the value at s."""
        return self.quotient(s).coords(self.raw_vec(s, s, {a: 1}, {self.D.unit(s): 1}))

    def classes(self, t, rvec):
        return self.quotient(t).coords(rvec)


def free_ib(P, X, N=None):
    """Free^si(X) ≅ P∘₍₁₎(X∘P) as an infinitesimal bimodule."""
    if tuple(X.colors) != tuple(P.colors):
        raise ValueError("colorset mismatch")
    D = ib_category(P, P.ceiling if N is None else N)
    return FunctorIB(FreeFunctor(D, X), "Free(%s)" % getattr(X, "name", "X"))


def inf_composite_ib(P, N=None):
    """P∘₍₁₎P = Free^si(I_C), generated by g_c = [id_c ⊗ id]."""
    I = unit_I(P.colors, P.F, P.ceiling if N is None else N)
    M = free_ib(P, I, N)
    M.name = "%s∘(1)%s" % (P.name, P.name)
    return M


class KaehlerFunctor(FreeFunctor):
    """Ω_P = Free^si(P) modulo the Leibniz relations and their translates."""

    def __init__(self, D):
        FreeFunctor.__init__(self, D, D.P)
        self._leib = None

    def leibniz_generators(self):
        if self._leib is None:
            D, P = self.D, self.D.P
            N = D.N
            out = []
            seqs = [s for s in D.objects if P.dim(s)]
            for s1 in seqs:
                n1 = arity(s1)
                for slot in range(n1):
                    for s2 in seqs:
                        if s2[1] != s1[0][slot] or n1 + arity(s2) - 1 > N:
                            continue
                        s12 = substitute(s1, slot, s2)
                        for i in range(P.dim(s1)):
                            di = P.level(s1).degrees[i]
                            for j in range(P.dim(s2)):
                                dj = P.level(s2).degrees[j]
                                u = D.unit(s12)
                                r = self.raw_vec(s12, s12, P.compose_basis(s1, i, slot, s2, j), {u: 1})
                                _, lam = D.left_morphism(s1, {i: 1}, slot, s2)
                                vadd(r, self.raw_vec(s12, s2, {j: 1}, lam), -_sgn(di * dj), self.F)
                                _, rho = D.right_morphism(s1, slot, s2, {j: 1})
                                vadd(r, self.raw_vec(s12, s1, {i: 1}, rho), -1, self.F)
                                if r:
                                    out.append((s12, r))
            self._leib = out
        return self._leib

    def _extra_relations(self, t):
        rels = []
        D = self.D
        for s12, r in self.leibniz_generators():
            Dm = D.mor(s12, t)
            for b in range(len(Dm.labels)):
                v = self.raw_act(s12, t, r, {b: 1})
                if v:
                    rels.append(v)
        return rels

    def universal(self, s, a):
        """d(μ_a) in Ω_P(s)."""
        return self.generator(s, a)


def kaehler_ib(P, N=None):
    """(Ω_P, d) with d(seq, vec) the universal derivation."""
    D = ib_category(P, P.ceiling if N is None else N)
    K = KaehlerFunctor(D)
    Om = FunctorIB(K, "Omega_%s" % P.name)

    def d(seq, vec):
        out = {}
        for a, x in vec.items():
            vadd(out, K.universal(seq, a), x, P.F)
        return out

    return Om, d


# ---------------------------------------------------------------------------
# maps between bimodules

class IBimodMap:
    """Degree-0 map given per sequence by columns (images of basis vectors)."""

    def __init__(self, source, target, cols, name="f"):
        self.source = source
        self.target = target
        self.cols = dict(cols)
        self.name = name

    def column(self, seq, i):
        c = self.cols.get(seq)
        if c is None:
            return {}
        return c[i]

    def apply(self, seq, vec):
        out = {}
        for i, x in vec.items():
            vadd(out, self.column(seq, i), x, self.source.F)
        return out

    def is_zero(self):
        return all(not v for cs in self.cols.values() for v in cs)

    def compose(self, other, name=None):
        """self after other."""
        cols = {}
        for seq, cs in other.cols.items():
            cols[seq] = [self.apply(seq, v) for v in cs]
        return IBimodMap(other.source, self.target, cols, name or "%s∘%s" % (self.name, other.name))

    def check(self, top=None):
        M, N = self.source, self.target
        P = M.P
        F = M.F
        top = min(M.ceiling, N.ceiling) if top is None else top
        rep = AxiomReport()
        seqs = list(M.all_seqs(top))
        pseqs = list(P.all_seqs(top))
        for seq in seqs:
            L = M.level(seq)
            LN = N.level(seq)
            for i in range(len(L.labels)):
                rep.checked += 1
                img = self.column(seq, i)
                if any(LN.degrees[j] != L.degrees[i] for j in img):
                    rep.add("map_degree", (seq, i))
                if vadd(dict(LN.apply_d(img)), self.apply(seq, L.d[i]), -1, F):
                    rep.add("map_chain", (seq, i))
                for t in range(arity(seq) - 1):
                    p = perms.transposition(arity(seq), t)
                    s2, v = M.act(seq, {i: 1}, p)
                    _, w = N.act(seq, img, p)
                    rep.checked += 1
                    if vadd(self.apply(s2, v), w, -1, F):
                        rep.add("map_equivariance", (seq, i, t))
        for s1 in pseqs:
            for slot in range(arity(s1)):
                for s2 in seqs:
                    if s2[1] != s1[0][slot] or arity(s1) + arity(s2) - 1 > top:
                        continue
                    for i in range(P.dim(s1)):
                        for j in range(M.dim(s2)):
                            rep.checked += 1
                            s12, v = M.left(s1, {i: 1}, slot, s2, {j: 1})
                            _, w = N.left(s1, {i: 1}, slot, s2, self.column(s2, j))
                            if vadd(self.apply(s12, v), w, -1, F):
                                rep.add("map_left", (s1, i, slot, s2, j))
        for s1 in seqs:
            for slot in range(arity(s1)):
                for s2 in pseqs:
                    if s2[1] != s1[0][slot] or arity(s1) + arity(s2) - 1 > top:
                        continue
                    for i in range(M.dim(s1)):
                        for j in range(P.dim(s2)):
                            rep.checked += 1
                            s12, v = M.right(s1, {i: 1}, slot, s2, {j: 1})
                            _, w = N.right(s1, self.column(s1, i), slot, s2, {j: 1})
                            if vadd(self.apply(s12, v), w, -1, F):
                                rep.add("map_right", (s1, i, slot, s2, j))
        return rep


class _Rows:
    """Linear equations on unknowns x[(seq, a, b)], one row per target component."""

    def __init__(self, var):
        self.var = var
        self.rows = []

    def pre(self, rows, seq, vec, target_dim, c=1):
        # Σ_a vec[a] x[seq, a, ·] contributes to each target component
        var = self.var
        for a, x in vec.items():
            for comp in range(target_dim):
                k = var.get((seq, a, comp))
                if k is not None:
                    r = rows.setdefault(comp, {})
                    r[k] = r.get(k, 0) + c * x
        return rows

    def post(self, rows, seq, a, op, src_dim, c=1):
        # op applied to x[seq, a, ·]
        var = self.var
        for b in range(src_dim):
            k = var.get((seq, a, b))
            if k is None:
                continue
            for comp, x in op(b).items():
                r = rows.setdefault(comp, {})
                r[k] = r.get(k, 0) - c * x
        return rows

    def emit(self, rows):
        for r in rows.values():
            r = {k: v for k, v in r.items() if v}
            if r:
                self.rows.append(r)


def _map_equations(M, N, top, var, src_P=False, degree=0, leibniz=False):
    """
    Equations for collection maps x: M -> N of the given degree commuting
    with d (up to the Koszul sign), Σ and either the bimodule actions or
    (for leibniz, M = P) the derivation rule.
    """
    P = N.P
    eqs = _Rows(var)
    seqs = [s for s in N.all_seqs(top)]
    for seq in seqs:
        LM, LN = M.level(seq), N.level(seq)
        nN = len(LN.labels)
        for a in range(len(LM.labels)):
            rows = {}
            eqs.pre(rows, seq, LM.d[a], nN, _sgn(degree))
            eqs.post(rows, seq, a, lambda b: LN.d[b], nN)
            eqs.emit(rows)
            for t in range(arity(seq) - 1):
                p = perms.transposition(arity(seq), t)
                s2, v = M.act(seq, {a: 1}, p)
                rows = {}
                eqs.pre(rows, s2, v, N.dim(s2))
                eqs.post(rows, seq, a, lambda b: N.act_basis(seq, b, p), nN)
                eqs.emit(rows)
    pseqs = [s for s in P.all_seqs(top)]
    if leibniz:
        for s1 in pseqs:
            for slot in range(arity(s1)):
                for s2 in pseqs:
                    if s2[1] != s1[0][slot] or arity(s1) + arity(s2) - 1 > top:
                        continue
                    s12 = substitute(s1, slot, s2)
                    n12 = N.dim(s12)
                    for i in range(P.dim(s1)):
                        di = P.level(s1).degrees[i]
                        for j in range(P.dim(s2)):
                            rows = {}
                            eqs.pre(rows, s12, P.compose_basis(s1, i, slot, s2, j), n12)
                            eqs.post(rows, s2, j, lambda b: N.left_basis(s1, i, slot, s2, b),
                                     N.dim(s2), _sgn(degree * di))
                            eqs.post(rows, s1, i, lambda b: N.right_basis(s1, b, slot, s2, j), N.dim(s1))
                            eqs.emit(rows)
        return eqs
    for s1 in pseqs:
        for slot in range(arity(s1)):
            for s2 in seqs:
                if s2[1] != s1[0][slot] or arity(s1) + arity(s2) - 1 > top:
                    continue
                s12 = substitute(s1, slot, s2)
                for i in range(P.dim(s1)):
                    for j in range(M.dim(s2)):
                        rows = {}
                        eqs.pre(rows, s12, M.left_basis(s1, i, slot, s2, j), N.dim(s12))
                        eqs.post(rows, s2, j, lambda b: N.left_basis(s1, i, slot, s2, b), N.dim(s2))
                        eqs.emit(rows)
    for s1 in seqs:
        for slot in range(arity(s1)):
            for s2 in pseqs:
                if s2[1] != s1[0][slot] or arity(s1) + arity(s2) - 1 > top:
                    continue
                s12 = substitute(s1, slot, s2)
                for i in range(M.dim(s1)):
                    for j in range(P.dim(s2)):
                        rows = {}
                        eqs.pre(rows, s12, M.right_basis(s1, i, slot, s2, j), N.dim(s12))
                        eqs.post(rows, s1, i, lambda b: N.right_basis(s1, b, slot, s2, j), N.dim(s1))
                        eqs.emit(rows)
    return eqs


def _variables(M, N, top, degree=0):
    var, names = {}, []
    for seq in N.all_seqs(top):
        LM, LN = M.level(seq), N.level(seq)
        for a in range(len(LM.labels)):
            for b in range(len(LN.labels)):
                if LN.degrees[b] == LM.degrees[a] + degree:
                    var[(seq, a, b)] = len(names)
                    names.append((seq, a, b))
    return var, names


def _solutions_to_cols(M, N, top, names, sol):
    cols = {}
    for seq in N.all_seqs(top):
        cols[seq] = [dict() for _ in range(M.dim(seq))]
    for k, x in sol.items():
        seq, a, b = names[k]
        cols[seq][a][b] = x
    return cols


def hom_ib(M, N, top=None):
    """Basis of the degree-0 bimodule maps M -> N (list of IBimodMap)."""
    top = min(M.ceiling, N.ceiling) if top is None else top
    var, names = _variables(M, N, top)
    eqs = _map_equations(M, N, top, var)
    sols = nullspace(eqs.rows, len(names), N.F)
    return [IBimodMap(M, N, _solutions_to_cols(M, N, top, names, s), "h%d" % k)
            for k, s in enumerate(sols)]


class TangentStructure:
    def __init__(self, eps):
        self.eps = dict(eps)

    def __repr__(self):
        return "TangentStructure(%r)" % (self.eps,)


def tangent_structures(P, M, top=None):
    """Basis of families ε_c in M(c;c)_0 with dε = 0 and ε∘^r μ = Σ_i μ∘^{iℓ} ε."""
    top = M.ceiling if top is None else top
    F = M.F
    var, names = {}, []
    for c in P.colors:
        L = M.level(((c,), c))
        for b in range(len(L.labels)):
            if L.degrees[b] == 0:
                var[(c, b)] = len(names)
                names.append((c, b))
    rows = []
    for c in P.colors:
        L = M.level(((c,), c))
        comp = {}
        for b in range(len(L.labels)):
            k = var.get((c, b))
            if k is None:
                continue
            for j, x in L.d[b].items():
                comp.setdefault(j, {})[k] = x
        rows.extend(comp.values())
    for seq in P.all_seqs(top):
        c = seq[1]
        uc = ((c,), c)
        for mu in range(P.dim(seq)):
            comp = {}
            for b in range(M.dim(uc)):
                k = var.get((c, b))
                if k is None:
                    continue
                for j, x in M.right_basis(uc, b, 0, seq, mu).items():
                    r = comp.setdefault(j, {})
                    r[k] = r.get(k, 0) + x
            for i, ci in enumerate(seq[0]):
                ui = ((ci,), ci)
                for b in range(M.dim(ui)):
                    k = var.get((ci, b))
                    if k is None:
                        continue
                    for j, x in M.left_basis(seq, mu, i, ui, b).items():
                        r = comp.setdefault(j, {})
                        r[k] = r.get(k, 0) - x
            rows.extend({k: v for k, v in r.items() if v} for r in comp.values())
    rows = [r for r in rows if r]
    out = []
    for s in nullspace(rows, len(names), F):
        eps = {c: {} for c in P.colors}
        for k, x in s.items():
            c, b = names[k]
            eps[c][b] = x
        out.append(TangentStructure(eps))
    return out


class DerivationSpace:
    """Basis of derivations P -> M of a fixed degree, as per-sequence columns."""

    def __init__(self, P, M, degree, basis):
        self.P = P
        self.M = M
        self.degree = degree
        self.basis = basis

    @property
    def dim(self):
        return len(self.basis)

    def __len__(self):
        return len(self.basis)

    def evaluate(self, k, seq, vec):
        cols = self.basis[k].get(seq)
        out = {}
        if cols is None:
            return out
        for i, x in vec.items():
            vadd(out, cols[i], x, self.M.F)
        return out

    def check(self, top=None):
        return [check_derivation(self.P, self.M, b, self.degree, top) for b in self.basis]


def derivation_space(P, M, degree=0, top=None):
    top = M.ceiling if top is None else top
    S = self_ib(P, M.ceiling)
    var, names = _variables(S, M, top, degree)
    eqs = _map_equations(S, M, top, var, degree=degree, leibniz=True)
    sols = nullspace(eqs.rows, len(names), M.F)
    return DerivationSpace(P, M, degree, [_solutions_to_cols(S, M, top, names, s) for s in sols])


def check_derivation(P, M, cols, degree=0, top=None):
    """Leibniz, Σ and differential checks for a map given by columns."""
    top = M.ceiling if top is None else top
    F = M.F
    rep = AxiomReport()

    def D(seq, vec):
        out = {}
        cs = cols.get(seq)
        for i, x in vec.items():
            if cs is not None:
                vadd(out, cs[i], x, F)
        return out

    seqs = list(P.all_seqs(top))
    for seq in seqs:
        L = P.level(seq)
        for i in range(len(L.labels)):
            rep.checked += 1
            lhs = M.level(seq).apply_d(D(seq, {i: 1}))
            if vadd(dict(lhs), D(seq, L.d[i]), -_sgn(degree), F):
                rep.add("derivation_chain", (seq, i))
            for t in range(arity(seq) - 1):
                p = perms.transposition(arity(seq), t)
                s2, v = P.act(seq, {i: 1}, p)
                _, w = M.act(seq, D(seq, {i: 1}), p)
                rep.checked += 1
                if vadd(D(s2, v), w, -1, F):
                    rep.add("derivation_equivariance", (seq, i, t))
    for s1 in seqs:
        for slot in range(arity(s1)):
            for s2 in seqs:
                if s2[1] != s1[0][slot] or arity(s1) + arity(s2) - 1 > top:
                    continue
                for i in range(P.dim(s1)):
                    di = P.level(s1).degrees[i]
                    for j in range(P.dim(s2)):
                        rep.checked += 1
                        s12, v = P.compose(s1, {i: 1}, slot, s2, {j: 1})
                        lhs = D(s12, v)
                        _, a = M.left(s1, {i: 1}, slot, s2, D(s2, {j: 1}))
                        _, b = M.right(s1, D(s1, {i: 1}), slot, s2, {j: 1})
                        diff = vadd(vadd(dict(lhs), a, -_sgn(degree * di), F), b, -1, F)
                        if diff:
                            rep.add("leibniz", (s1, i, slot, s2, j), _max_entry(diff))
    return rep


def canonical_derivation(f, top=None):
    """d_f: μ ↦ (arity(μ) - 1)·f(μ), a derivation P -> restrict_ib(f, Q^si)."""
    M = restrict_ib(f, self_ib(f.target))
    top = M.ceiling if top is None else top
    cols = {}
    for seq in f.source.all_seqs(top):
        k = arity(seq) - 1
        cols[seq] = [vscale(f.image_basis(seq, i), k, M.F) for i in range(f.source.dim(seq))]
    return M, cols


# ---------------------------------------------------------------------------
# square-zero extensions

class SquareZeroOperad(Operad):
    """P ⋉ M: levels P(s) ⊕ M(s), (μ,p)∘(ν,q) = (μ∘ν, μ∘^ℓ q + p∘^r ν)."""

    def __init__(self, P, M):
        Operad.__init__(self, P.colors, P.F, M.ceiling, max_arity=M.ceiling, zero_above=False)
        self.base = P
        self.M = M
        self.name = "%s⋉%s" % (P.name, M.name)

    def _build_level(self, seq):
        return direct_sum(self.base.level(seq), self.M.level(seq))

    def _split(self, seq, i):
        n = self.base.dim(seq)
        return (0, i) if i < n else (1, i - n)

    def _embed(self, seq, part, v):
        if part == 0:
            return dict(v)
        n = self.base.dim(seq)
        return {j + n: c for j, c in v.items()}

    def unit(self, c):
        return self.base.unit(c)

    def act_basis(self, seq, i, p):
        part, a = self._split(seq, i)
        src = self.base if part == 0 else self.M
        return self._embed(seq_act(seq, p), part, src.act_basis(seq, a, p))

    def _compose_basis(self, s1, i, slot, s2, j):
        p1, a = self._split(s1, i)
        p2, b = self._split(s2, j)
        s12 = substitute(s1, slot, s2)
        if p1 == 0 and p2 == 0:
            return self._embed(s12, 0, self.base.compose_basis(s1, a, slot, s2, b))
        if p1 == 0:
            return self._embed(s12, 1, self.M.left_basis(s1, a, slot, s2, b))
        if p2 == 0:
            return self._embed(s12, 1, self.M.right_basis(s1, a, slot, s2, b))
        return {}


def square_zero(P, M):
    return SquareZeroOperad(P, M)


def square_zero_projection(Z):
    P = Z.base
    return OperadMap(Z, P, lambda seq, i: {i: 1} if i < P.dim(seq) else {}, name="pr")


class SquareZeroKernel(IBimod):
    """ker(P⋉M -> P) with the P-actions read off the extension."""

    def __init__(self, Z):
        IBimod.__init__(self, Z.base, Z.M.ceiling)
        self.Z = Z
        self.name = "ker(%s)" % Z.name

    def _off(self, seq):
        return self.Z.base.dim(seq)

    def _build_level(self, seq):
        L = self.Z.level(seq)
        o = self._off(seq)
        d = [{j - o: c for j, c in L.d[i].items()} for i in range(o, len(L.labels))]
        return ChainComplex(L.labels[o:], L.degrees[o:], d, self.F, check=False)

    def act_basis(self, seq, i, p):
        v = self.Z.act_basis(seq, i + self._off(seq), p)
        o = self._off(seq_act(seq, p))
        return {j - o: c for j, c in v.items()}

    def _left_basis(self, s1, i, slot, s2, j):
        v = self.Z.compose_basis(s1, i, slot, s2, j + self._off(s2))
        o = self._off(substitute(s1, slot, s2))
        return {k - o: c for k, c in v.items()}

    def _right_basis(self, s1, i, slot, s2, j):
        v = self.Z.compose_basis(s1, i + self._off(s1), slot, s2, j)
        o = self._off(substitute(s1, slot, s2))
        return {k - o: c for k, c in v.items()}


def square_zero_kernel(P, M):
    return SquareZeroKernel(square_zero(P, M))


# ---------------------------------------------------------------------------
# the strict sequence Ω_P -> P∘₍₁₎P -> L̄_P

class CanonicalSequence:
    def __init__(self, P, Omega, PP, Lbar, psi, phi, derivation):
        self.P = P
        self.Omega = Omega
        self.PP = PP
        self.Lbar = Lbar
        self.psi = psi
        self.phi = phi
        self.derivation = derivation

    def composite(self):
        return self.phi.compose(self.psi, "phi∘psi")

    def composite_is_zero(self):
        return self.composite().is_zero()

    def check(self):
        rep = AxiomReport()
        rep.extend(self.psi.check())
        rep.extend(self.phi.check())
        return rep


def canonical_sequence(P, N=None):
    N = P.ceiling if N is None else N
    Om, _ = kaehler_ib(P, N)
    K = Om.functor
    PP = inf_composite_ib(P, N)
    FP = PP.functor
    Lb = cotangent_ib(P, N)
    D = K.D
    F = P.F

    def g(c):
        return FP.generator(((c,), c), 0)

    # the classifying derivation μ ↦ Σ_i μ∘^{iℓ} g - g∘^{r} μ
    dcols = {}
    for seq in D.objects:
        c = seq[1]
        cols = []
        for mu in range(P.dim(seq)):
            out = {}
            for i, ci in enumerate(seq[0]):
                _, v = PP.left(seq, {mu: 1}, i, ((ci,), ci), g(ci))
                vadd(out, v, 1, F)
            _, v = PP.right(((c,), c), g(c), 0, seq, {mu: 1})
            vadd(out, v, -1, F)
            cols.append(out)
        dcols[seq] = cols
    rep = check_derivation(P, PP, dcols, 0, N)
    if not rep.ok:
        raise AssertionError("classifying map of Ψ is not a derivation: %r" % (rep,))

    psi_cols, phi_cols = {}, {}
    basis_cache = {}
    for t in D.objects:
        q = K.quotient(t)
        basis = K.raw(t)[0]
        cols = []
        for k in q.free:
            s, a, b = basis[k]
            cols.append(FP.act(s, t, dcols[s][a], {b: 1}))
        psi_cols[t] = cols
        qp = FP.quotient(t)
        bp = FP.raw(t)[0]
        cols = []
        Lf = IbFunctor(Lb, D)
        for k in qp.free:
            s, a, b = bp[k]
            cols.append(Lf.act_basis(s, t, Lb.marked_unit(s[1]), b))
        phi_cols[t] = cols
        basis_cache[t] = basis
    psi = IBimodMap(Om, PP, psi_cols, "Psi_%s" % P.name)
    phi = IBimodMap(PP, Lb, phi_cols, "phi_%s" % P.name)
    return CanonicalSequence(P, Om, PP, Lb, psi, phi, dcols)
