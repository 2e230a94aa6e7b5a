"""
Algebras over an operad, their operadic modules, the endomorphism
bimodule End_{A,N}, derivations, Kähler differentials and the relative
composite M∘_P A.

An operation μ in P(c_1..c_n; c) acts on basis tuples: act_basis(seq, i,
args) is μ(a_1, ..., a_n) in A(c).  A module action puts one element of
N at a marked slot k.
"""

from itertools import product

from . import perms
from .chaincore import ChainComplex, ground, zero_complex
from .collection import arity, seq_act, substitute
from .ibmod import IBimod, cotangent_ib, free_ib, tangent_structures
from .linalg import Quotient, nullspace, rank, vadd
from .operads import AxiomReport, _max_entry


def _sgn(k):
    return -1 if k % 2 else 1


def _tuples(dims):
    return product(*[range(n) for n in dims])


def _expand(vecs):
    """Multilinear expansion of a list of vectors into (index tuple, coeff)."""
    out = [((), 1)]
    for v in vecs:
        out = [(t + (i,), c * x) for t, c in out for i, x in v.items()]
    return out


# ---------------------------------------------------------------------------
# algebras

class PAlgebra:
    """Subclasses give value(c) and _act_basis(seq, i, args)."""

    name = "A"

    def __init__(self, P):
        self.P = P
        self.F = P.F
        self._acts = {}

    def value(self, c):
        raise NotImplementedError

    def _act_basis(self, seq, i, args):
        raise NotImplementedError

    def act_basis(self, seq, i, args):
        key = (seq, i, args)
        r = self._acts.get(key)
        if r is None:
            r = self._act_basis(seq, i, args)
            self._acts[key] = r
        return r

    def act(self, seq, muvec, argvecs):
        out = {}
        for i, x in muvec.items():
            for t, c in _expand(argvecs):
                vadd(out, self.act_basis(seq, i, t), x * c, self.F)
        return out

    def degrees(self, seq, args):
        return [self.value(c).degrees[a] for c, a in zip(seq[0], args)]

    def total_dim(self):
        return sum(len(self.value(c).labels) for c in self.P.colors)


class ComAlgebra(PAlgebra):
    """
    A graded-commutative unital algebra regarded over Com (or a truncation
    of it): μ_n acts as the n-fold product.  mult maps (i, j) to a vector.
    """

    def __init__(self, P, complex_, mult, unit, name="A"):
        PAlgebra.__init__(self, P)
        if len(P.colors) != 1:
            raise ValueError("ComAlgebra is single-colored")
        self.V = complex_
        self.mult = {k: dict(v) for k, v in mult.items()}
        self.unit = unit
        self.name = name
        self._prod = {}

    def value(self, c):
        return self.V

    def mul(self, u, v):
        out = {}
        for i, x in u.items():
            for j, y in v.items():
                vadd(out, self.mult.get((i, j), {}), x * y, self.F)
        return out

    def product(self, args):
        r = self._prod.get(args)
        if r is None:
            r = {self.unit: 1}
            for a in args:
                r = self.mul(r, {a: 1})
            self._prod[args] = r
        return r

    def _act_basis(self, seq, i, args):
        if not self.P.dim(seq):
            return {}
        return dict(self.product(args))


def ground_algebra(P, name="k"):
    return ComAlgebra(P, ground(P.F, 0, "1"), {(0, 0): {0: 1}}, 0, name)


def truncated_polynomial(P, n, name=None):
    """k[x]/(x^n), basis 1, x, ..., x^{n-1} in degree 0."""
    V = ChainComplex(["x^%d" % e for e in range(n)], [0] * n, None, P.F)
    mult = {(i, j): {i + j: 1} for i in range(n) for j in range(n) if i + j < n}
    return ComAlgebra(P, V, mult, 0, name or "k[x]/(x^%d)" % n)


def check_algebra(A, top=None):
    P = A.P
    F = A.F
    top = min(P.ceiling, 3) if top is None else top
    rep = AxiomReport()
    seqs = list(P.all_seqs(top))
    dims = {c: len(A.value(c).labels) for c in P.colors}
    for c in P.colors:
        V = A.value(c)
        for a in range(dims[c]):
            rep.checked += 1
            if A.act_basis(P.identity_seq(c), P.unit(c), (a,)) != {a: 1}:
                rep.add("unit", (c, V.labels[a]))
    for seq in seqs:
        n = arity(seq)
        L = P.level(seq)
        for i in range(len(L.labels)):
            for args in _tuples([dims[c] for c in seq[0]]):
                degs = A.degrees(seq, args)
                out = A.value(seq[1])
                # chain property
                rep.checked += 1
                lhs = out.apply_d(A.act_basis(seq, i, args))
                rhs = A.act(seq, L.d[i], [{a: 1} for a in args])
                s0 = _sgn(L.degrees[i])
                for k in range(n):
                    dk = A.value(seq[0][k]).d[args[k]]
                    if dk:
                        vs = [{a: 1} for a in args]
                        vs[k] = dk
                        vadd(rhs, A.act(seq, {i: 1}, vs), s0 * _sgn(sum(degs[:k])), F)
                diff = vadd(dict(lhs), rhs, -1, F)
                if diff:
                    rep.add("chain", (seq, i, args), _max_entry(diff))
                # equivariance: (μ·p)(b) = ±μ(a) with a_{p[j]} = b_j
                for t in range(n - 1):
                    rep.checked += 1
                    p = perms.transposition(n, t)
                    s2, v = P.act(seq, {i: 1}, p)
                    b = perms.act_seq(args, p)
                    lhs = A.act(s2, v, [{x: 1} for x in b])
                    s = perms.koszul_sign(perms.inverse(p), A.degrees(s2, b))
                    diff = vadd(dict(lhs), A.act_basis(seq, i, args), -s, F)
                    if diff:
                        rep.add("equivariance", (seq, i, args, t), _max_entry(diff))
    for s1 in seqs:
        for slot in range(arity(s1)):
            for s2 in seqs:
                m = arity(s2)
                if s2[1] != s1[0][slot] or arity(s1) + m - 1 > top:
                    continue
                s12 = substitute(s1, slot, s2)
                for i in range(P.dim(s1)):
                    for j in range(P.dim(s2)):
                        _, comp = P.compose(s1, {i: 1}, slot, s2, {j: 1})
                        nu_deg = P.level(s2).degrees[j]
                        for args in _tuples([dims[c] for c in s12[0]]):
                            rep.checked += 1
                            lhs = A.act(s12, comp, [{a: 1} for a in args])
                            inner = A.act_basis(s2, j, args[slot:slot + m])
                            vs = [{a: 1} for a in args[:slot]] + [inner] + [{a: 1} for a in args[slot + m:]]
                            s = _sgn(nu_deg * sum(A.degrees(s12, args)[:slot]))
                            diff = vadd(dict(lhs), A.act(s1, {i: 1}, vs), -s, F)
                            if diff:
                                rep.add("associativity", (s1, i, slot, s2, j, args), _max_entry(diff))
    return rep


# ---------------------------------------------------------------------------
# modules

class AModule:
    """Subclasses give value(c) and _act_basis(seq, i, k, args), args[k] in N."""

    name = "N"

    def __init__(self, A):
        self.A = A
        self.P = A.P
        self.F = A.F
        self._acts = {}

    def value(self, c):
        raise NotImplementedError

    def _act_basis(self, seq, i, k, args):
        raise NotImplementedError

    def act_basis(self, seq, i, k, args):
        key = (seq, i, k, args)
        r = self._acts.get(key)
        if r is None:
            r = self._act_basis(seq, i, k, args)
            self._acts[key] = r
        return r

    def act(self, seq, muvec, k, argvecs):
        out = {}
        for i, x in muvec.items():
            for t, c in _expand(argvecs):
                vadd(out, self.act_basis(seq, i, k, t), x * c, self.F)
        return out

    def degrees(self, seq, k, args):
        out = []
        for j, (c, a) in enumerate(zip(seq[0], args)):
            V = self.value(c) if j == k else self.A.value(c)
            out.append(V.degrees[a])
        return out

    def dims(self, seq, k):
        return [len((self.value(c) if j == k else self.A.value(c)).labels) for j, c in enumerate(seq[0])]

    def total_dim(self):
        return sum(len(self.value(c).labels) for c in self.P.colors)


class ComModule(AModule):
    """
    A module over a ComAlgebra given by a·n: μ_m(a.., n, ..) = (Π a)·n,
    with the Koszul sign of moving n to the right end.
    """

    def __init__(self, A, complex_, mult, name="N"):
        AModule.__init__(self, A)
        self.V = complex_
        self.mult = {k: dict(v) for k, v in mult.items()}
        self.name = name

    def value(self, c):
        return self.V

    def scalar(self, avec, nvec):
        out = {}
        for a, x in avec.items():
            for n, y in nvec.items():
                vadd(out, self.mult.get((a, n), {}), x * y, self.F)
        return out

    def _act_basis(self, seq, i, k, args):
        if not self.P.dim(seq):
            return {}
        rest = args[:k] + args[k + 1:]
        degs = self.degrees(seq, k, args)
        s = _sgn(degs[k] * sum(degs[k + 1:]))
        out = self.scalar(self.A.product(rest), {args[k]: 1})
        return {j: s * x for j, x in out.items()}


def self_module(A):
    return ComModule(A, A.V, A.mult, A.name)


def zero_module(A):
    return ComModule(A, zero_complex(A.F), {}, "0")


def check_amodule(A, N, top=None):
    P = A.P
    F = A.F
    top = min(P.ceiling, 3) if top is None else top
    rep = AxiomReport()
    seqs = list(P.all_seqs(top))
    for c in P.colors:
        for a in range(len(N.value(c).labels)):
            rep.checked += 1
            if N.act_basis(P.identity_seq(c), P.unit(c), 0, (a,)) != {a: 1}:
                rep.add("unit", (c, a))
    for seq in seqs:
        n = arity(seq)
        L = P.level(seq)
        for k in range(n):
            for i in range(len(L.labels)):
                for args in _tuples(N.dims(seq, k)):
                    degs = N.degrees(seq, k, args)
                    out = N.value(seq[1])
                    rep.checked += 1
                    lhs = out.apply_d(N.act_basis(seq, i, k, args))
                    rhs = N.act(seq, L.d[i], k, [{a: 1} for a in args])
                    s0 = _sgn(L.degrees[i])
                    for q in range(n):
                        V = N.value(seq[0][q]) if q == k else A.value(seq[0][q])
                        dq = V.d[args[q]]
                        if dq:
                            vs = [{a: 1} for a in args]
                            vs[q] = dq
                            vadd(rhs, N.act(seq, {i: 1}, k, vs), s0 * _sgn(sum(degs[:q])), F)
                    diff = vadd(dict(lhs), rhs, -1, F)
                    if diff:
                        rep.add("chain", (seq, i, k, args), _max_entry(diff))
                    for t in range(n - 1):
                        rep.checked += 1
                        p = perms.transposition(n, t)
                        s2, v = P.act(seq, {i: 1}, p)
                        b = perms.act_seq(args, p)
                        k2 = perms.inverse(p)[k]
                        lhs = N.act(s2, v, k2, [{x: 1} for x in b])
                        s = perms.koszul_sign(perms.inverse(p), N.degrees(s2, k2, b))
                        diff = vadd(dict(lhs), N.act_basis(seq, i, k, args), -s, F)
                        if diff:
                            rep.add("equivariance", (seq, i, k, args, t), _max_entry(diff))
    for s1 in seqs:
        for slot in range(arity(s1)):
            for s2 in seqs:
                m = arity(s2)
                if s2[1] != s1[0][slot] or arity(s1) + m - 1 > top:
                    continue
                s12 = substitute(s1, slot, s2)
                for i in range(P.dim(s1)):
                    for j in range(P.dim(s2)):
                        _, comp = P.compose(s1, {i: 1}, slot, s2, {j: 1})
                        nu_deg = P.level(s2).degrees[j]
                        for k in range(arity(s12)):
                            for args in _tuples(N.dims(s12, k)):
                                rep.checked += 1
                                degs = N.degrees(s12, k, args)
                                lhs = N.act(s12, comp, k, [{a: 1} for a in args])
                                block = args[slot:slot + m]
                                if slot <= k < slot + m:
                                    inner = N.act_basis(s2, j, k - slot, block)
                                    k1 = slot
                                else:
                                    inner = A.act_basis(s2, j, block)
                                    k1 = k if k < slot else k - m + 1
                                vs = [{a: 1} for a in args[:slot]] + [inner] + [{a: 1} for a in args[slot + m:]]
                                s = _sgn(nu_deg * sum(degs[:slot]))
                                diff = vadd(dict(lhs), N.act(s1, {i: 1}, k1, vs), -s, F)
                                if diff:
                                    rep.add("associativity", (s1, i, slot, s2, j, k, args), _max_entry(diff))
    return rep


def module_hom(M, N, top=None):
    """Basis of degree-0 A-module chain maps M -> N, each a dict c -> columns."""
    P, F = M.P, M.F
    top = min(P.ceiling, 3) if top is None else top
    var = {}
    for c in P.colors:
        VM, VN = M.value(c), N.value(c)
        for i in range(len(VM.labels)):
            for j in range(len(VN.labels)):
                if VM.degrees[i] == VN.degrees[j]:
                    var[(c, i, j)] = len(var)

    def phi(c, vec):
        # symbolic φ_c(vec): dict (target index) -> row over variables
        out = {}
        for i, x in vec.items():
            for j in range(len(N.value(c).labels)):
                v = var.get((c, i, j))
                if v is not None:
                    out.setdefault(j, {})
                    vadd(out[j], {v: x}, 1, F)
        return out

    def apply_rows(rows_by_j, fn):
        # push a symbolic vector through a linear map fn(basis j) -> vector
        out = {}
        for j, row in rows_by_j.items():
            for t, y in fn(j).items():
                out.setdefault(t, {})
                vadd(out[t], row, y, F)
        return out

    rows = []

    def emit(a, b):
        for t in set(a) | set(b):
            r = vadd(dict(a.get(t, {})), b.get(t, {}), -1, F)
            if r:
                rows.append(r)

    for c in P.colors:
        VM, VN = M.value(c), N.value(c)
        for i in range(len(VM.labels)):
            emit(apply_rows(phi(c, {i: 1}), lambda j: VN.d[j]), phi(c, VM.d[i]))
    for seq in P.all_seqs(top):
        n = arity(seq)
        for k in range(n):
            for i in range(P.dim(seq)):
                for args in _tuples(M.dims(seq, k)):
                    lhs = phi(seq[1], M.act_basis(seq, i, k, args))
                    ck = seq[0][k]

                    def fn(j, args=args, seq=seq, i=i, k=k):
                        b = args[:k] + (j,) + args[k + 1:]
                        return N.act_basis(seq, i, k, b)

                    rhs = apply_rows(phi(ck, {args[k]: 1}), fn)
                    emit(lhs, rhs)
    sols = nullspace(rows, len(var), F)
    names = sorted(var, key=var.get)
    out = []
    for s in sols:
        m = {}
        for v, x in s.items():
            c, i, j = names[v]
            m.setdefault(c, {}).setdefault(i, {})[j] = x
        out.append(m)
    return out


# ---------------------------------------------------------------------------
# End_{A,N}

class EndIB(IBimod):
    """
    End_{A,N}: level (c_1..c_n; c) = Hom(A(c_1)⊗...⊗A(c_n), N(c)).  Basis
    element (t, b) sends the basis tensor t to b; index = flat(t)·dim N + b.
    """

    def __init__(self, A, N, ceiling=None):
        IBimod.__init__(self, A.P, ceiling)
        self.A = A
        self.N = N
        self.name = "End_{%s,%s}" % (A.name, N.name)

    def _radix(self, seq):
        return [len(self.A.value(c).labels) for c in seq[0]]

    def _flat(self, seq, t):
        x = 0
        for r, a in zip(self._radix(seq), t):
            x = x * r + a
        return x

    def _unflat(self, seq, x):
        out = []
        for r in reversed(self._radix(seq)):
            x, a = divmod(x, r)
            out.append(a)
        return tuple(reversed(out))

    def index(self, seq, t, b):
        return self._flat(seq, t) * len(self.N.value(seq[1]).labels) + b

    def split(self, seq, idx):
        nb = len(self.N.value(seq[1]).labels)
        x, b = divmod(idx, nb)
        return self._unflat(seq, x), b

    def _build_level(self, seq):
        F = self.F
        As = [self.A.value(c) for c in seq[0]]
        Nv = self.N.value(seq[1])
        nb = len(Nv.labels)
        labels, degs, d = [], [], []
        tuples = list(_tuples([len(V.labels) for V in As]))
        pos = {t: k for k, t in enumerate(tuples)}
        for t in tuples:
            tdeg = [V.degrees[a] for V, a in zip(As, t)]
            for b in range(nb):
                p = Nv.degrees[b] - sum(tdeg)
                labels.append((tuple(V.labels[a] for V, a in zip(As, t)), Nv.labels[b]))
                degs.append(p)
                img = {}
                for b2, x in Nv.d[b].items():
                    vadd(img, {pos[t] * nb + b2: x}, 1, F)
                # f∘d: f_{t,b}∘d sends t' to b with coefficient of t in d t'
                s = _sgn(p + 1)
                for q, V in enumerate(As):
                    for a2 in range(len(V.labels)):
                        x = V.d[a2].get(t[q])
                        if x:
                            t2 = t[:q] + (a2,) + t[q + 1:]
                            ks = _sgn(sum(tdeg[:q]))
                            vadd(img, {pos[t2] * nb + b: x}, s * ks, F)
                d.append(img)
        return ChainComplex(labels, degs, d, F, check=False)

    def act_basis(self, seq, i, p):
        t, b = self.split(seq, i)
        s2 = seq_act(seq, p)
        t2 = perms.act_seq(t, p)
        degs = [self.A.value(c).degrees[a] for c, a in zip(seq[0], t)]
        s = perms.koszul_sign(p, degs)
        return {self.index(s2, t2, b): s}

    def _right_basis(self, s1, i, slot, s2, j):
        # (f∘_slot ν)(a) = ±f(a_<, ν(a_block), a_>)
        t, b = self.split(s1, i)
        s12 = substitute(s1, slot, s2)
        if arity(s12) > self.ceiling:
            raise ValueError("action leaves the ceiling")
        nu_deg = self.P.level(s2).degrees[j]
        pre = [self.A.value(c).degrees[a] for c, a in zip(s1[0][:slot], t[:slot])]
        s = _sgn(nu_deg * sum(pre))
        out = {}
        for block in _tuples(self._radix(s2)):
            x = self.A.act_basis(s2, j, block).get(t[slot])
            if x:
                t2 = t[:slot] + block + t[slot + 1:]
                vadd(out, {self.index(s12, t2, b): s * x}, 1, self.F)
        return out

    def _left_basis(self, s1, i, slot, s2, j):
        # (μ∘_slot f)(a) = ±μ(a_<, f(a_block), a_>) through N's action
        t, b = self.split(s2, j)
        s12 = substitute(s1, slot, s2)
        if arity(s12) > self.ceiling:
            raise ValueError("action leaves the ceiling")
        fdeg = self.level(s2).degrees[j]
        rad = self._radix(s1)
        out = {}
        for x in _tuples(rad[:slot] + [1] + rad[slot + 1:]):
            args = x[:slot] + (b,) + x[slot + 1:]
            pre = [self.A.value(c).degrees[a] for c, a in zip(s1[0][:slot], x[:slot])]
            s = _sgn(fdeg * sum(pre))
            for b2, y in self.N.act_basis(s1, i, slot, args).items():
                t2 = x[:slot] + t + x[slot + 1:]
                vadd(out, {self.index(s12, t2, b2): s * y}, 1, self.F)
        return out


def end_ib(A, N, ceiling=None):
    return EndIB(A, N, ceiling)


# ---------------------------------------------------------------------------
# derivations

class AlgDerivations:
    """basis: list of dicts c -> {i: vector in N(c)}."""

    def __init__(self, A, N, basis):
        self.A = A
        self.N = N
        self.basis = basis

    @property
    def dim(self):
        return len(self.basis)

    def __len__(self):
        return len(self.basis)


def algebra_derivations(A, N, top=None):
    """Degree-0 chain maps δ_c: A(c) -> N(c) with δ(μ(a)) = Σ ±μ(.., δa_k, ..)."""
    P, F = A.P, A.F
    top = min(P.ceiling, 3) if top is None else top
    var = {}
    for c in P.colors:
        VA, VN = A.value(c), N.value(c)
        for i in range(len(VA.labels)):
            for j in range(len(VN.labels)):
                if VA.degrees[i] == VN.degrees[j]:
                    var[(c, i, j)] = len(var)

    def delta(c, vec):
        out = {}
        for i, x in vec.items():
            for j in range(len(N.value(c).labels)):
                v = var.get((c, i, j))
                if v is not None:
                    out.setdefault(j, {})
                    vadd(out[j], {v: x}, 1, F)
        return out

    rows = []

    def emit(acc):
        for r in acc.values():
            if r:
                rows.append(r)

    for c in P.colors:
        VA, VN = A.value(c), N.value(c)
        for i in range(len(VA.labels)):
            acc = {}
            for j, row in delta(c, {i: 1}).items():
                for t, y in VN.d[j].items():
                    acc.setdefault(t, {})
                    vadd(acc[t], row, y, F)
            for t, row in delta(c, VA.d[i]).items():
                acc.setdefault(t, {})
                vadd(acc[t], row, -1, F)
            emit(acc)
    for seq in P.all_seqs(top):
        n = arity(seq)
        for i in range(P.dim(seq)):
            for args in _tuples([len(A.value(c).labels) for c in seq[0]]):
                acc = {}
                for t, row in delta(seq[1], A.act_basis(seq, i, args)).items():
                    acc.setdefault(t, {})
                    vadd(acc[t], row, 1, F)
                for k in range(n):
                    for j, row in delta(seq[0][k], {args[k]: 1}).items():
                        b = args[:k] + (j,) + args[k + 1:]
                        for t, y in N.act_basis(seq, i, k, b).items():
                            acc.setdefault(t, {})
                            vadd(acc[t], row, -y, F)
                emit(acc)
    sols = nullspace(rows, len(var), F)
    names = sorted(var, key=var.get)
    basis = []
    for s in sols:
        m = {}
        for v, x in s.items():
            c, i, j = names[v]
            m.setdefault(c, {}).setdefault(i, {})[j] = x
        basis.append(m)
    return AlgDerivations(A, N, basis)


# ---------------------------------------------------------------------------
# Kähler differentials of a commutative algebra

def _quotient_complex(labels, degs, d, relations, F, prefix):
    """The complex V/R for R a subcomplex spanned by `relations`."""
    Q = Quotient(len(labels), relations, F)
    qlabels = [(prefix, labels[k]) for k in Q.free]
    qdegs = [degs[k] for k in Q.free]
    qd = []
    for k in Q.free:
        img = {}
        for j, x in d[k].items():
            vadd(img, Q.coords({j: 1}), x, F)
        qd.append(img)
    return Q, ChainComplex(qlabels, qdegs, qd, F, check=False)


class KaehlerModule(ComModule):
    """Ω_A as the quotient of A ⊗ span{dα}; raw basis index a·dimA + α."""

    def __init__(self, A, Q, complex_, mult):
        ComModule.__init__(self, A, complex_, mult, "Omega_%s" % A.name)
        self.Q = Q

    def universal(self, avec):
        n = len(self.A.V.labels)
        raw = {self.A.unit * n + a: x for a, x in avec.items()}
        return self.Q.coords(raw)


def kaehler_algebra(A, top=None):
    """(Ω_A, ∂) with ∂ sending a vector of A to its class 1⊗dα."""
    if not isinstance(A, ComAlgebra):
        raise NotImplementedError("Kähler differentials are built for commutative algebras")
    F = A.F
    V = A.V
    n = len(V.labels)
    top = min(A.P.ceiling, 3) if top is None else top
    labels, degs, d = [], [], []
    for a in range(n):
        for al in range(n):
            labels.append((V.labels[a], "d" + str(V.labels[al])))
            degs.append(V.degrees[a] + V.degrees[al])
            img = {}
            for a2, x in V.d[a].items():
                vadd(img, {a2 * n + al: x}, 1, F)
            for b2, x in V.d[al].items():
                vadd(img, {a * n + b2: x}, _sgn(V.degrees[a]), F)
            d.append(img)

    def times(avec, raw):
        out = {}
        for a, x in avec.items():
            for k, y in raw.items():
                b, al = divmod(k, n)
                for c, z in A.mul({a: 1}, {b: 1}).items():
                    vadd(out, {c * n + al: x * y * z}, 1, F)
        return out

    rels = []
    for m in range(top + 1):
        seq = ((A.P.colors[0],) * m, A.P.colors[0])
        if not A.P.dim(seq):
            continue
        for args in _tuples([n] * m):
            r = {A.unit * n + g: x for g, x in A.product(args).items()}
            for k in range(m):
                rest = args[:k] + args[k + 1:]
                pre = sum(V.degrees[a] for a in args[:k])
                s = _sgn(V.degrees[args[k]] * pre)
                vadd(r, {c * n + args[k]: y for c, y in A.product(rest).items()}, -s, F)
            for b in range(n):
                rr = times({b: 1}, r)
                if rr:
                    rels.append(rr)
    Q, C = _quotient_complex(labels, degs, d, rels, F, "Omega")
    mult = {}
    for a in range(n):
        for q, k in enumerate(Q.free):
            v = Q.coords(times({a: 1}, {k: 1}))
            if v:
                mult[(a, q)] = v
    Om = KaehlerModule(A, Q, C, mult)
    return Om, Om.universal


# ---------------------------------------------------------------------------
# relative composite M∘_P A

class RelativeModule(AModule):
    """
    M∘_P A truncated at arity `top`: classes [m ⊗ a_1..a_n] modulo the
    coinvariance and right-action relations.  Raw elements are ordered by
    decreasing arity so that representatives live in low arity.
    """

    def __init__(self, M, A, top):
        AModule.__init__(self, A)
        self.M = M
        self.top = top
        self.name = "%s∘%s" % (getattr(M, "name", "M"), A.name)
        self._raw = {}
        self._vals = {}

    def raw(self, c):
        r = self._raw.get(c)
        if r is None:
            r = self._build_raw(c)
            self._raw[c] = r
        return r

    def _build_raw(self, c):
        M, A = self.M, self.A
        keys, degs = [], []
        for n in reversed(range(self.top + 1)):
            for seq in M.seqs(n):
                if seq[1] != c:
                    continue
                L = M.level(seq)
                for mi in range(len(L.labels)):
                    for args in _tuples([len(A.value(x).labels) for x in seq[0]]):
                        keys.append((seq, mi, args))
                        degs.append(L.degrees[mi] + sum(A.degrees(seq, args)))
        index = {k: i for i, k in enumerate(keys)}
        return keys, degs, index

    def raw_vec(self, c, seq, mvec, argvecs):
        _, _, index = self.raw(c)
        out = {}
        for mi, x in mvec.items():
            for t, y in _expand(argvecs):
                vadd(out, {index[(seq, mi, t)]: x * y}, 1, self.F)
        return out

    def _relations(self, c):
        M, A, P, F = self.M, self.A, self.P, self.F
        keys, _, _ = self.raw(c)
        rels = []
        for seq, mi, args in keys:
            n = arity(seq)
            # coinvariance: [m·p ⊗ b] = ±[m ⊗ a], a_{p[j]} = b_j
            for t in range(n - 1):
                p = perms.transposition(n, t)
                s2, v = M.act(seq, {mi: 1}, p)
                b = perms.act_seq(args, p)
                s = perms.koszul_sign(perms.inverse(p), A.degrees(s2, b))
                r = self.raw_vec(c, s2, v, [{x: 1} for x in b])
                vadd(r, {self.raw(c)[2][(seq, mi, args)]: 1}, -s, F)
                if r:
                    rels.append(r)
        # right action
        for n1 in range(self.top + 1):
            for s1 in M.seqs(n1):
                if s1[1] != c:
                    continue
                for slot in range(n1):
                    for s2 in P.all_seqs(self.top - n1 + 1):
                        if s2[1] != s1[0][slot]:
                            continue
                        m = arity(s2)
                        s12 = substitute(s1, slot, s2)
                        for mi in range(M.dim(s1)):
                            for j in range(P.dim(s2)):
                                _, w = M.right(s1, {mi: 1}, slot, s2, {j: 1})
                                nu_deg = P.level(s2).degrees[j]
                                for args in _tuples([len(A.value(x).labels) for x in s12[0]]):
                                    r = self.raw_vec(c, s12, w, [{x: 1} for x in args])
                                    inner = A.act_basis(s2, j, args[slot:slot + m])
                                    vs = [{x: 1} for x in args[:slot]] + [inner] + [{x: 1} for x in args[slot + m:]]
                                    s = _sgn(nu_deg * sum(A.degrees(s12, args)[:slot]))
                                    vadd(r, self.raw_vec(c, s1, {mi: 1}, vs), -s, F)
                                    if r:
                                        rels.append(r)
        return rels

    def quotient(self, c):
        if c not in self._vals:
            M, A, F = self.M, self.A, self.F
            keys, degs, index = self.raw(c)
            d = []
            for seq, mi, args in keys:
                L = M.level(seq)
                img = self.raw_vec(c, seq, L.d[mi], [{x: 1} for x in args])
                s = _sgn(L.degrees[mi])
                ad = A.degrees(seq, args)
                for q, x in enumerate(args):
                    dq = A.value(seq[0][q]).d[x]
                    if dq:
                        vs = [{y: 1} for y in args]
                        vs[q] = dq
                        vadd(img, self.raw_vec(c, seq, {mi: 1}, vs), s * _sgn(sum(ad[:q])), F)
                d.append(img)
            self._vals[c] = _quotient_complex(keys, degs, d, self._relations(c), F, "rel")
        return self._vals[c]

    def value(self, c):
        return self.quotient(c)[1]

    def _act_basis(self, seq, i, k, args):
        # μ(a_<, [m ⊗ b], a_>) = ±[μ∘^{kℓ} m ⊗ (a_<, b, a_>)]
        M, A, F = self.M, self.A, self.F
        ck = seq[0][k]
        Q, _ = self.quotient(ck)
        keys, _, _ = self.raw(ck)
        raw = Q.lift({args[k]: 1})
        out = {}
        c = seq[1]
        pre = sum(A.value(x).degrees[a] for x, a in zip(seq[0][:k], args[:k]))
        for key, x in raw.items():
            s2, mi, b = keys[key]
            if arity(seq) + arity(s2) - 1 > self.top:
                raise ValueError("action leaves the truncation")
            s12, w = M.left(seq, {i: 1}, k, s2, {mi: 1})
            s = _sgn(M.level(s2).degrees[mi] * pre)
            argv = [{y: 1} for y in args[:k]] + [{y: 1} for y in b] + [{y: 1} for y in args[k + 1:]]
            vadd(out, self.raw_vec(c, s12, w, argv), s * x, F)
        return self.quotient(c)[0].coords(out)


def relative_compose(M, A, top=None):
    top = min(M.ceiling, 3) if top is None else top
    return RelativeModule(M, A, top)


def act_relative(M, A, top=None):
    return relative_compose(M, A, top)


def free_amodule(A, top=None):
    """Free_A(k) modelled as free_ib(P, E_*)∘_P A."""
    from .collection import E_star
    top = min(A.P.ceiling - 1, 3) if top is None else top
    X = E_star(A.F, top)
    return relative_compose(free_ib(A.P, X, top), A, top)


class ComparisonWitness:
    def __init__(self, dims, well_defined, rank, matrix):
        self.dims = dims
        self.well_defined = well_defined
        self.rank = rank
        self.matrix = matrix

    @property
    def bijective(self):
        a, b = self.dims
        return self.well_defined and a == b == self.rank

    def __repr__(self):
        return "ComparisonWitness(dims=%r, well_defined=%s, rank=%d)" % (self.dims, self.well_defined, self.rank)


def kaehler_comparison(P, A, top=None):
    """
    The map L̄_P∘_P A -> Ω_A, [μ^{(k)} ⊗ a] ↦ μ(a_<, ∂a_k, a_>), checked on
    relations (well-definedness) and for bijectivity.
    """
    top = min(P.ceiling - 1, 3) if top is None else top
    if top < 3:
        # the coequalizer relations of L̄∘_P A live in arity 3
        raise ValueError("the Kähler comparison needs arities through 3 (operad ceiling >= 4)")
    L = cotangent_ib(P, top)
    R = relative_compose(L, A, top)
    Om, dd = kaehler_algebra(A, top)
    c = P.colors[0]
    keys, _, _ = R.raw(c)
    Q, C = R.quotient(c)
    F = A.F

    def image(key):
        seq, idx, args = key
        k, mu = L.split(seq, idx)
        vs = [{y: 1} for y in args]
        vs[k] = dd({args[k]: 1})
        return Om.act(seq, {mu: 1}, k, vs)

    imgs = [image(k) for k in keys]
    ok = True
    for r in R._relations(c):
        acc = {}
        for key, x in r.items():
            vadd(acc, imgs[key], x, F)
        if acc:
            ok = False
            break
    cols = [imgs[k] for k in Q.free]
    return ComparisonWitness((len(C.labels), len(Om.V.labels)), ok, rank(cols, F), cols)


def derivation_check(A, N, top=None):
    """(dim Der(A, N), dim Tan(End_{A,N}), dim hom(Ω_A, N))."""
    top = min(A.P.ceiling, 3) if top is None else top
    der = algebra_derivations(A, N, top).dim
    tan = len(tangent_structures(A.P, end_ib(A, N, top), top))
    om = None
    if isinstance(A, ComAlgebra) and isinstance(N, ComModule):
        Om, _ = kaehler_algebra(A, top)
        om = len(module_hom(Om, N, top))
    return der, tan, om


def quillen_algebra(A, N, setup):
    """HQ^n(A; N) = H_{-n} RHom(L̄_P, End_{A,N}); carries the cofibrancy caveat."""
    from .barhom import _operad_table
    P = A.P
    Nn = setup.N if setup.N is not None else P.ceiling - 1
    E = end_ib(A, N, Nn)
    cav = ("algebra not cofibrant: values are those of the strict model",)
    return _operad_table(P, lambda P, n: cotangent_ib(P, n), E, setup, "HQalg", 0, cav)
