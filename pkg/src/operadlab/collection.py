"""
C-colored symmetric collections in full (non-orbit) form.

A C-sequence is a pair (inputs, output) with inputs a tuple of colors.
A collection assigns a ChainComplex to every C-sequence of arity at most
its ceiling and carries a right action of the symmetric groups: for a
basis element x of level (c_1..c_n; c) and a permutation p, x·p lies in
level (c_{p[0]}..c_{p[n-1]}; c).
"""

from itertools import product

from . import perms
from .chaincore import ChainComplex, zero_complex, ground
from .linalg import QQ, Quotient, vadd


def seq_act(seq, p):
    ins, out = seq
    return (perms.act_seq(ins, p), out)


def arity(seq):
    return len(seq[0])


def substitute(seq1, i, seq2):
    """The sequence of x∘_i y for x in seq1, y in seq2."""
    ins1, out1 = seq1
    ins2, out2 = seq2
    if ins1[i] != out2:
        raise ValueError("color mismatch at slot %d" % i)
    return (ins1[:i] + ins2 + ins1[i + 1:], out1)


class ColorSet(tuple):
    def __new__(cls, colors):
        colors = tuple(colors)
        if not colors:
            raise ValueError("color set must be non-empty")
        if len(set(colors)) != len(colors):
            raise ValueError("colors must be distinct")
        return tuple.__new__(cls, colors)


class TruncationPolicy:
    def __init__(self, ceiling, truncated=False):
        if ceiling < 1:
            raise ValueError("ceiling must be >= 1")
        self.ceiling = ceiling
        self.truncated = truncated

    def __repr__(self):
        return "TruncationPolicy(N=%d, truncated=%s)" % (self.ceiling, self.truncated)


class Collection:
    """
    Base class.  Subclasses implement _build_level(seq) and either
    _transpose_basis(seq, i, t) or act_basis(seq, i, p).

    `ceiling` is the nominal arity bound.  `max_arity` is the largest
    arity for which levels can be produced (None: any arity); when
    `zero_above` is set, levels beyond max_arity are zero.
    """

    def __init__(self, colors=("*",), field=QQ, ceiling=4, max_arity=None, zero_above=False):
        self.colors = ColorSet(colors)
        self.F = field
        self.ceiling = ceiling
        self.max_arity = max_arity
        self.zero_above = zero_above
        self._levels = {}
        self._acts = {}

    # -- levels
    def available(self, n):
        return self.max_arity is None or n <= self.max_arity or self.zero_above

    def level(self, seq):
        L = self._levels.get(seq)
        if L is None:
            n = arity(seq)
            if seq[1] not in self.colors or any(c not in self.colors for c in seq[0]):
                raise KeyError("unknown color in %r" % (seq,))
            if self.max_arity is not None and n > self.max_arity:
                if not self.zero_above:
                    raise ValueError("arity %d beyond available data (%d)" % (n, self.max_arity))
                L = zero_complex(self.F)
            else:
                L = self._build_level(seq)
            self._levels[seq] = L
        return L

    def _build_level(self, seq):
        raise NotImplementedError

    def dim(self, seq):
        return len(self.level(seq).labels)

    def vanishes_above(self, n):
        """True if every level of arity > n is known to be zero."""
        return self.max_arity is not None and self.zero_above and self.max_arity <= n

    def seqs(self, n):
        for ins in product(self.colors, repeat=n):
            for c in self.colors:
                yield (ins, c)

    def all_seqs(self, top=None):
        top = self.ceiling if top is None else top
        for n in range(top + 1):
            if self.available(n):
                yield from self.seqs(n)

    # -- actions
    def _transpose_basis(self, seq, i, t):
        raise NotImplementedError

    def act_basis(self, seq, i, p):
        key = (seq, i, p)
        r = self._acts.get(key)
        if r is not None:
            return r
        if perms.is_identity(p):
            r = {i: 1}
        else:
            cur_seq = seq
            vec = {i: 1}
            n = arity(seq)
            for t in perms.adjacent_word(p):
                out = {}
                for j, x in vec.items():
                    vadd(out, self._transpose_basis(cur_seq, j, t), x, self.F)
                vec = out
                cur_seq = seq_act(cur_seq, perms.transposition(n, t))
            r = vec
        self._acts[key] = r
        return r

    def act(self, seq, vec, p):
        """(seq·p, vec·p)."""
        out = {}
        for i, x in vec.items():
            vadd(out, self.act_basis(seq, i, p), x, self.F)
        return seq_act(seq, p), out

    def sort_inputs(self, seq, vec, labels):
        """Reorder inputs so their labels increase."""
        p = perms.sort_perm(labels)
        if perms.is_identity(p):
            return seq, vec, tuple(labels)
        s2, v2 = self.act(seq, vec, p)
        return s2, v2, tuple(labels[j] for j in p)

    def transposition_matrix(self, seq, t):
        n = arity(seq)
        p = perms.transposition(n, t)
        return [self.act_basis(seq, i, p) for i in range(self.dim(seq))]

    def check_actions(self, top=None):
        """Violations of the symmetric-group relations and chain-map property."""
        bad = []
        F = self.F
        for seq in self.all_seqs(top):
            n = arity(seq)
            L = self.level(seq)
            for i in range(len(L.labels)):
                for t in range(n - 1):
                    p = perms.transposition(n, t)
                    s2 = seq_act(seq, p)
                    v = self.act_basis(seq, i, p)
                    L2 = self.level(s2)
                    for j in v:
                        if L2.degrees[j] != L.degrees[i]:
                            bad.append(("action-degree", seq, i, t))
                    # d(x·s) = (dx)·s
                    lhs = L2.apply_d(v)
                    _, rhs = self.act(seq, L.d[i], p)
                    if vadd(dict(lhs), rhs, -1, F):
                        bad.append(("action-chain", seq, i, t))
                    # s^2 = 1
                    _, back = self.act(s2, v, p)
                    if back != {i: 1}:
                        bad.append(("action-involution", seq, i, t))
                    if t + 1 < n - 1:
                        q = perms.transposition(n, t + 1)
                        x1 = self._chain_act(seq, {i: 1}, [p, q, p])
                        x2 = self._chain_act(seq, {i: 1}, [q, p, q])
                        if vadd(dict(x1), x2, -1, F):
                            bad.append(("action-braid", seq, i, t))
        return bad

    def _chain_act(self, seq, vec, ps):
        for p in ps:
            seq, vec = self.act(seq, vec, p)
        return vec

    def dims(self, top=None):
        out = {}
        for seq in self.all_seqs(top):
            out[seq] = self.level(seq).dims()
        return out

    def total_dims(self, top=None):
        """Single-colored convenience: arity -> total dimension."""
        out = {}
        for seq in self.all_seqs(top):
            out[arity(seq)] = out.get(arity(seq), 0) + self.dim(seq)
        return out

    def is_zero(self, top=None):
        return all(self.dim(s) == 0 for s in self.all_seqs(top))


class ExplicitCollection(Collection):
    """Finitely many levels given by complexes and transposition matrices."""

    def __init__(self, colors, field, ceiling, levels, transpositions=None, zero_above=True):
        Collection.__init__(self, colors, field, ceiling, max_arity=ceiling, zero_above=zero_above)
        self._given = dict(levels)
        self._tr = dict(transpositions or {})

    def _build_level(self, seq):
        L = self._given.get(seq)
        if L is None:
            return zero_complex(self.F)
        return L

    def _transpose_basis(self, seq, i, t):
        M = self._tr.get((seq, t))
        if M is None:
            # trivial action is only meaningful on a fixed sequence
            if seq_act(seq, perms.transposition(arity(seq), t)) == seq and self.dim(seq):
                return {i: 1}
            if self.dim(seq):
                raise KeyError("missing transposition %d on %r" % (t, seq))
            return {}
        return M[i]


class UnitCollection(Collection):
    """
    'I': k at (c;c) for every color; 'E': k at (;c) for every color.
    """

    def __init__(self, kind, colors=("*",), field=QQ, ceiling=4):
        Collection.__init__(self, colors, field, ceiling)
        if kind not in ("I", "E"):
            raise ValueError("unit collection kind must be I or E")
        self.kind = kind

    def _build_level(self, seq):
        ins, out = seq
        if self.kind == "I" and ins == (out,):
            return ground(self.F, 0, ("id", out))
        if self.kind == "E" and ins == ():
            return ground(self.F, 0, ("e", out))
        return zero_complex(self.F)

    def _transpose_basis(self, seq, i, t):
        return {i: 1}

    def vanishes_above(self, n):
        return n >= (1 if self.kind == "I" else 0)


def unit_I(colors=("*",), field=QQ, ceiling=4):
    return UnitCollection("I", colors, field, ceiling)


def unit_E(colors=("*",), field=QQ, ceiling=4):
    return UnitCollection("E", colors, field, ceiling)


def E_star(field=QQ, ceiling=4):
    return UnitCollection("E", ("*",), field, ceiling)


class ZeroCollection(Collection):
    def _build_level(self, seq):
        return zero_complex(self.F)

    def _transpose_basis(self, seq, i, t):
        return {}


class DirectSum(Collection):
    def __init__(self, parts):
        parts = list(parts)
        P0 = parts[0]
        top = None
        for P in parts:
            if P.max_arity is not None and not P.zero_above:
                top = P.max_arity if top is None else min(top, P.max_arity)
        Collection.__init__(self, P0.colors, P0.F, min(P.ceiling for P in parts), top)
        self.parts = parts

    def _offsets(self, seq):
        offs, t = [], 0
        for P in self.parts:
            offs.append(t)
            t += P.dim(seq)
        return offs

    def _build_level(self, seq):
        from .chaincore import direct_sum
        return direct_sum(*[P.level(seq) for P in self.parts])

    def split(self, seq, i):
        offs = self._offsets(seq)
        for k in reversed(range(len(offs))):
            if i >= offs[k]:
                return k, i - offs[k]
        raise IndexError(i)

    def embed(self, seq, k, vec):
        off = self._offsets(seq)[k]
        return {j + off: x for j, x in vec.items()}

    def act_basis(self, seq, i, p):
        k, j = self.split(seq, i)
        s2, v = self.parts[k].act(seq, {j: 1}, p)
        return self.embed(s2, k, v)


class Shifted(Collection):
    def __init__(self, M, n):
        Collection.__init__(self, M.colors, M.F, M.ceiling, M.max_arity, M.zero_above)
        self.M = M
        self.n = n

    def _build_level(self, seq):
        return self.M.level(seq).shift(self.n)

    def act_basis(self, seq, i, p):
        return self.M.act_basis(seq, i, p)


# ---------------------------------------------------------------------------
# composite products

def _block_inputs(f, n):
    blocks = [[] for _ in range(n)]
    for a, target in enumerate(f):
        blocks[target].append(a)
    return [tuple(b) for b in blocks]


class _Composite(Collection):
    """
    (M∘N)(D;c): classes of (n, colors, m, f, ν_1..ν_n) modulo the Σ_n
    relations (m·σ; ν_{σ(1)}..ν_{σ(n)}) ~ (m; ν_1..ν_n).  Only n <= ceiling
    is summed; the policy flag records whether terms were dropped.
    """

    def __init__(self, M, N, ceiling):
        Collection.__init__(self, M.colors, M.F, ceiling, max_arity=ceiling, zero_above=False)
        self.M, self.N = M, N
        self.policy = TruncationPolicy(ceiling, False)
        self._q = {}
        # nullary N-operations let M-operations of any arity land below the ceiling
        if not M.vanishes_above(ceiling) and any(N.available(0) and N.dim(((), c)) for c in N.colors):
            self.policy.truncated = True

    def _raw(self, seq):
        D, c = seq
        r = len(D)
        M, N = self.M, self.N
        basis, degs = [], []
        for n in range(self.ceiling + 1):
            if not M.available(n):
                continue
            for f in product(range(n), repeat=r):
                blocks = _block_inputs(f, n)
                for cols in product(self.colors, repeat=n):
                    mseq = (cols, c)
                    Lm = M.level(mseq)
                    if not Lm.labels:
                        continue
                    nlevels = []
                    ok = True
                    for b, ci in zip(blocks, cols):
                        if not N.available(len(b)):
                            ok = False
                            break
                        Ln = N.level((tuple(D[a] for a in b), ci))
                        if not Ln.labels:
                            ok = False
                            break
                        nlevels.append(Ln)
                    if not ok:
                        continue
                    for mi in range(len(Lm.labels)):
                        for nus in product(*[range(len(L.labels)) for L in nlevels]):
                            basis.append((n, cols, mi, f, nus))
                            degs.append(Lm.degrees[mi] + sum(L.degrees[k] for L, k in zip(nlevels, nus)))
        return basis, degs

    def _quotient(self, seq):
        q = self._q.get(seq)
        if q is not None:
            return q
        D, c = seq
        M, N, F = self.M, self.N, self.F
        basis, degs = self._raw(seq)
        pos = {b: k for k, b in enumerate(basis)}
        rels = []
        for k, (n, cols, mi, f, nus) in enumerate(basis):
            blocks = _block_inputs(f, n)
            ndeg = [N.level((tuple(D[a] for a in b), ci)).degrees[nu]
                    for b, ci, nu in zip(blocks, cols, nus)]
            for t in range(n - 1):
                p = perms.transposition(n, t)
                cols2, mv = M.act((cols, c), {mi: 1}, p)
                cols2 = cols2[0]
                # new block j is old block p[j]
                f2 = tuple(p.index(x) for x in f)
                nus2 = perms.act_seq(nus, p)
                s = perms.koszul_sign(p, ndeg)
                rel = {k: 1}
                for m2, x in mv.items():
                    vadd(rel, {pos[(n, cols2, m2, f2, nus2)]: x}, -s, F)
                if rel:
                    rels.append(rel)
        Q = Quotient(len(basis), rels, F)
        q = (basis, degs, pos, Q)
        self._q[seq] = q
        return q

    def _build_level(self, seq):
        D, c = seq
        basis, degs, pos, Q = self._quotient(seq)
        M, N, F = self.M, self.N, self.F
        labels, ldegs, d = [], [], []
        for qi, k in enumerate(Q.free):
            n, cols, mi, f, nus = basis[k]
            labels.append(("comp", n, cols, M.level((cols, c)).labels[mi], f,
                           tuple(N.level((tuple(D[a] for a in b), ci)).labels[nu]
                                 for b, ci, nu in zip(_block_inputs(f, n), cols, nus))))
            ldegs.append(degs[k])
        for qi, k in enumerate(Q.free):
            d.append(Q.coords(self._raw_d(seq, basis[k], pos)))
        return ChainComplex(labels, ldegs, d, F)

    def _raw_d(self, seq, b, pos):
        D, c = seq
        n, cols, mi, f, nus = b
        M, N, F = self.M, self.N, self.F
        blocks = _block_inputs(f, n)
        nlev = [N.level((tuple(D[a] for a in bl), ci)) for bl, ci in zip(blocks, cols)]
        Lm = M.level((cols, c))
        out = {}
        for m2, x in Lm.d[mi].items():
            vadd(out, {pos[(n, cols, m2, f, nus)]: x}, 1, F)
        sgn = Lm.degrees[mi]
        for j in range(n):
            s = -1 if sgn % 2 else 1
            for nu2, x in nlev[j].d[nus[j]].items():
                nus2 = nus[:j] + (nu2,) + nus[j + 1:]
                vadd(out, {pos[(n, cols, mi, f, nus2)]: x}, s, F)
            sgn += nlev[j].degrees[nus[j]]
        return out

    def act_basis(self, seq, i, p):
        key = (seq, i, p)
        r = self._acts.get(key)
        if r is not None:
            return r
        D, c = seq
        basis, degs, pos, Q = self._quotient(seq)
        n, cols, mi, f, nus = basis[Q.free[i]]
        seq2 = seq_act(seq, p)
        inv = perms.inverse(p)
        N, F = self.N, self.F
        # new position j holds old input p[j]
        f2 = tuple(f[p[j]] for j in range(len(p)))
        blocks = _block_inputs(f, n)
        vec = {(): 1}
        parts = []
        for bl, ci, nu in zip(blocks, cols, nus):
            newlab = [inv[a] for a in bl]
            s, v, _ = N.sort_inputs((tuple(D[a] for a in bl), ci), {nu: 1}, newlab)
            parts.append(v)
        # tensor the reordered block vectors
        for v in parts:
            nv = {}
            for key0, x in vec.items():
                for kk, y in v.items():
                    nv[key0 + (kk,)] = x * y
            vec = nv
        basis2, degs2, pos2, Q2 = self._quotient(seq2)
        raw = {}
        for nus2, x in vec.items():
            vadd(raw, {pos2[(n, cols, mi, f2, nus2)]: x}, 1, F)
        r = Q2.coords(raw)
        self._acts[key] = r
        return r


def compose(M, N, ceiling=None):
    """The composite product M∘N, levelwise up to the ceiling."""
    if M.colors != N.colors:
        raise ValueError("colorset mismatch")
    if M.F != N.F:
        raise ValueError("field mismatch")
    if ceiling is None:
        ceiling = min(M.ceiling, N.ceiling)
    return _Composite(M, N, ceiling)


class _InfComposite(Collection):
    """
    (M∘_(1)N)(D;c): triples (S, m, ν) with S the sorted inputs fed to the
    N-operation ν, and m an operation whose first input receives ν and
    whose remaining inputs are the other elements of D in order.
    """

    def __init__(self, M, N, ceiling):
        Collection.__init__(self, M.colors, M.F, ceiling, max_arity=ceiling, zero_above=False)
        self.M, self.N = M, N
        self._basis = {}

    def _enum(self, seq):
        b = self._basis.get(seq)
        if b is not None:
            return b
        D, c = seq
        r = len(D)
        out = []
        for mask in range(1 << r):
            S = tuple(a for a in range(r) if mask >> a & 1)
            rest = tuple(a for a in range(r) if not mask >> a & 1)
            if not self.M.available(len(rest) + 1) or not self.N.available(len(S)):
                continue
            for c2 in self.colors:
                Lm = self.M.level(((c2,) + tuple(D[a] for a in rest), c))
                Ln = self.N.level((tuple(D[a] for a in S), c2))
                for mi in range(len(Lm.labels)):
                    for ni in range(len(Ln.labels)):
                        out.append((S, c2, mi, ni))
        pos = {x: k for k, x in enumerate(out)}
        self._basis[seq] = (out, pos)
        return out, pos

    def _lv(self, seq, S, c2):
        D, c = seq
        rest = tuple(a for a in range(len(D)) if a not in S)
        Lm = self.M.level(((c2,) + tuple(D[a] for a in rest), c))
        Ln = self.N.level((tuple(D[a] for a in S), c2))
        return rest, Lm, Ln

    def _build_level(self, seq):
        basis, pos = self._enum(seq)
        F = self.F
        labels, degs, d = [], [], []
        for (S, c2, mi, ni) in basis:
            rest, Lm, Ln = self._lv(seq, S, c2)
            labels.append(("inf", S, c2, Lm.labels[mi], Ln.labels[ni]))
            degs.append(Lm.degrees[mi] + Ln.degrees[ni])
            img = {}
            for m2, x in Lm.d[mi].items():
                vadd(img, {pos[(S, c2, m2, ni)]: x}, 1, F)
            s = -1 if Lm.degrees[mi] % 2 else 1
            for n2, x in Ln.d[ni].items():
                vadd(img, {pos[(S, c2, mi, n2)]: x}, s, F)
            d.append(img)
        return ChainComplex(labels, degs, d, F)

    def act_basis(self, seq, i, p):
        key = (seq, i, p)
        r = self._acts.get(key)
        if r is not None:
            return r
        basis, pos = self._enum(seq)
        S, c2, mi, ni = basis[i]
        D, c = seq
        rest, Lm, Ln = self._lv(seq, S, c2)
        inv = perms.inverse(p)
        seq2 = seq_act(seq, p)
        S2 = tuple(sorted(inv[a] for a in S))
        _, nv, _ = self.N.sort_inputs((tuple(D[a] for a in S), c2), {ni: 1}, [inv[a] for a in S])
        _, mv, _ = self.M.sort_inputs(((c2,) + tuple(D[a] for a in rest), c), {mi: 1},
                                      [-1] + [inv[a] for a in rest])
        basis2, pos2 = self._enum(seq2)
        r = {}
        for m2, x in mv.items():
            for n2, y in nv.items():
                vadd(r, {pos2[(S2, c2, m2, n2)]: x * y}, 1, self.F)
        self._acts[key] = r
        return r


def inf_compose(M, N, ceiling=None):
    """The infinitesimal composite product M∘_(1)N."""
    if M.colors != N.colors:
        raise ValueError("colorset mismatch")
    if M.F != N.F:
        raise ValueError("field mismatch")
    if ceiling is None:
        ceiling = min(M.ceiling, N.ceiling)
    return _InfComposite(M, N, ceiling)
