"""
Colored dg operads given by partial compositions x∘_i y, presets, and an
exhaustive axiom checker.

Convention: for x in level (c_1..c_n; c) and y in level (d_1..d_k; c_i),
x∘_i y lies in (c_1..c_{i-1}, d_1..d_k, c_{i+1}..c_n; c).  Slots are
0-based in code.
"""

from itertools import product

from . import perms
from .chaincore import ChainComplex, ground, zero_complex
from .collection import Collection, arity, seq_act, substitute
from .linalg import QQ, vadd


class AxiomReport:
    """Violations as (axiom, witness, entry); empty iff all checks pass."""

    def __init__(self, items=(), checked=0):
        self.items = list(items)
        self.checked = checked

    def add(self, axiom, witness, entry=None):
        self.items.append((axiom, witness, entry))

    def extend(self, other):
        self.items.extend(other.items)
        self.checked += other.checked

    @property
    def ok(self):
        return not self.items

    def __bool__(self):
        return self.ok

    def __len__(self):
        return len(self.items)

    def names(self):
        return sorted({a for a, _, _ in self.items})

    def __repr__(self):
        if self.ok:
            return "AxiomReport(ok, %d checks)" % self.checked
        return "AxiomReport(%d violations: %s)" % (len(self.items), self.names())

    def lines(self):
        return ["%s\t%r\t%r" % it for it in self.items]


def _max_entry(v):
    best = None
    for k, x in sorted(v.items()):
        if best is None or abs(x) > abs(best[1]):
            best = (k, x)
    return best


class Operad(Collection):
    """
    Subclasses implement _build_level, an action and _compose_basis.
    """

    cofibrant = False
    name = "operad"

    def __init__(self, colors=("*",), field=QQ, ceiling=4, max_arity=None, zero_above=False):
        Collection.__init__(self, colors, field, ceiling, max_arity, zero_above)
        self._comp = {}

    def unit(self, c):
        """Basis index of id_c in level ((c,), c)."""
        raise NotImplementedError

    def unit_vec(self, c):
        return {self.unit(c): 1}

    def _compose_basis(self, s1, i, slot, s2, j):
        raise NotImplementedError

    def compose_basis(self, s1, i, slot, s2, j):
        key = (s1, i, slot, s2, j)
        r = self._comp.get(key)
        if r is None:
            if s1[0][slot] != s2[1]:
                raise ValueError("color mismatch")
            n = arity(s1) + arity(s2) - 1
            if self.max_arity is not None and n > self.max_arity and self.zero_above:
                r = {}
            else:
                r = self._compose_basis(s1, i, slot, s2, j)
            self._comp[key] = r
        return r

    def compose(self, s1, v1, slot, s2, v2):
        """x∘_slot y on vectors; returns (sequence, vector)."""
        out = {}
        F = self.F
        for i, x in v1.items():
            for j, y in v2.items():
                vadd(out, self.compose_basis(s1, i, slot, s2, j), x * y, F)
        return substitute(s1, slot, s2), out

    def total_compose(self, s, v, args):
        """
        γ(x; y_1..y_n) with args a list of (seq, vec) or None for an
        identity; ys are plugged left to right, so no Koszul sign arises.
        Returns (seq, vec).
        """
        pos = 0
        for a in args:
            if a is None:
                pos += 1
                continue
            s2, v2 = a
            s, v = self.compose(s, v, pos, s2, v2)
            pos += arity(s2)
        return s, v

    def identity_seq(self, c):
        return ((c,), c)


def _arities_ok(P, top, *ns):
    return all(0 <= n <= top and P.available(n) for n in ns)


def check_operad(P, top=None, sample=None):
    """
    Verify operad axioms on every basis instance all of whose arities are
    at most `top` (default: the ceiling).
    """
    top = P.ceiling if top is None else top
    rep = AxiomReport()
    F = P.F
    seqs = list(P.all_seqs(top))
    # differential and actions
    for seq in seqs:
        L = P.level(seq)
        for i, img in enumerate(L.d):
            dd = L.apply_d(img)
            rep.checked += 1
            if dd:
                rep.add("d_squared", (seq, L.labels[i]), _max_entry(dd))
    for a in P.check_actions(top):
        rep.add(a[0], a[1:])
    rep.checked += len(seqs)
    # units
    for seq in seqs:
        n = arity(seq)
        L = P.level(seq)
        c = seq[1]
        for i in range(len(L.labels)):
            _, v = P.compose(P.identity_seq(c), P.unit_vec(c), 0, seq, {i: 1})
            rep.checked += 1
            if vadd(dict(v), {i: 1}, -1, F):
                rep.add("left_unit", (seq, L.labels[i]), _max_entry(vadd(dict(v), {i: 1}, -1, F)))
            for s in range(n):
                cs = seq[0][s]
                _, v = P.compose(seq, {i: 1}, s, P.identity_seq(cs), P.unit_vec(cs))
                rep.checked += 1
                diff = vadd(dict(v), {i: 1}, -1, F)
                if diff:
                    rep.add("right_unit", (seq, L.labels[i], s), _max_entry(diff))
    for c in P.colors:
        L = P.level(P.identity_seq(c))
        u = P.unit(c)
        if L.degrees[u] != 0 or L.d[u]:
            rep.add("unit_cycle", (c,), None)
    by_out = {}
    for s in seqs:
        by_out.setdefault(s[1], []).append(s)
    # chain-map property and equivariance of ∘_i
    for s1 in seqs:
        n1 = arity(s1)
        L1 = P.level(s1)
        if not L1.labels:
            continue
        for slot in range(n1):
            for s2 in by_out.get(s1[0][slot], []):
                n2 = arity(s2)
                if not _arities_ok(P, top, n1 + n2 - 1):
                    continue
                L2 = P.level(s2)
                s12 = substitute(s1, slot, s2)
                L12 = P.level(s12)
                for i in range(len(L1.labels)):
                    for j in range(len(L2.labels)):
                        xy = P.compose_basis(s1, i, slot, s2, j)
                        rep.checked += 1
                        lhs = L12.apply_d(xy)
                        _, a = P.compose(s1, L1.d[i], slot, s2, {j: 1})
                        _, b = P.compose(s1, {i: 1}, slot, s2, L2.d[j])
                        sg = -1 if L1.degrees[i] % 2 else 1
                        diff = vadd(vadd(dict(lhs), a, -1, F), b, -sg, F)
                        if diff:
                            rep.add("chain_map", (s1, i, slot, s2, j), _max_entry(diff))
                        rep.checked += 1
                        diff = _equivariance_defect(P, s1, i, slot, s2, j)
                        if diff:
                            rep.add("equivariance", (s1, i, slot, s2, j), _max_entry(diff))
    # associativity
    for s1 in seqs:
        n1 = arity(s1)
        L1 = P.level(s1)
        if not L1.labels:
            continue
        for slot in range(n1):
            for s2 in by_out.get(s1[0][slot], []):
                n2 = arity(s2)
                if not _arities_ok(P, top, n1 + n2 - 1):
                    continue
                L2 = P.level(s2)
                if not L2.labels:
                    continue
                s12 = substitute(s1, slot, s2)
                # sequential: (x∘_slot y)∘_{slot+t} z = x∘_slot (y∘_t z)
                for t in range(n2):
                    for s3 in by_out.get(s2[0][t], []):
                        n3 = arity(s3)
                        if not _arities_ok(P, top, n2 + n3 - 1, n1 + n2 + n3 - 2):
                            continue
                        L3 = P.level(s3)
                        for i, j, k in product(range(len(L1.labels)), range(len(L2.labels)),
                                               range(len(L3.labels))):
                            rep.checked += 1
                            _, a = P.compose(s12, P.compose_basis(s1, i, slot, s2, j), slot + t, s3, {k: 1})
                            s23 = substitute(s2, t, s3)
                            _, b = P.compose(s1, {i: 1}, slot, s23, P.compose_basis(s2, j, t, s3, k))
                            diff = vadd(dict(a), b, -1, F)
                            if diff:
                                rep.add("sequential_associativity", (s1, i, slot, s2, j, t, s3, k),
                                        _max_entry(diff))
                # parallel: (x∘_slot y)∘_{u+n2-1} z = ± (x∘_u z)∘_slot y, slot < u
                for u in range(slot + 1, n1):
                    for s3 in by_out.get(s1[0][u], []):
                        n3 = arity(s3)
                        if not _arities_ok(P, top, n1 + n3 - 1, n1 + n2 + n3 - 2):
                            continue
                        L3 = P.level(s3)
                        s13 = substitute(s1, u, s3)
                        for i, j, k in product(range(len(L1.labels)), range(len(L2.labels)),
                                               range(len(L3.labels))):
                            rep.checked += 1
                            _, a = P.compose(s12, P.compose_basis(s1, i, slot, s2, j), u + n2 - 1, s3, {k: 1})
                            _, b = P.compose(s13, P.compose_basis(s1, i, u, s3, k), slot, s2, {j: 1})
                            sg = -1 if (L2.degrees[j] * L3.degrees[k]) % 2 else 1
                            diff = vadd(dict(a), b, -sg, F)
                            if diff:
                                rep.add("parallel_associativity", (s1, i, slot, s2, j, u, s3, k),
                                        _max_entry(diff))
    return rep


def _equivariance_defect(P, s1, i, slot, s2, j):
    """Checks adjacent transpositions on either factor of x∘_slot y."""
    F = P.F
    n1, n2 = arity(s1), arity(s2)
    out = {}
    s12 = substitute(s1, slot, s2)
    xy = P.compose_basis(s1, i, slot, s2, j)
    # (x·σ)∘_a y = (x∘_{σ(a)} y)·block(σ) with a = σ^{-1}(slot)
    for t in range(n1 - 1):
        p = perms.transposition(n1, t)
        a = perms.inverse(p)[slot]
        sx, vx = P.act(s1, {i: 1}, p)
        _, lhs = P.compose(sx, vx, a, s2, {j: 1})
        sizes = [n2 if k == slot else 1 for k in range(n1)]
        _, rhs = P.act(s12, xy, perms.block_perm(p, sizes))
        diff = vadd(dict(lhs), rhs, -1, F)
        if diff:
            return diff
    # x∘_slot (y·π) = (x∘_slot y)·(id ⊕ π ⊕ id)
    for t in range(n2 - 1):
        p = perms.transposition(n2, t)
        sy, vy = P.act(s2, {j: 1}, p)
        _, lhs = P.compose(s1, {i: 1}, slot, sy, vy)
        big = list(range(n1 + n2 - 1))
        big[slot:slot + n2] = [slot + q for q in p]
        _, rhs = P.act(s12, xy, tuple(big))
        diff = vadd(dict(lhs), rhs, -1, F)
        if diff:
            return diff
    return out


# ---------------------------------------------------------------------------
# presets

class ComOperad(Operad):
    """Com: k in every arity (every colored sequence), trivial actions."""

    name = "Com"

    def __init__(self, ceiling=4, colors=("*",), field=QQ):
        Operad.__init__(self, colors, field, ceiling)

    def _build_level(self, seq):
        return ground(self.F, 0, ("mu", arity(seq)))

    def unit(self, c):
        return 0

    def act_basis(self, seq, i, p):
        return {0: 1}

    def _compose_basis(self, s1, i, slot, s2, j):
        s = substitute(s1, slot, s2)
        if not self.level(s).labels:
            return {}
        return {0: 1}


class NilpotentOperad(ComOperad):
    """
    Com restricted to arities 1..k, everything landing in arity > k being
    zero.  nilpotent(2) is k·id in arity 1 and k·μ in arity 2.
    """

    def __init__(self, k=2, ceiling=None, colors=("*",), field=QQ):
        if k < 1:
            raise ValueError("nilpotency arity must be >= 1")
        ceiling = k if ceiling is None else ceiling
        Operad.__init__(self, colors, field, ceiling, max_arity=k, zero_above=True)
        self.k = k
        self.name = "nilpotent(%d)" % k

    def _build_level(self, seq):
        n = arity(seq)
        if n == 0 or n > self.k:
            return zero_complex(self.F)
        return ground(self.F, 0, ("mu", n))


class AssOperad(Operad):
    """
    Ass: basis of level n the words w (permutations of 0..n-1), read as
    x ↦ x_{w_0}...x_{w_{n-1}}; regular Σ_n-action.
    """

    name = "Ass"

    def __init__(self, ceiling=4, colors=("*",), field=QQ, storage_cap=5040):
        Operad.__init__(self, colors, field, ceiling)
        self.storage_cap = storage_cap

    def _words(self, n):
        return perms.all_perms(n)

    def _build_level(self, seq):
        n = arity(seq)
        ws = self._words(n)
        if len(ws) > self.storage_cap:
            raise MemoryError("Ass(%d) exceeds storage cap %d" % (n, self.storage_cap))
        return ChainComplex([("w",) + w for w in ws], [0] * len(ws), None, self.F, check=False)

    def word_index(self, seq, w):
        return self.level(seq).index(("w",) + tuple(w))

    def unit(self, c):
        return 0

    def act_basis(self, seq, i, p):
        w = self.level(seq).labels[i][1:]
        inv = perms.inverse(p)
        w2 = tuple(inv[a] for a in w)
        return {self.word_index(seq_act(seq, p), w2): 1}

    def _compose_basis(self, s1, i, slot, s2, j):
        w = self.level(s1).labels[i][1:]
        v = self.level(s2).labels[j][1:]
        k = len(v)
        out = []
        for a in w:
            if a == slot:
                out.extend(slot + b for b in v)
            elif a > slot:
                out.append(a + k - 1)
            else:
                out.append(a)
        s = substitute(s1, slot, s2)
        return {self.word_index(s, out): 1}


class IdentityOperad(Operad):
    """I_C: k·id_c at (c;c), zero elsewhere."""

    name = "I"
    cofibrant = True

    def __init__(self, ceiling=4, colors=("*",), field=QQ):
        Operad.__init__(self, colors, field, ceiling, max_arity=1, zero_above=True)

    def _build_level(self, seq):
        ins, out = seq
        if ins == (out,):
            return ground(self.F, 0, ("id", out))
        return zero_complex(self.F)

    def unit(self, c):
        return 0

    def act_basis(self, seq, i, p):
        return {0: 1}

    def _compose_basis(self, s1, i, slot, s2, j):
        return {0: 1}


PRESETS = ("I", "Com", "Ass", "nilpotent", "from_square_zero")


def preset(name, N=4, colors=("*",), field=QQ, **params):
    key = str(name).lower()
    if key in ("i", "identity", "unit"):
        P = IdentityOperad(N, colors, field)
    elif key == "com":
        P = ComOperad(N, colors, field)
    elif key == "ass":
        P = AssOperad(N, colors, field, params.get("storage_cap", 5040))
        if N > 7:
            raise MemoryError("Ass beyond arity 7 exceeds the storage cap")
    elif key.startswith("nilpotent"):
        k = params.get("k")
        if k is None:
            tail = key[len("nilpotent"):].strip("()") or "2"
            k = int(tail)
        P = NilpotentOperad(k, N, colors, field)
    elif key in ("from_square_zero", "square_zero"):
        from .ibmod import square_zero, self_ib
        base = params.get("base") or ComOperad(N, colors, field)
        M = params.get("module") or self_ib(base)
        P = square_zero(base, M)
    else:
        raise ValueError("unknown preset %r" % (name,))
    return P


# ---------------------------------------------------------------------------
# operad maps

class OperadMap:
    """
    A map P -> Q: a color map and, per sequence, images of basis elements
    given by `image(seq, i)` -> vector in Q.level(alpha(seq)).
    """

    def __init__(self, source, target, image, color_map=None, name="map"):
        self.source = source
        self.target = target
        self._image = image
        self.alpha = dict(color_map) if color_map else {c: c for c in source.colors}
        self.name = name
        self._cache = {}

    def map_seq(self, seq):
        return (tuple(self.alpha[c] for c in seq[0]), self.alpha[seq[1]])

    def image_basis(self, seq, i):
        key = (seq, i)
        r = self._cache.get(key)
        if r is None:
            r = self._image(seq, i)
            self._cache[key] = r
        return r

    def apply(self, seq, vec):
        out = {}
        for i, x in vec.items():
            vadd(out, self.image_basis(seq, i), x, self.target.F)
        return out

    def check(self, top=None):
        P, Q = self.source, self.target
        top = min(P.ceiling, Q.ceiling) if top is None else top
        rep = AxiomReport()
        F = Q.F
        for c in P.colors:
            v = self.apply(P.identity_seq(c), P.unit_vec(c))
            rep.checked += 1
            if vadd(dict(v), Q.unit_vec(self.alpha[c]), -1, F):
                rep.add("map_unit", (c,))
        seqs = list(P.all_seqs(top))
        for seq in seqs:
            L = P.level(seq)
            LQ = Q.level(self.map_seq(seq))
            for i in range(len(L.labels)):
                rep.checked += 1
                a = LQ.apply_d(self.image_basis(seq, i))
                b = self.apply(seq, L.d[i])
                if vadd(dict(a), b, -1, F):
                    rep.add("map_chain", (seq, i))
                for t in range(arity(seq) - 1):
                    p = perms.transposition(arity(seq), t)
                    s2, v = P.act(seq, {i: 1}, p)
                    lhs = self.apply(s2, v)
                    _, rhs = Q.act(self.map_seq(seq), self.image_basis(seq, i), p)
                    if vadd(dict(lhs), rhs, -1, F):
                        rep.add("map_equivariance", (seq, i, t))
        for s1 in seqs:
            for slot in range(arity(s1)):
                for s2 in seqs:
                    if s2[1] != s1[0][slot] or arity(s1) + arity(s2) - 1 > top:
                        continue
                    for i in range(P.dim(s1)):
                        for j in range(P.dim(s2)):
                            rep.checked += 1
                            s12, v = P.compose(s1, {i: 1}, slot, s2, {j: 1})
                            lhs = self.apply(s12, v)
                            _, rhs = Q.compose(self.map_seq(s1), self.image_basis(s1, i), slot,
                                               self.map_seq(s2), self.image_basis(s2, j))
                            if vadd(dict(lhs), rhs, -1, F):
                                rep.add("map_composition", (s1, i, slot, s2, j))
        return rep


def identity_map(P):
    return OperadMap(P, P, lambda seq, i: {i: 1}, name="id")


def abelianization(A, C):
    """Ass -> Com sending every word to μ_n."""
    return OperadMap(A, C, lambda seq, i: {0: 1}, name="ab")


def unit_map(I, P):
    """I -> P."""
    return OperadMap(I, P, lambda seq, i: P.unit_vec(seq[1]), name="unit")
