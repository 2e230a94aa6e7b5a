"""
Graded spaces and chain complexes over an exact field.

Grading is homological: the differential has degree -1 and C[n] puts
C_k in degree k+n.  A complex is stored flat: a tuple of basis labels,
a tuple of degrees and, for each basis element, its image under d as a
sparse vector of flat indices.
"""

import os
from math import comb

from .linalg import QQ, SparseMatrix, rank, vadd


class InsufficientSupport(ValueError):
    pass


class GradedSpace:
    def __init__(self, labels, degrees, field=QQ):
        self.labels = tuple(labels)
        self.degrees = tuple(int(x) for x in degrees)
        if len(self.labels) != len(self.degrees):
            raise ValueError("labels and degrees differ in length")
        self.F = field
        self._index = None
        self._bydeg = None

    @property
    def dim(self):
        return len(self.labels)

    def __len__(self):
        return len(self.labels)

    def index(self, label):
        if self._index is None:
            self._index = {l: i for i, l in enumerate(self.labels)}
        return self._index[label]

    def by_degree(self):
        if self._bydeg is None:
            bd = {}
            for i, n in enumerate(self.degrees):
                bd.setdefault(n, []).append(i)
            self._bydeg = bd
        return self._bydeg

    def indices(self, n):
        return self.by_degree().get(n, [])

    def dims(self):
        return {n: len(v) for n, v in sorted(self.by_degree().items())}

    def dim_in(self, n):
        return len(self.indices(n))

    def degree_range(self):
        if not self.degrees:
            return (0, 0)
        return (min(self.degrees), max(self.degrees))


class ChainComplex(GradedSpace):
    """
    d[i] is the image of basis element i.  `support` is the window
    (lo, hi) on which the complex is declared to be known; outside it
    the complex is zero.
    """

    def __init__(self, labels, degrees, d=None, field=QQ, support=None, check=True):
        GradedSpace.__init__(self, labels, degrees, field)
        n = len(self.labels)
        if d is None:
            d = [{}] * n
        self.d = tuple(d)
        if len(self.d) != n:
            raise ValueError("differential has wrong length")
        if support is None:
            support = self.degree_range()
        self.support = (int(support[0]), int(support[1]))
        if check:
            self.check()

    def check(self):
        degs = self.degrees
        for i, img in enumerate(self.d):
            for j in img:
                if degs[j] != degs[i] - 1:
                    raise ValueError("differential of %r is not of degree -1" % (self.labels[i],))
        for i, img in enumerate(self.d):
            dd = {}
            for j, x in img.items():
                vadd(dd, self.d[j], x, self.F)
            if dd:
                raise ValueError("d^2 != 0 on %r" % (self.labels[i],))

    def apply_d(self, v):
        out = {}
        for i, x in v.items():
            vadd(out, self.d[i], x, self.F)
        return out

    def is_zero_differential(self):
        return not any(self.d)

    def diff_matrix(self, n):
        """d_n as a SparseMatrix from C_n to C_{n-1} (local indices)."""
        src = self.indices(n)
        tgt = self.indices(n - 1)
        pos = {j: k for k, j in enumerate(tgt)}
        cols = [{pos[j]: x for j, x in self.d[i].items()} for i in src]
        return SparseMatrix(len(tgt), len(src), cols, self.F)

    def rank_d(self, n):
        return rank([self.d[i] for i in self.indices(n)], self.F)

    def homology(self, window=None):
        return homology(self, window)

    def shift(self, k):
        return shift(self, k)

    def __repr__(self):
        return "ChainComplex(%s)" % (self.dims(),)


def zero_complex(field=QQ):
    return ChainComplex([], [], [], field)


def ground(field=QQ, degree=0, label="1"):
    """k concentrated in one degree."""
    return ChainComplex([label], [degree], [{}], field)


def from_dims(dims, field=QQ, prefix="e"):
    labels, degs = [], []
    for n in sorted(dims):
        for k in range(dims[n]):
            labels.append((prefix, n, k))
            degs.append(n)
    return ChainComplex(labels, degs, None, field)


class BettiTable:
    def __init__(self, rows):
        self.rows = tuple(sorted((int(n), int(d)) for n, d in rows))

    def as_dict(self, nonzero=True):
        return {n: d for n, d in self.rows if d or not nonzero}

    def __getitem__(self, n):
        for k, d in self.rows:
            if k == n:
                return d
        return 0

    def total(self):
        return sum(d for _, d in self.rows)

    def euler(self):
        return sum((-1) ** (n % 2) * d for n, d in self.rows)

    def __eq__(self, other):
        if isinstance(other, BettiTable):
            return self.as_dict() == other.as_dict()
        if isinstance(other, dict):
            return self.as_dict() == {k: v for k, v in other.items() if v}
        return NotImplemented

    def __repr__(self):
        return "BettiTable(%s)" % (self.as_dict(),)


def _rank_job(args):
    vecs, field = args
    return rank(vecs, field)


def threads():
    try:
        return max(1, int(os.environ.get("OPERADLAB_THREADS", "1")))
    except ValueError:
        return 1


def pmap(fn, items):
    """Deterministic map, optionally run in worker processes."""
    items = list(items)
    t = threads()
    if t <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    from concurrent.futures import ProcessPoolExecutor
    with ProcessPoolExecutor(max_workers=t) as ex:
        return list(ex.map(fn, items))


def homology(C, window=None):
    lo, hi = C.support
    if window is None:
        window = (lo, hi)
    a, b = int(window[0]), int(window[1])
    if a > b:
        raise ValueError("empty window")
    if a < lo - 1 or b > hi + 1:
        raise InsufficientSupport(
            "insufficient support: window [%d,%d] exceeds [%d,%d] padded by one" % (a, b, lo, hi))
    degs = list(range(a, b + 2))
    jobs = [([C.d[i] for i in C.indices(n)], C.F) for n in degs]
    ranks = dict(zip(degs, pmap(_rank_job, jobs)))
    rows = []
    for n in range(a, b + 1):
        rows.append((n, C.dim_in(n) - ranks[n] - ranks[n + 1]))
    return BettiTable(rows)


def shift(C, k):
    """C[k]: degrees raised by k, differential multiplied by (-1)^k."""
    s = -1 if k % 2 else 1
    d = [{j: s * x for j, x in img.items()} if s < 0 else dict(img) for img in C.d]
    return ChainComplex(C.labels, [n + k for n in C.degrees], d, C.F,
                        (C.support[0] + k, C.support[1] + k), check=False)


def direct_sum(*Cs):
    if not Cs:
        return zero_complex()
    F = Cs[0].F
    labels, degs, d = [], [], []
    off = 0
    lo = min(C.support[0] for C in Cs)
    hi = max(C.support[1] for C in Cs)
    for k, C in enumerate(Cs):
        labels.extend((k, l) for l in C.labels)
        degs.extend(C.degrees)
        d.extend({j + off: x for j, x in img.items()} for img in C.d)
        off += len(C.labels)
    return ChainComplex(labels, degs, d, F, (lo, hi), check=False)


def tensor(C1, C2):
    """Basis (x, y) in row-major order; d(x⊗y) = dx⊗y + (-1)^|x| x⊗dy."""
    if C1.F != C2.F:
        raise ValueError("field mismatch")
    n2 = len(C2.labels)
    labels, degs, d = [], [], []
    for i, (l1, a) in enumerate(zip(C1.labels, C1.degrees)):
        s = -1 if a % 2 else 1
        for j, (l2, b) in enumerate(zip(C2.labels, C2.degrees)):
            labels.append((l1, l2))
            degs.append(a + b)
            img = {}
            for i2, x in C1.d[i].items():
                img[i2 * n2 + j] = x
            for j2, x in C2.d[j].items():
                vadd(img, {i * n2 + j2: x}, s, C1.F)
            d.append(img)
    sup = (C1.support[0] + C2.support[0], C1.support[1] + C2.support[1])
    out = ChainComplex(labels, degs, d, C1.F, sup, check=False)
    out.check()
    return out


def tensor_power(C, m):
    out = ground(C.F)
    for _ in range(m):
        out = tensor(out, C)
    return out


def _transpose_d(C):
    tr = [dict() for _ in C.labels]
    for i, img in enumerate(C.d):
        for j, x in img.items():
            tr[j][i] = x
    return tr


def hom_complex(C1, C2, window=None):
    """
    Hom_p = prod_q Hom(C1_q, C2_{q+p}); basis element ('hom', a, b) is the
    map sending basis a of C1 to basis b of C2.  ∂f = d∘f - (-1)^|f| f∘d.
    With a window (lo, hi) only degrees lo-1..hi+1 are built and the
    declared support is (lo, hi).
    """
    if C1.F != C2.F:
        raise ValueError("field mismatch")
    F = C1.F
    keep = None
    if window is not None:
        keep = (window[0] - 1, window[1] + 1)
    pairs = []
    for i, a in enumerate(C1.degrees):
        for j, b in enumerate(C2.degrees):
            p = b - a
            if keep is None or keep[0] <= p <= keep[1]:
                pairs.append((i, j))
    pos = {pq: k for k, pq in enumerate(pairs)}
    tr1 = _transpose_d(C1)
    labels, degs, d = [], [], []
    for (i, j) in pairs:
        p = C2.degrees[j] - C1.degrees[i]
        labels.append(("hom", C1.labels[i], C2.labels[j]))
        degs.append(p)
        img = {}
        # d∘f: a ↦ d(b)
        for j2, x in C2.d[j].items():
            k = pos.get((i, j2))
            if k is not None:
                vadd(img, {k: x}, 1, F)
        # f∘d: a' ↦ coefficient of a in d(a') times b
        s = 1 if p % 2 else -1
        for i2, x in tr1[i].items():
            k = pos.get((i2, j))
            if k is not None:
                vadd(img, {k: x}, s, F)
        d.append(img)
    if window is not None:
        # only degrees lo..hi have both neighbours present
        sup = (window[0] + 1, window[1] - 1)
    elif degs:
        sup = (min(degs), max(degs))
    else:
        sup = (0, 0)
    out = ChainComplex(labels, degs, d, F, sup, check=False)
    out.check()
    return out


class ChainMap:
    """
    A degree-r map; `matrix` is a SparseMatrix from source to target
    (flat indices).  Chain condition: d∘f = (-1)^r f∘d.
    """

    def __init__(self, source, target, matrix, degree=0, check=True):
        self.source = source
        self.target = target
        self.degree = int(degree)
        self.matrix = matrix
        if matrix.nrows != len(target.labels) or matrix.ncols != len(source.labels):
            raise ValueError("chain map matrix has wrong shape")
        if check:
            self.check()

    def apply(self, v):
        return self.matrix.apply(v)

    def violations(self):
        bad = []
        r = self.degree
        s = -1 if r % 2 else 1
        F = self.source.F
        for i, col in enumerate(self.matrix.cols):
            for j in col:
                if self.target.degrees[j] != self.source.degrees[i] + r:
                    bad.append(("degree", self.source.labels[i]))
                    break
            lhs = self.target.apply_d(col)
            rhs = self.matrix.apply(self.source.d[i])
            diff = vadd(dict(lhs), rhs, -s, F)
            if diff:
                bad.append(("chain", self.source.labels[i]))
        return bad

    def check(self):
        bad = self.violations()
        if bad:
            raise ValueError("not a chain map: %r" % (bad[:3],))

    def compose(self, other):
        """self ∘ other."""
        return ChainMap(other.source, self.target, self.matrix @ other.matrix,
                        self.degree + other.degree, check=False)

    @classmethod
    def identity(cls, C):
        return cls(C, C, SparseMatrix.identity(len(C.labels), C.F), 0, check=False)


def sphere(n, field=QQ):
    """k ⊕ k[n] with zero differential."""
    if n < 0:
        raise ValueError("sphere(n) needs n >= 0")
    return ChainComplex(["1", "s%d" % n], [0, n], None, field)


def mapping_fiber(f):
    """
    Fib(f)_n = X_n ⊕ Y_{n+1}, d(x, y) = (dx, f(x) - dy) for a degree-0
    chain map f: X -> Y.
    """
    X, Y = f.source, f.target
    F = X.F
    nx = len(X.labels)
    labels = [("x", l) for l in X.labels] + [("y", l) for l in Y.labels]
    degs = list(X.degrees) + [n - 1 for n in Y.degrees]
    d = []
    for i in range(nx):
        img = dict(X.d[i])
        for j, x in f.matrix.cols[i].items():
            vadd(img, {nx + j: x}, 1, F)
        d.append(img)
    for j in range(len(Y.labels)):
        d.append({nx + k: -x for k, x in Y.d[j].items()})
    lo = min(X.support[0], Y.support[0] - 1)
    hi = max(X.support[1], Y.support[1] - 1)
    return ChainComplex(labels, degs, d, F, (lo, hi))


def augmentation(C, unit_index=0):
    """Projection of C onto k spanned by its unit basis element."""
    k = ground(C.F)
    cols = [{0: 1} if i == unit_index else {} for i in range(len(C.labels))]
    return ChainMap(C, k, SparseMatrix(1, len(C.labels), cols, C.F))


class LoopFiberReport:
    def __init__(self, m, tables, window):
        self.m = m
        self.window = window
        self.tables = tables
        final = tables[-1][1]
        n0 = tables[-1][0]
        for n, t in reversed(tables):
            if t == final:
                n0 = n
            else:
                break
        self.table = final
        self.n0 = n0
        self.stabilized = len(tables) >= 2 and tables[-1][1] == tables[-2][1]

    def __repr__(self):
        return "LoopFiberReport(m=%d, %s, n0=%d, stabilized=%s)" % (
            self.m, self.table.as_dict(), self.n0, self.stabilized)


def stable_loop_fiber(m, n_max, window, field=QQ):
    """
    Homology, in the window, of Ω^n of the fiber of the augmentation
    sphere(n)^{⊗m} -> k for n = 0..n_max, with the stabilisation point.
    """
    if m < 1:
        raise ValueError("m >= 1 required")
    lo, hi = window
    tables = []
    for n in range(0, n_max + 1):
        S = tensor_power(sphere(n, field), m)
        unit = S.index(_unit_label(m))
        fib = mapping_fiber(augmentation(S, unit))
        C = shift(fib, -n)
        C.support = (min(C.support[0], lo), max(C.support[1], hi))
        tables.append((n, homology(C, (lo, hi))))
    return LoopFiberReport(m, tables, (lo, hi))


def _unit_label(m):
    lab = "1"
    for _ in range(m):
        lab = (lab, "1")
    return lab


def binomial_fiber_dims(m, n, window):
    """Direct expansion of the loop fiber: C(m,i) copies of k in degree (i-1)n."""
    out = {}
    for i in range(1, m + 1):
        deg = (i - 1) * n
        if window[0] <= deg <= window[1]:
            out[deg] = out.get(deg, 0) + comb(m, i)
    return out
