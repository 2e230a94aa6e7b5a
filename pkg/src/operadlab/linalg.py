"""
Exact sparse linear algebra over Q or GF(p).

Vectors are dicts {index: scalar} with no stored zeros.  Over Q the
scalars are ints or Fractions (integral Fractions are collapsed to int);
over GF(p) they are ints in [0, p).

Elimination over Q is fraction-free: echelon rows are kept as integer
vectors and a vector being reduced carries a running denominator, so
normal forms stay exact without Fraction arithmetic in the inner loop.
"""

from fractions import Fraction
from heapq import heapify, heappop, heappush
from math import gcd


class Field:
    name = "?"
    char = 0

    def coerce(self, x):
        raise NotImplementedError

    def parse(self, s):
        raise NotImplementedError

    def format(self, x):
        raise NotImplementedError


class Rationals(Field):
    name = "Q"
    char = 0

    def coerce(self, x):
        if isinstance(x, int):
            return x
        if isinstance(x, Fraction):
            return x.numerator if x.denominator == 1 else x
        if isinstance(x, str):
            return self.parse(x)
        raise TypeError("cannot coerce %r to Q" % (x,))

    def parse(self, s):
        s = str(s).strip()
        return self.coerce(Fraction(s))

    def format(self, x):
        x = self.coerce(x)
        if isinstance(x, int):
            return str(x)
        return "%d/%d" % (x.numerator, x.denominator)

    def inv(self, x):
        return self.coerce(Fraction(1) / x)

    def norm(self, x):
        if isinstance(x, Fraction) and x.denominator == 1:
            return x.numerator
        return x

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "QQ"


def _is_prime(p):
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


class PrimeField(Field):
    def __init__(self, p):
        p = int(p)
        if not _is_prime(p):
            raise ValueError("%d is not prime" % p)
        self.p = p
        self.char = p
        self.name = "GF(%d)" % p

    def coerce(self, x):
        if isinstance(x, int):
            return x % self.p
        if isinstance(x, Fraction):
            return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
        if isinstance(x, str):
            return self.parse(x)
        raise TypeError("cannot coerce %r to %s" % (x, self.name))

    def parse(self, s):
        return self.coerce(Fraction(str(s).strip()))

    def format(self, x):
        return str(x % self.p)

    def inv(self, x):
        return pow(x, -1, self.p)

    def norm(self, x):
        return x % self.p

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def __repr__(self):
        return "GF(%d)" % self.p


QQ = Rationals()


def GF(p):
    return PrimeField(p)


def field_from_string(s):
    s = str(s).strip()
    if s.upper() in ("Q", "QQ", "RATIONALS"):
        return QQ
    if s.upper().startswith("GF(") and s.endswith(")"):
        return GF(int(s[3:-1]))
    if s.isdigit():
        return GF(int(s))
    raise ValueError("unknown field %r" % s)


# ---------------------------------------------------------------------------
# vector helpers

def vadd(u, v, c, F):
    """u += c*v in place; returns u."""
    if F.char:
        p = F.p
        for k, x in v.items():
            y = (u.get(k, 0) + c * x) % p
            if y:
                u[k] = y
            else:
                u.pop(k, None)
    else:
        for k, x in v.items():
            y = u.get(k, 0) + c * x
            if y:
                u[k] = F.norm(y)
            else:
                u.pop(k, None)
    return u


def vscale(v, c, F):
    if not c:
        return {}
    if F.char:
        p = F.p
        return {k: (x * c) % p for k, x in v.items() if (x * c) % p}
    return {k: F.norm(x * c) for k, x in v.items()}


def vsum(pairs, F):
    """Sum of c*v over (c, v) pairs."""
    out = {}
    for c, v in pairs:
        if c:
            vadd(out, v, c, F)
    return out


def vcoerce(v, F):
    out = {}
    for k, x in v.items():
        x = F.coerce(x)
        if x:
            out[k] = x
    return out


def _to_integral(v):
    """Return (w, D) with w integral and v = w/D."""
    D = 1
    for x in v.values():
        if isinstance(x, Fraction):
            D = D * x.denominator // gcd(D, x.denominator)
    if D == 1:
        return dict(v), 1
    return {k: int(x * D) for k, x in v.items()}, D


def _content(w):
    g = 0
    for x in w.values():
        g = gcd(g, x)
        if g == 1:
            return 1
    return g


class Echelon:
    """
    Incremental row echelon form.  Pivot of a row is its smallest index,
    and every stored row has zeros at the pivots of earlier rows below it,
    so reducing a vector never reintroduces an eliminated index.
    """

    def __init__(self, field):
        self.F = field
        self.rows = {}

    def __len__(self):
        return len(self.rows)

    @property
    def rank(self):
        return len(self.rows)

    def pivots(self):
        return sorted(self.rows)

    def _reduce_int(self, v):
        # over Q: returns (w, D) integral with residual = w/D
        w, D = _to_integral(v)
        rows = self.rows
        heap = [k for k in w if k in rows]
        heapify(heap)
        steps = 0
        while heap:
            k = heappop(heap)
            b = w.get(k)
            if b is None:
                continue
            r = rows[k]
            a = r[k]
            g = gcd(a, b)
            ma, mb = a // g, b // g
            if ma != 1:
                if ma == -1:
                    for key in w:
                        w[key] = -w[key]
                else:
                    for key in w:
                        w[key] *= ma
                D *= ma
                steps += 1
            for key, x in r.items():
                y = w.get(key, 0) - mb * x
                if y:
                    if key not in w and key in rows:
                        heappush(heap, key)
                    w[key] = y
                else:
                    w.pop(key, None)
            if steps >= 12 and w:
                g = gcd(_content(w), D)
                if g > 1:
                    for key in w:
                        w[key] //= g
                    D //= g
                steps = 0
        if D < 0:
            D = -D
            for key in w:
                w[key] = -w[key]
        return w, D

    def _reduce_mod(self, v):
        p = self.F.p
        w = {k: x % p for k, x in v.items() if x % p}
        rows = self.rows
        heap = [k for k in w if k in rows]
        heapify(heap)
        while heap:
            k = heappop(heap)
            b = w.get(k)
            if b is None:
                continue
            for key, x in rows[k].items():
                y = (w.get(key, 0) - b * x) % p
                if y:
                    if key not in w and key in rows:
                        heappush(heap, key)
                    w[key] = y
                else:
                    w.pop(key, None)
        return w

    def reduce(self, v):
        """Exact normal form of v modulo the row space."""
        if self.F.char:
            return self._reduce_mod(v)
        w, D = self._reduce_int(v)
        if D == 1:
            return w
        g = gcd(_content(w), D) if w else D
        if g > 1:
            w = {k: x // g for k, x in w.items()}
            D //= g
        if D == 1:
            return w
        return {k: Fraction(x, D) for k, x in w.items()}

    def _insert(self, w):
        k = min(w)
        if self.F.char:
            inv = pow(w[k], -1, self.F.p)
            p = self.F.p
            w = {key: (x * inv) % p for key, x in w.items()}
        else:
            g = _content(w)
            if w[k] < 0:
                g = -g
            if g != 1:
                w = {key: x // g for key, x in w.items()}
        self.rows[k] = w
        return k

    def add(self, v):
        """Add v to the span.  Returns True iff v was independent."""
        if self.F.char:
            w = self._reduce_mod(v)
        else:
            w, _ = self._reduce_int(v)
        if not w:
            return False
        self._insert(w)
        return True

    def add_reduced(self, v):
        """Like add, but returns the pivot index (or None)."""
        if self.F.char:
            w = self._reduce_mod(v)
        else:
            w, _ = self._reduce_int(v)
        if not w:
            return None
        return self._insert(w)

    def contains(self, v):
        if self.F.char:
            return not self._reduce_mod(v)
        w, _ = self._reduce_int(v)
        return not w

    def copy(self):
        e = Echelon(self.F)
        e.rows = dict(self.rows)
        return e


def rank(vectors, F):
    e = Echelon(F)
    for v in vectors:
        e.add(v)
    return e.rank


def kernel(columns, F, ncols=None):
    """
    Basis of {x : sum_j x_j columns[j] = 0}.  Columns are image vectors
    (dicts); the result vectors are dicts indexed by column number.
    """
    columns = list(columns)
    n = len(columns) if ncols is None else ncols
    top = 0
    for c in columns:
        if c:
            top = max(top, max(c) + 1)
    e = Echelon(F)
    out = []
    for j in range(n):
        c = columns[j] if j < len(columns) else {}
        aug = dict(c)
        aug[top + j] = 1
        if F.char:
            w = e._reduce_mod(aug)
        else:
            w, _ = e._reduce_int(aug)
        if min(w) >= top:
            if not F.char:
                g = _content(w)
                w = {k: x // g for k, x in w.items()}
            out.append({k - top: x for k, x in w.items()})
        else:
            e._insert(w)
    return out


def image_rank(columns, F):
    return rank(columns, F)


def solve(columns, b, F):
    """
    A particular x with sum_j x_j columns[j] = b, or None.
    """
    columns = list(columns)
    top = 0
    for c in list(columns) + [b]:
        if c:
            top = max(top, max(c) + 1)
    e = Echelon(F)
    for j, c in enumerate(columns):
        aug = dict(c)
        aug[top + j] = 1
        if F.char:
            w = e._reduce_mod(aug)
        else:
            w, _ = e._reduce_int(aug)
        if min(w) < top:
            e._insert(w)
    aug = dict(b)
    r = e.reduce(aug)
    if any(k < top for k in r):
        return None
    # b - sum(...) reduces to tail; the tail records -x
    return {k - top: F.norm(-x) if not F.char else (-x) % F.p for k, x in r.items()}


class SparseMatrix:
    """
    Immutable sparse matrix stored by columns: cols[j] is the image of
    the j-th source basis vector, a dict over target indices.
    """

    __slots__ = ("nrows", "ncols", "cols", "F")

    def __init__(self, nrows, ncols, cols, F):
        cols = tuple(cols)
        if len(cols) != ncols:
            raise ValueError("expected %d columns, got %d" % (ncols, len(cols)))
        for c in cols:
            for k in c:
                if not 0 <= k < nrows:
                    raise ValueError("row index %r out of range %d" % (k, nrows))
        self.nrows = nrows
        self.ncols = ncols
        self.cols = cols
        self.F = F

    @classmethod
    def zero(cls, nrows, ncols, F):
        return cls(nrows, ncols, [{}] * ncols, F)

    @classmethod
    def identity(cls, n, F):
        return cls(n, n, [{i: 1} for i in range(n)], F)

    @classmethod
    def from_triplets(cls, nrows, ncols, triplets, F):
        cols = [{} for _ in range(ncols)]
        for i, j, x in triplets:
            x = F.coerce(x)
            if x:
                vadd(cols[j], {i: x}, 1, F)
        return cls(nrows, ncols, cols, F)

    def triplets(self):
        out = []
        for j, c in enumerate(self.cols):
            for i in sorted(c):
                out.append((i, j, c[i]))
        return out

    def apply(self, v):
        out = {}
        F = self.F
        for j, x in v.items():
            vadd(out, self.cols[j], x, F)
        return out

    def __matmul__(self, other):
        # (self @ other)(v) = self(other(v))
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        return SparseMatrix(self.nrows, other.ncols,
                            [self.apply(c) for c in other.cols], self.F)

    def __add__(self, other):
        return SparseMatrix(self.nrows, self.ncols,
                            [vadd(dict(a), b, 1, self.F) for a, b in zip(self.cols, other.cols)],
                            self.F)

    def scale(self, c):
        return SparseMatrix(self.nrows, self.ncols,
                            [vscale(a, c, self.F) for a in self.cols], self.F)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def transpose(self):
        rows = [{} for _ in range(self.nrows)]
        for j, c in enumerate(self.cols):
            for i, x in c.items():
                rows[i][j] = x
        return SparseMatrix(self.ncols, self.nrows, rows, self.F)

    def is_zero(self):
        return not any(self.cols)

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.nrows, self.ncols) == (other.nrows, other.ncols) and \
            all(a == b for a, b in zip(self.cols, other.cols))

    def rank(self):
        return rank(self.cols, self.F)

    def kernel(self):
        return kernel(self.cols, self.F, self.ncols)

    def max_abs_entry(self):
        best = 0
        for c in self.cols:
            for x in c.values():
                best = max(best, abs(x))
        return best

    def __repr__(self):
        return "SparseMatrix(%d x %d, nnz=%d)" % (
            self.nrows, self.ncols, sum(len(c) for c in self.cols))


class Quotient:
    """
    The quotient k^n / S for a subspace S given by spanning vectors.
    Normal forms are supported on non-pivot indices, which index the
    quotient basis.
    """

    def __init__(self, n, relations, F):
        self.n = n
        self.F = F
        self.ech = Echelon(F)
        for r in relations:
            self.ech.add(r)
        piv = set(self.ech.rows)
        self.free = [i for i in range(n) if i not in piv]
        self.pos = {i: k for k, i in enumerate(self.free)}

    @property
    def dim(self):
        return len(self.free)

    def coords(self, v):
        nf = self.ech.reduce(v)
        return {self.pos[k]: x for k, x in nf.items()}

    def lift(self, k):
        return {self.free[k]: 1}

    def contains(self, v):
        return self.ech.contains(v)


def nullspace(rows, nvars, F):
    """Basis of {x : r·x = 0 for every row r}; rows are dicts var -> coeff."""
    cols = [dict() for _ in range(nvars)]
    for k, r in enumerate(rows):
        for j, c in r.items():
            cols[j][k] = c
    return kernel(cols, F, nvars)
