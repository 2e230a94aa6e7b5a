"""
Small dg categories and their (right) modules F(x) ⊗ D(x, y) -> F(y).

Composition is written in the order of the action: for a in D(x, y) and
b in D(y, z), compose_basis(x, y, z, a, b) is the element "a then b" of
D(x, z), so that (v·a)·b = v·(a b).
"""

from .chaincore import ChainComplex, zero_complex
from .linalg import QQ, vadd
from .operads import AxiomReport, _max_entry


class DgCategory:
    def __init__(self, objects, field=QQ):
        self.objects = list(objects)
        self.F = field
        self._mor = {}
        self._comp = {}

    def mor(self, x, y):
        key = (x, y)
        m = self._mor.get(key)
        if m is None:
            m = self._build_mor(x, y)
            self._mor[key] = m
        return m

    def _build_mor(self, x, y):
        raise NotImplementedError

    def unit(self, x):
        raise NotImplementedError

    def _compose_basis(self, x, y, z, a, b):
        raise NotImplementedError

    def compose_basis(self, x, y, z, a, b):
        key = (x, y, z, a, b)
        r = self._comp.get(key)
        if r is None:
            r = self._compose_basis(x, y, z, a, b)
            self._comp[key] = r
        return r

    def compose(self, x, y, z, va, vb):
        out = {}
        F = self.F
        for a, s in va.items():
            for b, t in vb.items():
                vadd(out, self.compose_basis(x, y, z, a, b), s * t, F)
        return out

    def is_degree_zero(self):
        for x in self.objects:
            for y in self.objects:
                M = self.mor(x, y)
                if any(M.degrees) or any(M.d):
                    return False
        return True

    def total_morphisms(self):
        return sum(len(self.mor(x, y).labels) for x in self.objects for y in self.objects)

    def check(self, objects=None):
        objs = self.objects if objects is None else list(objects)
        rep = AxiomReport()
        F = self.F
        for x in objs:
            u = self.unit(x)
            Mx = self.mor(x, x)
            if Mx.degrees[u] != 0 or Mx.d[u]:
                rep.add("unit_cycle", (x,))
            for y in objs:
                Mxy = self.mor(x, y)
                uy = self.unit(y)
                for a in range(len(Mxy.labels)):
                    rep.checked += 2
                    l = self.compose_basis(x, x, y, u, a)
                    r = self.compose_basis(x, y, y, a, uy)
                    if l != {a: 1}:
                        rep.add("left_unit", (x, y, Mxy.labels[a]))
                    if r != {a: 1}:
                        rep.add("right_unit", (x, y, Mxy.labels[a]))
        for x in objs:
            for y in objs:
                Mxy = self.mor(x, y)
                if not Mxy.labels:
                    continue
                for z in objs:
                    Myz = self.mor(y, z)
                    Mxz = self.mor(x, z)
                    for a in range(len(Mxy.labels)):
                        for b in range(len(Myz.labels)):
                            rep.checked += 1
                            ab = self.compose_basis(x, y, z, a, b)
                            lhs = Mxz.apply_d(ab)
                            r1 = self.compose(x, y, z, Mxy.d[a], {b: 1})
                            r2 = self.compose(x, y, z, {a: 1}, Myz.d[b])
                            s = -1 if Mxy.degrees[a] % 2 else 1
                            diff = vadd(vadd(dict(lhs), r1, -1, F), r2, -s, F)
                            if diff:
                                rep.add("composition_chain", (x, y, z, a, b), _max_entry(diff))
                            for w in objs:
                                Mzw = self.mor(z, w)
                                for c in range(len(Mzw.labels)):
                                    rep.checked += 1
                                    l = self.compose(x, z, w, ab, {c: 1})
                                    r = self.compose(x, y, w, {a: 1}, self.compose_basis(y, z, w, b, c))
                                    diff = vadd(dict(l), r, -1, F)
                                    if diff:
                                        rep.add("associativity", (x, y, z, w, a, b, c), _max_entry(diff))
        return rep


class ExplicitCategory(DgCategory):
    """
    mor: dict (x, y) -> ChainComplex; comp: dict (x, y, z, a, b) -> vector;
    units: dict x -> index.  Missing compositions are zero.
    """

    def __init__(self, objects, mor, comp, units, field=QQ):
        DgCategory.__init__(self, objects, field)
        self._given = dict(mor)
        self._given_comp = dict(comp)
        self._units = dict(units)

    def _build_mor(self, x, y):
        return self._given.get((x, y)) or zero_complex(self.F)

    def unit(self, x):
        return self._units[x]

    def _compose_basis(self, x, y, z, a, b):
        return dict(self._given_comp.get((x, y, z, a, b), {}))


def one_object_category(A=None, field=QQ, name="pt"):
    """The one-object category with endomorphisms k."""
    from .chaincore import ground
    mor = {(name, name): ground(field, 0, "id")}
    comp = {(name, name, name, 0, 0): {0: 1}}
    return ExplicitCategory([name], mor, comp, {name: 0}, field)


class FullSubcategory(DgCategory):
    def __init__(self, D, objects):
        DgCategory.__init__(self, objects, D.F)
        self.D = D

    def mor(self, x, y):
        return self.D.mor(x, y)

    def unit(self, x):
        return self.D.unit(x)

    def compose_basis(self, x, y, z, a, b):
        return self.D.compose_basis(x, y, z, a, b)


class Opposite(DgCategory):
    """D^op for a category concentrated in degree 0."""

    def __init__(self, D):
        DgCategory.__init__(self, D.objects, D.F)
        self.D = D

    def mor(self, x, y):
        return self.D.mor(y, x)

    def unit(self, x):
        return self.D.unit(x)

    def compose_basis(self, x, y, z, a, b):
        # a in D^op(x,y) = D(y,x), b in D^op(y,z) = D(z,y): "a then b" is b·a in D
        return self.D.compose_basis(z, y, x, b, a)


class CatModule:
    """
    Subclasses implement value(x) and act_basis(x, y, i, a), the image of
    basis element i of F(x) under basis morphism a of D(x, y).
    """

    def __init__(self, D):
        self.D = D
        self.F = D.F
        self._vals = {}
        self._acts = {}

    def value(self, x):
        v = self._vals.get(x)
        if v is None:
            v = self._build_value(x)
            self._vals[x] = v
        return v

    def _build_value(self, x):
        raise NotImplementedError

    def _act_basis(self, x, y, i, a):
        raise NotImplementedError

    def act_basis(self, x, y, i, a):
        key = (x, y, i, a)
        r = self._acts.get(key)
        if r is None:
            r = self._act_basis(x, y, i, a)
            self._acts[key] = r
        return r

    def act(self, x, y, vec, avec):
        out = {}
        F = self.F
        for i, s in vec.items():
            for a, t in avec.items():
                vadd(out, self.act_basis(x, y, i, a), s * t, F)
        return out

    def matrix(self, x, y, a):
        return [self.act_basis(x, y, i, a) for i in range(len(self.value(x).labels))]

    def total_dim(self):
        return sum(len(self.value(x).labels) for x in self.D.objects)

    def is_zero_differential(self):
        return all(self.value(x).is_zero_differential() for x in self.D.objects)

    def check(self, objects=None):
        """Functoriality, unit and chain-map property."""
        D = self.D
        objs = D.objects if objects is None else list(objects)
        rep = AxiomReport()
        F = self.F
        for x in objs:
            Vx = self.value(x)
            u = D.unit(x)
            for i in range(len(Vx.labels)):
                rep.checked += 1
                if self.act_basis(x, x, i, u) != {i: 1}:
                    rep.add("functor_unit", (x, Vx.labels[i]))
        for x in objs:
            Vx = self.value(x)
            if not Vx.labels:
                continue
            for y in objs:
                Mxy = D.mor(x, y)
                Vy = self.value(y)
                for a in range(len(Mxy.labels)):
                    for i in range(len(Vx.labels)):
                        rep.checked += 1
                        va = self.act_basis(x, y, i, a)
                        lhs = Vy.apply_d(va)
                        r1 = self.act(x, y, Vx.d[i], {a: 1})
                        r2 = self.act(x, y, {i: 1}, Mxy.d[a])
                        s = -1 if Vx.degrees[i] % 2 else 1
                        diff = vadd(vadd(dict(lhs), r1, -1, F), r2, -s, F)
                        if diff:
                            rep.add("functor_chain", (x, y, i, a), _max_entry(diff))
                        for z in objs:
                            Myz = D.mor(y, z)
                            for b in range(len(Myz.labels)):
                                rep.checked += 1
                                l = self.act(y, z, va, {b: 1})
                                r = self.act(x, z, {i: 1}, D.compose_basis(x, y, z, a, b))
                                diff = vadd(dict(l), r, -1, F)
                                if diff:
                                    rep.add("functoriality", (x, y, z, i, a, b), _max_entry(diff))
        return rep


class ExplicitModule(CatModule):
    """values: dict x -> ChainComplex; mats: dict (x, y, a) -> list of columns."""

    def __init__(self, D, values, mats):
        CatModule.__init__(self, D)
        self._given = dict(values)
        self._mats = dict(mats)

    def _build_value(self, x):
        return self._given.get(x) or zero_complex(self.F)

    def _act_basis(self, x, y, i, a):
        m = self._mats.get((x, y, a))
        if m is None:
            return {}
        return dict(m[i])


class Restricted(CatModule):
    """A module restricted to a full subcategory."""

    def __init__(self, M, sub):
        CatModule.__init__(self, sub)
        self.M = M

    def value(self, x):
        return self.M.value(x)

    def act_basis(self, x, y, i, a):
        return self.M.act_basis(x, y, i, a)


class ShiftedModule(CatModule):
    """F[n]; actions unchanged since the category sits in degree 0."""

    def __init__(self, M, n):
        CatModule.__init__(self, M.D)
        self.M = M
        self.n = n

    def _build_value(self, x):
        return self.M.value(x).shift(self.n)

    def _act_basis(self, x, y, i, a):
        return self.M.act_basis(x, y, i, a)


class SumModule(CatModule):
    def __init__(self, parts):
        CatModule.__init__(self, parts[0].D)
        self.parts = list(parts)

    def _offsets(self, x):
        out, t = [], 0
        for P in self.parts:
            out.append(t)
            t += len(P.value(x).labels)
        return out

    def _build_value(self, x):
        from .chaincore import direct_sum
        return direct_sum(*[P.value(x) for P in self.parts])

    def _act_basis(self, x, y, i, a):
        ox = self._offsets(x)
        oy = self._offsets(y)
        for k in reversed(range(len(ox))):
            if i >= ox[k]:
                v = self.parts[k].act_basis(x, y, i - ox[k], a)
                return {j + oy[k]: c for j, c in v.items()}
        raise IndexError(i)


class DualModule(CatModule):
    """
    G^* over D^op for D in degree 0: G^*(x) = G(x)^* with the transposed
    action.  The dual basis vector of b sits in degree -|b| and has
    (dξ)(v) = -(-1)^{|ξ|} ξ(dv).
    """

    def __init__(self, G, Dop=None):
        CatModule.__init__(self, Dop or Opposite(G.D))
        self.G = G

    def _build_value(self, x):
        V = self.G.value(x)
        F = self.F
        n = len(V.labels)
        tr = [dict() for _ in range(n)]
        for i, img in enumerate(V.d):
            for j, c in img.items():
                tr[j][i] = c
        d = []
        for j in range(n):
            s = 1 if (-V.degrees[j]) % 2 else -1
            d.append({i: s * c for i, c in tr[j].items()})
        return ChainComplex([("dual", l) for l in V.labels], [-n_ for n_ in V.degrees], d, F,
                            (-V.support[1], -V.support[0]))

    def _act_basis(self, x, y, i, a):
        # ξ_i in G^*(x), a in D^op(x,y) = D(y,x): (ξ·a)(v) = ξ(v·a) for v in G(y)
        Vy = self.G.value(y)
        out = {}
        for j in range(len(Vy.labels)):
            c = self.G.act_basis(y, x, j, a).get(i)
            if c:
                out[j] = c
        return out
