"""
Finite pointed sets ⟨m⟩ = {0, 1, ..., m}, the linearized category kFin_*^op
and functors on it.

kFin_*^op has objects 0..N and D(n, m) spanned by the based maps
⟨m⟩ -> ⟨n⟩, written as tuples f with f[i-1] the image of i.  "a then b"
is the composite of maps g∘h.  With this orientation the object m̲ of
Ib^Com corresponds to ⟨m⟩ and the morphism (f, μ, ν) to the map f.
"""

from itertools import product

from .barhom import CohomTable, FullSubcategory, Restricted, _rhom_runs
from .category import CatModule, DgCategory
from .chaincore import ChainComplex, ground, zero_complex
from .ibmod import cotangent_ib, ib_category, to_functor
from .linalg import QQ
from .operads import AxiomReport


def pointed_maps(m, n):
    """All based maps ⟨m⟩ -> ⟨n⟩ as tuples of length m."""
    return list(product(range(n + 1), repeat=m))


def compose_maps(g, h):
    """g∘h: first h then g."""
    return tuple(0 if x == 0 else g[x - 1] for x in h)


class FinStarOp(DgCategory):
    def __init__(self, N, field=QQ):
        if N < 0:
            raise ValueError("N must be >= 0")
        DgCategory.__init__(self, list(range(N + 1)), field)
        self.N = N
        self._maps = {}

    def maps(self, x, y):
        """Basis of D(x, y): based maps ⟨y⟩ -> ⟨x⟩."""
        key = (x, y)
        r = self._maps.get(key)
        if r is None:
            lst = pointed_maps(y, x)
            r = (lst, {f: k for k, f in enumerate(lst)})
            self._maps[key] = r
        return r

    def _build_mor(self, x, y):
        lst, _ = self.maps(x, y)
        return ChainComplex([("map", f) for f in lst], [0] * len(lst), None, self.F, check=False)

    def unit(self, x):
        return self.maps(x, x)[1][tuple(range(1, x + 1))]

    def _compose_basis(self, x, y, z, a, b):
        g = self.maps(x, y)[0][a]
        h = self.maps(y, z)[0][b]
        return {self.maps(x, z)[1][compose_maps(g, h)]: 1}


def finstar_cat(N, field=QQ):
    return FinStarOp(N, field)


class GammaModule(CatModule):
    """A functor on kFin_*^op given by its values and an action rule."""

    name = "F"


class TFunctor(GammaModule):
    """t(⟨m⟩) = based maps ⟨m⟩ -> k, basis δ_1..δ_m; δ_i·g = Σ_{g(j)=i} δ_j."""

    name = "t"

    def _build_value(self, x):
        if x == 0:
            return zero_complex(self.F)
        return ChainComplex([("delta", i) for i in range(1, x + 1)], [0] * x, None, self.F, check=False)

    def _act_basis(self, x, y, i, a):
        g = self.D.maps(x, y)[0][a]
        return {j: 1 for j in range(y) if g[j] == i + 1}


class ConstantFunctor(GammaModule):
    """The constant functor k; as a module over Ib^Com this is Com^si."""

    name = "k"

    def _build_value(self, x):
        return ground(self.F, 0, "1")

    def _act_basis(self, x, y, i, a):
        return {0: 1}


class ShiftedGamma(GammaModule):
    def __init__(self, G, n):
        GammaModule.__init__(self, G.D)
        self.G = G
        self.n = n

    def _build_value(self, x):
        return self.G.value(x).shift(self.n)

    def _act_basis(self, x, y, i, a):
        return self.G.act_basis(x, y, i, a)


def t_functor(N, field=QQ, D=None):
    return TFunctor(D or finstar_cat(N, field))


def constant_functor(N, field=QQ, D=None):
    return ConstantFunctor(D or finstar_cat(N, field))


# ---------------------------------------------------------------------------
# identification with Ib^Com

def _object_of(seq):
    return len(seq[0])


class ComparisonReport:
    def __init__(self, N):
        self.N = N
        self.failures = []
        self.objects = 0
        self.morphisms = 0

    @property
    def ok(self):
        return not self.failures

    def __repr__(self):
        return "ComparisonReport(N=%d, objects=%d, morphisms=%d, failures=%d)" % (
            self.N, self.objects, self.morphisms, len(self.failures))


def _ib_map_index(D, s, t):
    """Basis index of D(s, t) in Ib^Com -> based map f."""
    return [e[0] for e in D.entries(s, t)]


def compare_categories(N, field=QQ):
    """ib_category(Com, N) ≅ kFin_*^op: dimensions and composition tables."""
    from .operads import preset
    P = preset("com", N=N + 1, field=field)
    D = ib_category(P, N)
    G = finstar_cat(N, field)
    rep = AxiomReport()
    objs = D.objects
    maps = {(s, t): _ib_map_index(D, s, t) for s in objs for t in objs}
    for s in objs:
        for t in objs:
            rep.checked += 1
            x, y = _object_of(s), _object_of(t)
            if sorted(maps[(s, t)]) != sorted(G.maps(x, y)[0]):
                rep.add("morphism_bijection", (s, t))
    for s in objs:
        for t in objs:
            for u in objs:
                x, y, z = _object_of(s), _object_of(t), _object_of(u)
                for a, f in enumerate(maps[(s, t)]):
                    for b, g in enumerate(maps[(t, u)]):
                        rep.checked += 1
                        lhs = D.compose_basis(s, t, u, a, b)
                        want = G.compose_basis(x, y, z, G.maps(x, y)[1][f], G.maps(y, z)[1][g])
                        got = {G.maps(x, z)[1][maps[(s, u)][k]]: c for k, c in lhs.items()}
                        if got != want:
                            rep.add("composition", (s, t, u, f, g))
    return rep


def compare_com_cotangent(N, field=QQ):
    """
    Match to_functor(L̄_Com) with t object by object and morphism by morphism:
    the basis element μ^{(k)} of L̄(m̲) corresponds to δ_{k+1}.
    """
    from .operads import preset
    if N < 1:
        raise ValueError("N must be >= 1")
    P = preset("com", N=N + 1, field=field)
    D = ib_category(P, N)
    L = to_functor(cotangent_ib(P, N), D)
    G = finstar_cat(N, field)
    T = t_functor(N, field, G)
    rep = ComparisonReport(N)
    for s in D.objects:
        x = _object_of(s)
        rep.objects += 1
        Ls = L.value(s)
        want = [("delta", i) for i in range(1, x + 1)]
        got = [("delta", lbl[1] + 1) for lbl, _ in Ls.labels]
        if got != want or Ls.degrees != T.value(x).degrees:
            rep.failures.append(("object", s, got, want))
    for s in D.objects:
        for t in D.objects:
            x, y = _object_of(s), _object_of(t)
            for a, f in enumerate(_ib_map_index(D, s, t)):
                rep.morphisms += 1
                a2 = G.maps(x, y)[1][f]
                A = L.matrix(s, t, a)
                B = T.matrix(x, y, a2)
                if A != B:
                    rep.failures.append(("morphism", s, t, f, A, B))
    return rep


# ---------------------------------------------------------------------------
# cohomology of functors on kFin_*^op

def _gamma_table(source_of, Fm, setup, kind, shift):
    G = Fm.D
    N = G.N if setup.N is None else setup.N
    if N != G.N:
        G2 = finstar_cat(N, G.F)
        Fm = _rebase(Fm, G2)
        G = G2
    ns = setup.indices()
    ks = [-n - shift for n in ns]
    S = source_of(G)
    a, b, used = _rhom_runs(G, S, Fm, ks, setup.p_max, setup.method)
    if N >= 1:
        sub = FullSubcategory(G, list(range(N)))
        c, _, _ = _rhom_runs(sub, Restricted(S, sub), Restricted(Fm, sub), ks, setup.p_max, setup.method)
    else:
        c = {k: None for k in ks}
    rows = [(n, a[k], a[k] == b[k] and a[k] == c[k]) for n, k in zip(ns, ks)]
    return CohomTable(rows, setup.p_max, N, kind, used)


class _Rebased(GammaModule):
    def __init__(self, Fm, D):
        GammaModule.__init__(self, D)
        self.M = Fm

    def value(self, x):
        return self.M.value(x)

    def act_basis(self, x, y, i, a):
        f = self.D.maps(x, y)[0][a]
        return self.M.act_basis(x, y, i, self.M.D.maps(x, y)[1][f])


def _rebase(Fm, D):
    if Fm.D.N < D.N:
        raise ValueError("functor defined only up to <%d>" % Fm.D.N)
    return _Rebased(Fm, D)


def stable_cohomotopy(Fm, setup):
    """HQ^n(E_∞; F) = H_{-n-1} RHom(t, F) over kFin_*^op."""
    return _gamma_table(lambda G: TFunctor(G), Fm, setup, "HQ_Einf", 1)


def gamma_hochschild(Fm, setup):
    """H_{-n} RHom(k, F): Hochschild cohomology of Com with coefficients F."""
    return _gamma_table(lambda G: ConstantFunctor(G), Fm, setup, "HH_Fin", 0)


def gamma_from_ib(M, N=None):
    """Transport a Com-infinitesimal bimodule to a functor on kFin_*^op."""
    P = M.P
    N = M.ceiling if N is None else N
    D = ib_category(P, N)
    Fn = to_functor(M, D)
    G = finstar_cat(N, P.F)

    class _Transported(GammaModule):
        name = getattr(M, "name", "M")

        def value(self, x):
            return Fn.value(((P.colors[0],) * x, P.colors[0]))

        def act_basis(self, x, y, i, a):
            s = ((P.colors[0],) * x, P.colors[0])
            t = ((P.colors[0],) * y, P.colors[0])
            f = G.maps(x, y)[0][a]
            k = _ib_map_index(D, s, t).index(f)
            return Fn.act_basis(s, t, i, k)

    return _Transported(G)
