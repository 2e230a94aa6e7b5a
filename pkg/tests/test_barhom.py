import pytest

from operadlab.barhom import (BarSetup, CohomTable, UnstabilizedRow, bar_complex, bar_rhom, fiber_sequence_report,
                              hochschild, kan_from_object, quillen, reduced_quillen, rhom_complex, strict_sequence)
from operadlab.category import ExplicitModule, one_object_category
from operadlab.chaincore import ChainComplex, hom_complex, homology, sphere
from operadlab.collection import E_star
from operadlab.ibmod import (ZeroIB, cotangent_ib, derivation_space, direct_sum_ib, free_ib, ib_category,
                             inf_composite_ib, self_ib, shift_ib, to_functor)
from operadlab.linalg import QQ
from operadlab.operads import preset

W = (-3, 3)


def setup(p=4, window=W, method="auto"):
    return BarSetup(p, window, None, method)


def test_setup_validation():
    with pytest.raises(ValueError):
        BarSetup(0)
    with pytest.raises(ValueError):
        BarSetup(3, (2, 1))
    with pytest.raises(ValueError):
        BarSetup(3, method="magic")


def test_table_refuses_unstabilized_rows():
    T = CohomTable([(0, 1, True), (1, 2, False)], 4, 3, "HH")
    assert T.stable(0) == 1
    with pytest.raises(UnstabilizedRow):
        T.stable(1)
    assert T.stable_rows() == {0: 1}
    assert T.tsv_rows()[1] == ("HH", 1, 2, "no", 4, 3)


def point_module(D, C):
    x = D.objects[0]
    ident = [{i: 1} for i in range(len(C.labels))]
    return ExplicitModule(D, {x: C}, {(x, x, 0): ident})


def test_one_object_collapse():
    D = one_object_category()
    X = ChainComplex(["a", "b", "c"], [0, 1, 1], None, QQ)
    F, G = point_module(D, X), point_module(D, sphere(1))
    T = bar_rhom(D, F, G, BarSetup(1, (-2, 2)))
    want = homology(hom_complex(X, sphere(1)))
    # X = k ⊕ k[1]², S^1 = k ⊕ k[1]
    assert T.nonzero() == want.as_dict() == {-1: 2, 0: 3, 1: 1}
    assert T.all_stabilized()


def test_bar_complex_squares_to_zero():
    P = preset("com", N=4)
    D = ib_category(P, 3)
    F = to_functor(self_ib(P, 3), D)
    C, qs = bar_complex(D, F, F, 2)
    C.check()
    assert max(qs) == 2


def test_free_coefficients_have_no_bar_corrections():
    # F = X ⊗ D(x, -): RHom(F, G) = Hom(X, G(x)); compare at p <= 3 for every object x
    P = preset("com", N=4)
    D = ib_category(P, 3)
    G = to_functor(cotangent_ib(P, 3), D)
    X = ChainComplex(["u"], [1], None, QQ)
    for x in D.objects:
        F = kan_from_object(D, x, X, "left")
        T = bar_rhom(D, F, G, BarSetup(3, (-3, 3)))
        assert T.nonzero() == homology(hom_complex(X, G.value(x))).as_dict()


def test_right_kan_from_a_point():
    D = one_object_category()
    X = sphere(2)
    R = kan_from_object(D, D.objects[0], X, "right")
    assert R.value(D.objects[0]).dims() == X.dims()


def test_right_kan_from_nullary_object_over_com():
    P = preset("com", N=4)
    D = ib_category(P, 3)
    X = sphere(0)
    R = kan_from_object(D, D.objects[0], X, "right")
    for y in D.objects:
        assert R.value(y).dims() == X.dims()


def test_left_kan_from_nullary_is_free_on_e_star():
    P = preset("com", N=4)
    D = ib_category(P, 3)
    L = kan_from_object(D, D.objects[0], ChainComplex(["1"], [0], None, QQ), "left")
    Fr = to_functor(free_ib(P, E_star(ceiling=4), 3), D)
    for y in D.objects:
        assert L.value(y).dims() == Fr.value(y).dims()


I_COEFFS = [
    ("self", lambda I: self_ib(I), {0: 1}),
    ("shift", lambda I: shift_ib(self_ib(I), 1), {-1: 1}),
    ("sum", lambda I: direct_sum_ib(self_ib(I), shift_ib(self_ib(I), -2)), {0: 1, 2: 1}),
]


@pytest.mark.parametrize("label,make,betti", I_COEFFS)
def test_i_closed_forms(label, make, betti):
    I = preset("i", N=4)
    M = make(I)
    hh = hochschild(I, M, setup())
    hq = quillen(I, M, setup())
    h = homology(M.level((("*",), "*")))
    assert hh.nonzero() == {n: h[-n] for n in range(-3, 4) if h[-n]} == betti
    assert hq.nonzero() == {n: h[-n - 1] for n in range(-3, 4) if h[-n - 1]}
    assert hh.all_stabilized() and hq.all_stabilized()
    assert reduced_quillen(I, M, setup()).nonzero() == {}


@pytest.mark.parametrize("name", ["i", "com", "ass", "nilpotent2"])
def test_hh0_has_identity(name):
    P = preset(name, N=4)
    assert hochschild(P, self_ib(P), setup(3, (0, 0)))[0] >= 1


def test_com_self():
    P = preset("com", N=4)
    assert hochschild(P, self_ib(P), setup()).nonzero() == {0: 1}
    hq = quillen(P, self_ib(P), setup())
    assert hq.nonzero() == {} and hq.stable(-1) == 0


def test_zero_coefficients():
    P = preset("com", N=4)
    for fn in (hochschild, quillen, reduced_quillen):
        assert fn(P, ZeroIB(P), setup()).nonzero() == {}


@pytest.mark.parametrize("name", ["com", "nilpotent2"])
def test_methods_agree(name):
    P = preset(name, N=3)
    M = self_ib(P)
    tables = [quillen(P, M, setup(3, (-3, 2), m)).dims() for m in ("bar", "resolve-source", "resolve-target", "auto")]
    assert all(t == tables[0] for t in tables)


def test_rhom_complex_methods():
    P = preset("com", N=4)
    D = ib_category(P, 3)
    F = to_functor(self_ib(P, 3), D)
    T, _, used = rhom_complex(D, F, F, 3, "resolve-source")
    assert used == "resolve-source"
    T.check()


def test_reduced_quillen_dominates_derivations():
    for name in ("com", "nilpotent2"):
        P = preset(name, N=4)
        M = self_ib(P)
        assert reduced_quillen(P, M, setup(3, (0, 0)))[0] >= derivation_space(P, M, 0).dim


def test_psi_class_is_nonzero():
    # Ψ_Com ≠ 0, so H_0 RHom(Ω, P∘(1)P) has a nonzero class
    P = preset("com", N=4)
    M = inf_composite_ib(P, 3)
    assert reduced_quillen(P, M, setup(2, (0, 0)))[0] >= 1


def test_fiber_report_i():
    I = preset("i", N=4)
    R = fiber_sequence_report(I, self_ib(I), setup())
    assert R.ok and R.conclusive
    assert all(v == 0 for v in R.tables["HQ_red"].values())
    assert R.tables["Omega_HQ"] == R.tables["prod_M"]


def test_fiber_report_zero():
    P = preset("com", N=4)
    R = fiber_sequence_report(P, ZeroIB(P), setup())
    assert R.ok
    assert all(v == 0 for t in R.tables.values() for v in t.values())


def test_fiber_report_com():
    P = preset("com", N=4)
    R = fiber_sequence_report(P, self_ib(P), setup())
    assert R.conclusive and R.euler and R.strict["exact"]


def test_strict_sequence_numbers():
    P = preset("com", N=4)
    s = strict_sequence(P, self_ib(P))
    assert s == {"tan": 0, "middle": 1, "rank_ad": 1, "der": 1, "exact": True}
