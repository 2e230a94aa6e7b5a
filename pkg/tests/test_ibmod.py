from itertools import product
from math import factorial

import pytest

from oracle import null_vector
from operadlab.collection import E_star, arity
from operadlab.ibmod import (FunctorIB, IbFunctor, SelfIB, ZeroIB, canonical_derivation, canonical_sequence,
                             check_derivation, check_ibmod, cotangent_ib, derivation_space, direct_sum_ib, free_ib,
                             hom_ib, ib_category, inf_composite_ib, kaehler_ib, restrict_ib, self_ib, shift_ib,
                             square_zero_kernel, tangent_structures, to_functor)
from operadlab.operads import abelianization, identity_map, preset


def one(n):
    return (("*",) * n, "*")


def dims(M, top):
    return [M.dim(one(n)) for n in range(top + 1)]


@pytest.mark.parametrize("name", ["i", "com", "ass", "nilpotent2"])
def test_self_and_cotangent_pass(name):
    P = preset(name, N=4 if name != "ass" else 3)
    assert check_ibmod(self_ib(P)).ok
    assert check_ibmod(cotangent_ib(P)).ok


class BadRight(SelfIB):
    def _right_basis(self, s1, i, slot, s2, j):
        r = SelfIB._right_basis(self, s1, i, slot, s2, j)
        if arity(s1) == 2 and arity(s2) == 2 and slot == 1:
            return {k: 2 * x for k, x in r.items()}
        return r


def test_corrupted_right_action_is_named():
    rep = check_ibmod(BadRight(preset("com", N=4)))
    assert not rep.ok and rep.names()


def test_self_ib_of_i():
    assert dims(self_ib(preset("i", N=3)), 3) == [0, 1, 0, 0]


def test_restriction():
    C = preset("com", N=3)
    M = self_ib(C)
    R = restrict_ib(identity_map(C), M)
    assert dims(R, 3) == dims(M, 3)
    assert R.left_basis(one(2), 0, 0, one(2), 0) == M.left_basis(one(2), 0, 0, one(2), 0)
    A = preset("ass", N=3)
    assert check_ibmod(restrict_ib(abelianization(A, C), M)).ok
    S = direct_sum_ib(M, M)
    assert dims(restrict_ib(identity_map(C), S), 3) == [2 * d for d in dims(M, 3)]


def test_free_on_e_star():
    for N in (3, 4):
        assert dims(free_ib(preset("com", N=N), E_star(ceiling=N), N - 1), N - 1) == [1] * N
    A = preset("ass", N=4)
    assert dims(free_ib(A, E_star(ceiling=4), 3), 3) == [factorial(n + 1) for n in range(4)]


def test_free_adjunction():
    # hom(Free(E_*), N) = degree-0 part of N(;*)
    for name in ("com", "ass"):
        P = preset(name, N=4)
        F = free_ib(P, E_star(ceiling=4), 3)
        assert len(hom_ib(F, self_ib(P, 3))) == 1
        assert len(hom_ib(F, cotangent_ib(P, 3))) == 0


def test_hom_identity():
    P = preset("com", N=4)
    assert len(hom_ib(self_ib(P), self_ib(P))) >= 1


def test_cotangent_dims():
    assert dims(cotangent_ib(preset("com", N=5)), 5) == list(range(6))
    assert dims(cotangent_ib(preset("ass", N=4)), 4) == [m * factorial(m) for m in range(5)]
    I = preset("i", N=3)
    assert dims(cotangent_ib(I), 3) == dims(self_ib(I), 3)


def test_tangent_com_is_zero():
    # unknown ε = e·id; ε∘μ_0 = e·μ_0 while the left sum over zero inputs is empty
    P = preset("com", N=4)
    M = self_ib(P)
    rows = [{0: 1}]
    assert len(null_vector(rows, 1)) == 0
    assert tangent_structures(P, M) == []
    assert len(hom_ib(cotangent_ib(P, 4), M)) == 0


def test_tangent_i():
    I = preset("i", N=3)
    P = preset("com", N=3)
    assert len(tangent_structures(I, self_ib(I))) == 1
    assert len(tangent_structures(P, ZeroIB(P))) == 0


SUITE = [("i", 3), ("com", 4), ("ass", 3), ("nilpotent2", 4)]


def coefficient_suite(P):
    N = P.ceiling
    out = [self_ib(P), square_zero_kernel(P, self_ib(P)), shift_ib(self_ib(P), 1)]
    if len(P.colors) == 1:
        out.append(free_ib(P, E_star(P.F, N), N - 1))
    return out


@pytest.mark.parametrize("name,N", SUITE)
def test_tangent_equals_hom_out_of_cotangent(name, N):
    P = preset(name, N=N)
    for M in coefficient_suite(P):
        t = len(tangent_structures(P, M))
        h = len(hom_ib(cotangent_ib(P, M.ceiling), M))
        assert t == h, (name, M.name)


def test_com_derivations():
    P = preset("com", N=5)
    D = derivation_space(P, self_ib(P), 0)
    # oracle: c_{m+n-1} = c_m + c_n for m >= 1, n >= 0, m + n - 1 <= 5
    rows = []
    for m in range(1, 6):
        for n in range(0, 6):
            if m + n - 1 <= 5:
                r = {}
                for k, s in ((m + n - 1, 1), (m, -1), (n, -1)):
                    r[k] = r.get(k, 0) + s
                rows.append({k: v for k, v in r.items() if v})
    ker = null_vector(rows, 6)
    assert len(ker) == 1 and D.dim == 1
    v = ker[0]
    assert all(v[m] * 1 == (m - 1) * v[2] for m in range(6))
    got = [D.evaluate(0, one(m), {0: 1}).get(0, 0) for m in range(6)]
    assert all(got[m] == (m - 1) * got[2] for m in range(6)) and got[2] != 0


def test_canonical_derivation_is_a_derivation():
    A, C = preset("ass", N=3), preset("com", N=3)
    for f in (identity_map(C), abelianization(A, C)):
        M, cols = canonical_derivation(f)
        assert check_derivation(f.source, M, cols).ok


def test_derivations_of_i_vanish():
    I = preset("i", N=3)
    assert derivation_space(I, self_ib(I), 0).dim == 0


@pytest.mark.parametrize("name,N", SUITE)
def test_kaehler_universal_property(name, N):
    P = preset(name, N=N)
    Om, _ = kaehler_ib(P)
    for M in coefficient_suite(P)[:2]:
        assert len(hom_ib(Om, M)) == derivation_space(P, M, 0).dim


def test_kaehler_of_i_is_zero():
    Om, _ = kaehler_ib(preset("i", N=3))
    assert dims(Om, 3) == [0, 0, 0, 0]


@pytest.mark.parametrize("name,N", SUITE)
def test_strict_sequence_composite_vanishes(name, N):
    S = canonical_sequence(preset(name, N=N))
    assert S.check().ok
    assert S.composite_is_zero()


def test_canonical_sequence_of_i():
    S = canonical_sequence(preset("i", N=3))
    assert S.psi.is_zero()
    assert dims(S.PP, 3) == [0, 1, 0, 0]


def test_inf_composite_dims():
    # one class per subset S of the inputs fed to the inner operation
    N = 4
    PP = inf_composite_ib(preset("com", N=N + 1), N)
    expect = [sum(1 for _ in product((0, 1), repeat=m)) for m in range(N + 1)]
    assert dims(PP, N) == expect == [2 ** m for m in range(N + 1)]


# -- the category Ib^P

def test_ib_category_of_i():
    D = ib_category(preset("i", N=4), 3)
    for s in D.objects:
        for t in D.objects:
            n = len(D.entries(s, t))
            if arity(s) != arity(t):
                assert n == 0
            else:
                assert n == factorial(arity(s))


def test_ib_ass_hom_one_two():
    P = preset("ass", N=3)
    D = ib_category(P, 2)
    want = 0
    for f in product(range(2), repeat=2):
        k0 = sum(1 for x in f if x == 0)
        k1 = sum(1 for x in f if x == 1)
        want += P.dim(one(k0 + 1)) * P.dim(one(k1))
    assert len(D.entries(one(1), one(2))) == want == 12


def test_ib_category_axioms():
    assert ib_category(preset("com", N=4), 3).check().ok
    assert ib_category(preset("ass", N=3), 2).check().ok


def test_to_functor_of_com():
    P = preset("com", N=4)
    Fn = to_functor(self_ib(P), ib_category(P, 3))
    for s in Fn.D.objects:
        assert len(Fn.value(s).labels) == 1
        for t in Fn.D.objects:
            for a in range(len(Fn.D.entries(s, t))):
                assert Fn.act_basis(s, t, 0, a) == {0: 1}


def test_functor_roundtrip_on_ass_cotangent():
    P = preset("ass", N=4)
    L = cotangent_ib(P, 3)
    B = FunctorIB(IbFunctor(L, ib_category(P, 3)))
    seqs = list(P.all_seqs(3))
    for s1 in seqs:
        for s2 in seqs:
            if arity(s1) + arity(s2) - 1 > 3:
                continue
            for slot in range(arity(s1)):
                for i in range(P.dim(s1)):
                    for j in range(L.dim(s2)):
                        assert B.left_basis(s1, i, slot, s2, j) == L.left_basis(s1, i, slot, s2, j)
                for i in range(L.dim(s1)):
                    for j in range(P.dim(s2)):
                        assert B.right_basis(s1, i, slot, s2, j) == L.right_basis(s1, i, slot, s2, j)
