from fractions import Fraction

import pytest

from oracle import nullity
from operadlab.algebras import (ComAlgebra, algebra_derivations, check_algebra, check_amodule, derivation_check,
                                end_ib, free_amodule, ground_algebra, kaehler_algebra, kaehler_comparison,
                                module_hom, quillen_algebra, relative_compose, self_module, truncated_polynomial,
                                zero_module)
from operadlab.barhom import BarSetup
from operadlab.chaincore import ChainComplex
from operadlab.ibmod import check_ibmod, self_ib
from operadlab.linalg import QQ
from operadlab.operads import preset


@pytest.fixture(scope="module")
def com():
    return preset("com", N=4)


def suite(P):
    return [ground_algebra(P), truncated_polynomial(P, 3), truncated_polynomial(P, 5)]


def test_algebra_axioms(com):
    for A in suite(com):
        assert check_algebra(A).ok
        assert check_amodule(A, self_module(A)).ok


class Doubled(ComAlgebra):
    def _act_basis(self, seq, i, args):
        r = ComAlgebra._act_basis(self, seq, i, args)
        if len(args) == 2:
            return {k: 2 * x for k, x in r.items()}
        return r


def test_corrupted_algebra_is_named(com):
    A = truncated_polynomial(com, 3)
    B = Doubled(com, A.V, A.mult, A.unit, "bad")
    rep = check_algebra(B)
    assert not rep.ok and rep.names()


def test_end_dims(com):
    k = ground_algebra(com)
    E = end_ib(k, self_module(k), 3)
    assert [E.dim((("*",) * n, "*")) for n in range(4)] == [1, 1, 1, 1]
    A = truncated_polynomial(com, 3)
    E = end_ib(A, self_module(A), 3)
    # Hom(A^{⊗n}, A): 3^n · 3
    assert [E.dim((("*",) * n, "*")) for n in range(4)] == [3 ** n * 3 for n in range(4)]
    assert check_ibmod(E).ok


def leibniz_nullity(n):
    """dim of derivations of k[x]/(x^n) into itself, as a dense solve on the n×n matrix of δ."""
    def idx(i, j):  # coefficient of x^j in δ(x^i)
        return i * n + j
    rows = []
    for a in range(n):
        for b in range(n):
            # δ(x^a x^b) - δ(x^a) x^b - x^a δ(x^b) = 0, coefficient of x^t
            for t in range(n):
                r = {}
                if a + b < n:
                    r[idx(a + b, t)] = r.get(idx(a + b, t), 0) + 1
                if t - b >= 0:
                    r[idx(a, t - b)] = r.get(idx(a, t - b), 0) - 1
                if t - a >= 0:
                    r[idx(b, t - a)] = r.get(idx(b, t - a), 0) - 1
                rows.append(r)
    return nullity(rows, n * n)


def test_derivations(com):
    A = truncated_polynomial(com, 3)
    assert leibniz_nullity(3) == 2
    assert algebra_derivations(A, self_module(A)).dim == 2
    k = ground_algebra(com)
    assert algebra_derivations(k, self_module(k)).dim == 0


@pytest.mark.parametrize("i", [0, 1, 2])
def test_derivation_correspondence(com, i):
    A = suite(com)[i]
    der, tan, om = derivation_check(A, self_module(A))
    assert der == tan == om


def test_kaehler(com):
    k = ground_algebra(com)
    assert len(kaehler_algebra(k)[0].V.labels) == 0
    A = truncated_polynomial(com, 3)
    Om, d = kaehler_algebra(A)
    assert len(Om.V.labels) == 2
    # d(1) = 0
    assert d({0: 1}) == {}
    assert len(module_hom(Om, self_module(A))) == algebra_derivations(A, self_module(A)).dim
    assert len(module_hom(Om, zero_module(A))) == 0


def test_relative_compose_with_self(com):
    for A in suite(com):
        R = relative_compose(self_ib(com), A)
        assert R.value("*").dims() == A.value("*").dims()


def test_free_amodule(com):
    for A in suite(com):
        assert free_amodule(A).value("*").dims() == A.value("*").dims()


@pytest.mark.parametrize("i,dim", [(0, 0), (1, 2), (2, 4)])
def test_kaehler_comparison(com, i, dim):
    W = kaehler_comparison(com, suite(com)[i])
    assert W.bijective and W.dims == (dim, dim)


def test_quillen_algebra(com):
    P = preset("com", N=3)
    A = truncated_polynomial(P, 3)
    S = BarSetup(3, (0, 1))
    assert quillen_algebra(A, zero_module(A), S).nonzero() == {}
    T = quillen_algebra(A, self_module(A), S)
    assert T[0] >= algebra_derivations(A, self_module(A)).dim
    assert T.caveats


def test_quillen_algebra_basis_invariance():
    # e1 = x + x², e2 = 2x² in k[x]/(x³): e1·e1 = e2/2
    P = preset("com", N=3)
    A = truncated_polynomial(P, 3)
    V = ChainComplex(["1", "e1", "e2"], [0, 0, 0], None, QQ)
    mult = {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}, (0, 2): {2: 1}, (2, 0): {2: 1},
            (1, 1): {2: Fraction(1, 2)}}
    B = ComAlgebra(P, V, mult, 0, "B")
    assert check_algebra(B).ok
    S = BarSetup(3, (0, 1))
    assert quillen_algebra(A, self_module(A), S).rows == quillen_algebra(B, self_module(B), S).rows
