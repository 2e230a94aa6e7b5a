from fractions import Fraction
from math import comb

import pytest

from operadlab.chaincore import (ChainComplex, ChainMap, InsufficientSupport, binomial_fiber_dims, ground, hom_complex,
                                 homology, sphere, stable_loop_fiber, tensor, tensor_power, threads, zero_complex)
from operadlab.linalg import GF, QQ, SparseMatrix, field_from_string, kernel, nullspace, rank, solve


def cone():
    return ChainComplex(["a", "b"], [1, 0], [{1: 1}, {}], QQ)


# -- linear algebra

def test_rank_exact_over_q():
    vs = [{0: Fraction(1, 3), 1: 1}, {0: 1, 1: 3}, {2: 1}]
    assert rank(vs, QQ) == 2


def test_rank_depends_on_characteristic():
    vs = [{0: 1, 1: 1}, {0: 1, 1: -1}]
    assert rank(vs, QQ) == 2
    assert rank(vs, GF(2)) == 1


def test_kernel_and_nullspace():
    cols = [{0: 1}, {0: 2}, {1: 1}]
    K = kernel(cols, QQ, 3)
    assert len(K) == 1
    v = K[0]
    assert {0: v.get(0, 0) + 2 * v.get(1, 0)} == {0: 0}
    assert len(nullspace([{0: 1, 1: 1}], 3, QQ)) == 2


def test_solve():
    x = solve([{0: 2}, {1: 3}], {0: 4, 1: 3}, QQ)
    assert x == {0: 2, 1: 1}


def test_fields_parse_and_format():
    assert QQ.format(QQ.parse("-6/4")) == "-3/2"
    F = field_from_string("7")
    assert F.p == 7 and F.format(F.parse("10")) == "3"
    with pytest.raises(ValueError):
        GF(6)


def test_sparse_matrix_triplets_roundtrip():
    M = SparseMatrix.from_triplets(2, 2, [(0, 1, 5), (1, 0, -1)], QQ)
    assert sorted(M.triplets()) == [(0, 1, 5), (1, 0, -1)]


# -- complexes

def test_differential_must_square_to_zero():
    with pytest.raises(ValueError):
        ChainComplex(["a", "b", "c"], [2, 1, 0], [{1: 1}, {2: 1}, {}], QQ)


def test_homology_ground():
    assert homology(ground(QQ), (-1, 1)) == {0: 1}


def test_homology_acyclic_cone():
    assert homology(cone(), (0, 1)).as_dict() == {}


def test_homology_sphere():
    assert homology(sphere(3), (0, 3)) == {0: 1, 3: 1}
    assert homology(sphere(1)) == {0: 1, 1: 1}
    assert sphere(0).dims() == {0: 2}
    assert sphere(3).dims() == {0: 1, 3: 1}


def test_insufficient_support():
    with pytest.raises(InsufficientSupport):
        homology(ground(QQ), (-5, 5))


def test_tensor_unit_and_binomials():
    C = cone()
    assert tensor(ground(QQ), C).dims() == C.dims()
    for m in range(1, 5):
        dims = tensor_power(sphere(2), m).dims()
        assert dims == {2 * i: comb(m, i) for i in range(m + 1)}


def test_tensor_of_acyclics_is_acyclic():
    T = tensor(cone(), cone())
    assert len(T.labels) == 4
    assert homology(T).as_dict() == {}


def test_hom_complex_basics():
    C = cone()
    assert hom_complex(ground(QQ), C).dims() == C.dims()
    assert hom_complex(C, zero_complex(QQ)).dims() == {}


@pytest.mark.parametrize("n", [1, 2, 3])
def test_hom_sphere_sphere_h0(n):
    # zero differential, so H_0 is the degree-0 part: id_0 and id_n
    assert homology(hom_complex(sphere(n), sphere(n)))[0] == 2


def test_chain_map_sign_condition():
    C = cone()
    ChainMap.identity(C).check()
    bad = SparseMatrix(2, 2, [{0: 1}, {}], QQ)
    with pytest.raises(ValueError):
        ChainMap(C, C, bad)


# -- loop fibers

def test_loop_fiber_m1():
    R = stable_loop_fiber(1, 4, (-2, 2))
    assert R.table == {0: 1} and R.n0 == 0 and R.stabilized


@pytest.mark.parametrize("m", range(2, 7))
def test_loop_fiber_stabilizes_to_km(m):
    R = stable_loop_fiber(m, 8, (-2, 2))
    assert R.stabilized
    assert R.table == {0: m}


def test_prestable_extra_class():
    # C(m, i) copies of k in degree (i-1)n; at m=2, n=1 the i=2 summand sits in degree 1
    R = stable_loop_fiber(2, 4, (-2, 2))
    n1 = dict(R.tables)[1]
    expect = {}
    for i in range(1, 3):
        d = (i - 1) * 1
        if -2 <= d <= 2:
            expect[d] = expect.get(d, 0) + comb(2, i)
    assert n1 == expect == {0: 2, 1: 1}
    assert binomial_fiber_dims(2, 1, (-2, 2)) == expect


def test_threads_env(monkeypatch):
    monkeypatch.setenv("OPERADLAB_THREADS", "3")
    assert threads() == 3
