import pytest

from operadlab.algebras import end_ib, quillen_algebra, self_module, truncated_polynomial
from operadlab.barhom import BarSetup, hochschild
from operadlab.chaincore import zero_complex
from operadlab.ibmod import self_ib
from operadlab.operads import preset
from operadlab.pirashvili import (GammaModule, compare_categories, compare_com_cotangent, compose_maps,
                                  constant_functor, finstar_cat, gamma_from_ib, gamma_hochschild, pointed_maps,
                                  stable_cohomotopy, t_functor)


class ZeroGamma(GammaModule):
    def _build_value(self, x):
        return zero_complex(self.F)

    def _act_basis(self, x, y, i, a):
        return {}


def test_pointed_maps():
    G = finstar_cat(4)
    for m in range(5):
        # based maps ⟨1⟩ -> ⟨m⟩: ρ_0..ρ_m
        assert len(G.maps(m, 1)[0]) == m + 1
    assert len(G.maps(1, 2)[0]) == 4
    assert compose_maps((2, 0), (1, 1, 0)) == (2, 2, 0)
    assert len(pointed_maps(3, 2)) == 27


@pytest.mark.parametrize("N", [1, 2])
def test_category_axioms(N):
    assert finstar_cat(N).check().ok
    assert t_functor(N).check().ok
    assert constant_functor(N).check().ok


def test_t_values():
    T = t_functor(3)
    assert len(T.value(0).labels) == 0 and len(T.value(3).labels) == 3


def test_rho_zero_acts_by_zero():
    T = t_functor(3)
    G = T.D
    for m in range(1, 4):
        a = G.maps(m, 1)[1][(0,)]
        for i in range(m):
            assert T.act_basis(m, 1, i, a) == {}


def test_fold_is_diagonal():
    T = t_functor(2)
    a = T.D.maps(1, 2)[1][(1, 1)]
    assert T.act_basis(1, 2, 0, a) == {0: 1, 1: 1}


@pytest.mark.parametrize("N", [1, 2, 3])
def test_ib_com_is_finstar(N):
    assert compare_categories(N).ok


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_cotangent_is_t(N):
    R = compare_com_cotangent(N)
    assert R.ok and R.objects == N + 1
    assert R.morphisms == sum((n + 1) ** m for n in range(N + 1) for m in range(N + 1))


def test_stable_cohomotopy():
    S = BarSetup(4, (-3, 3))
    assert stable_cohomotopy(ZeroGamma(finstar_cat(3)), S).nonzero() == {}
    T = stable_cohomotopy(t_functor(3), S)
    assert T[-1] >= 1 and T.stabilized(-1)
    assert stable_cohomotopy(constant_functor(3), S).nonzero() == {}


@pytest.mark.parametrize("N", [2, 3, 4])
def test_gamma_hochschild_of_constant(N):
    T = gamma_hochschild(constant_functor(N), BarSetup(4, (-3, 3)))
    assert T.nonzero() == {0: 1} and T.all_stabilized()


def test_gamma_from_ib_matches_ib_pipeline():
    P = preset("com", N=4)
    S = BarSetup(4, (-2, 2))
    ib = hochschild(P, self_ib(P), S)
    fin = gamma_hochschild(gamma_from_ib(self_ib(P), 3), S)
    assert ib.stable_rows() == {n: d for n, d in fin.stable_rows().items() if n in ib.stable_rows()}


def test_end_transport_reproduces_algebra_quillen_up_to_loop_shift():
    P = preset("com", N=3)
    A = truncated_polynomial(P, 3)
    E = end_ib(A, self_module(A), 2)
    q = quillen_algebra(A, self_module(A), BarSetup(3, (0, 1)))
    s = stable_cohomotopy(gamma_from_ib(E, 2), BarSetup(3, (-1, 0)))
    assert [q[n] for n in (0, 1)] == [s[n - 1] for n in (0, 1)]
