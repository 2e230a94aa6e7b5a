import pytest

from operadlab.ibmod import self_ib, square_zero, square_zero_projection, ZeroIB
from operadlab.linalg import GF
from operadlab.operads import ComOperad, abelianization, check_operad, identity_map, preset


def dims(P, top):
    return tuple(P.dim((("*",) * n, "*")) for n in range(top + 1))


def test_preset_dims():
    assert dims(preset("com", N=4), 4) == (1, 1, 1, 1, 1)
    assert dims(preset("ass", N=4), 4) == (1, 1, 2, 6, 24)
    assert dims(preset("nilpotent2", N=4), 4) == (0, 1, 1, 0, 0)
    assert dims(preset("i", N=4), 4) == (0, 1, 0, 0, 0)
    assert all(list(preset("com", N=4).level((("*",) * n, "*")).degrees) == [0] for n in range(5))


@pytest.mark.parametrize("name", ["i", "com", "ass", "nilpotent2"])
@pytest.mark.parametrize("N", [2, 4, 6])
def test_presets_pass(name, N):
    rep = check_operad(preset(name, N=N))
    assert rep.ok, rep.lines()


def test_prime_field_and_colours():
    assert check_operad(preset("com", N=4, field=GF(3))).ok
    assert check_operad(preset("ass", N=3, colors=("a", "b"))).ok


class Corrupted(ComOperad):
    def _compose_basis(self, s1, i, slot, s2, j):
        r = ComOperad._compose_basis(self, s1, i, slot, s2, j)
        if len(s1[0]) == 2 and len(s2[0]) == 2 and slot == 0:
            return {k: -x for k, x in r.items()}
        return r


def test_corruption_is_named():
    rep = check_operad(Corrupted(4))
    assert not rep.ok
    assert any("associativity" in n for n in rep.names())


def test_ass_binary_compositions_biject_onto_arity_three():
    P = preset("ass", N=3)
    s2 = (("*", "*"), "*")
    hits = []
    for slot in (0, 1):
        for i in range(2):
            for j in range(2):
                v = P.compose_basis(s2, i, slot, s2, j)
                assert len(v) == 1 and list(v.values()) == [1]
                hits.extend(v)
    assert sorted(set(hits)) == list(range(6))


def test_square_zero():
    P = preset("com", N=4)
    Z = square_zero(P, self_ib(P))
    assert check_operad(Z).ok
    assert dims(Z, 4) == (2, 2, 2, 2, 2)
    assert dims(square_zero(P, ZeroIB(P)), 4) == dims(P, 4)
    assert square_zero_projection(Z).check().ok


def test_maps():
    A, C = preset("ass", N=3), preset("com", N=3)
    assert identity_map(A).check().ok
    assert abelianization(A, C).check().ok
