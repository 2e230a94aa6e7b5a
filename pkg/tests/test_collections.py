from itertools import product

import pytest

from operadlab.chaincore import ground
from operadlab.collection import (DirectSum, ExplicitCollection, compose, inf_compose, unit_E, unit_I)
from operadlab.linalg import QQ
from operadlab.operads import preset


def one_color_dims(C, top):
    return {n: C.dim((("*",) * n, "*")) for n in range(top + 1)}


def orbit_count(m, n):
    """Σ_n-orbits of functions {1..m} -> {1..n}: blocks of an ordered decomposition up to reordering."""
    seen = set()
    for f in product(range(n), repeat=m):
        blocks = [tuple(i for i in range(m) if f[i] == b) for b in range(n)]
        seen.add(tuple(sorted(blocks)))
    return len(seen)


def test_actions_are_symmetric_group_actions():
    for name in ("com", "ass", "nilpotent2"):
        assert preset(name, N=4).check_actions() == []


def test_explicit_collection_missing_action_is_trivial_on_fixed_sequences():
    C = ExplicitCollection(("*",), QQ, 2, {(("*", "*"), "*"): ground(QQ)})
    assert C.act_basis((("*", "*"), "*"), 0, (1, 0)) == {0: 1}


def test_compose_with_unit():
    P = preset("ass", N=3)
    I = unit_I(("*",), QQ, 3)
    for C in (compose(I, P), compose(P, I)):
        assert one_color_dims(C, 3) == one_color_dims(P, 3)
        assert C.policy.truncated is False


def test_com_com_composite_dims():
    # coinvariants of a trivial action: one class per orbit of decompositions
    N = 4
    C = compose(preset("com", N=N), preset("com", N=N))
    expect = {m: sum(orbit_count(m, n) for n in range(N + 1)) for m in range(N + 1)}
    assert one_color_dims(C, N) == expect
    assert expect == {0: 5, 1: 4, 2: 7, 3: 15, 4: 38}
    assert C.policy.truncated


def test_compose_unit_e_without_constants():
    M = preset("nilpotent2", N=3)
    C = compose(unit_E(("*",), QQ, 3), M)
    assert one_color_dims(C, 3) == {0: 1, 1: 0, 2: 0, 3: 0}


def test_inf_compose_units():
    P = preset("ass", N=4)
    I = unit_I(("*",), QQ, 4)
    assert one_color_dims(inf_compose(I, P), 4) == one_color_dims(P, 4)
    assert one_color_dims(inf_compose(P, I), 4) == {m: m * P.dim((("*",) * m, "*")) for m in range(5)}


def test_inf_compose_distributes():
    P = preset("com", N=3)
    A, B = preset("nilpotent2", N=3), preset("ass", N=3)
    lhs = inf_compose(P, DirectSum([A, B]), 3)
    rhs = DirectSum([inf_compose(P, A, 3), inf_compose(P, B, 3)])
    assert one_color_dims(lhs, 3) == one_color_dims(rhs, 3)


def test_inf_compose_actions():
    P = preset("ass", N=3)
    C = inf_compose(P, preset("com", N=3), 3)
    assert C.check_actions() == []


def test_colour_mismatch():
    with pytest.raises(ValueError):
        compose(preset("com", N=2), preset("com", N=2, colors=("a", "b")))
