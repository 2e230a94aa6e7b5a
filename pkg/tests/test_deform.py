"""First-order deformations and artinian test rings."""

import random

import pytest

from operadlab.chaincore import ChainComplex
from operadlab.collection import substitute
from operadlab.deform import (_solve, def1_direction, def1_space, direction, dual_numbers,
                              is_artinian, product_kk, square_zero_ext)
from operadlab.io import ExplicitOperad
from operadlab.linalg import QQ
from operadlab.operads import check_operad, preset


# ---------------------------------------------------------------------------
# oracle: the perturbed structure on P ⊕ tP, checked as an honest operad

def perturbed(P, S, v):
    """P ⊗ k[t]/t² with d + tδ and ∘ + tγ read off the vector v over S.var."""
    top = S.top
    delta, gamma = {}, {}
    names = sorted(S.var, key=S.var.get)
    for k, x in v.items():
        key = names[k]
        if key[0] == "d":
            _, _, seq, i, t = key
            delta.setdefault((seq, i), {})[t] = x
        else:
            _, _, s1, i, slot, s2, j, t = key
            gamma.setdefault((s1, i, slot, s2, j), {})[t] = x
    seqs = list(P.all_seqs(top))
    levels, trs, comps = {}, {}, {}
    for seq in seqs:
        L = P.level(seq)
        n = len(L.labels)
        d = []
        for i in range(n):
            img = dict(L.d[i])
            img.update({t + n: x for t, x in delta.get((seq, i), {}).items()})
            d.append(img)
        d += [{t + n: x for t, x in L.d[i].items()} for i in range(n)]
        levels[seq] = ChainComplex([(l, 0) for l in L.labels] + [(l, 1) for l in L.labels],
                                   list(L.degrees) * 2, d, P.F, check=False)
        for t in range(len(seq[0]) - 1):
            M = P.transposition_matrix(seq, t)
            trs[(seq, t)] = [dict(r) for r in M] + [{k + n: x for k, x in r.items()} for r in M]
    for s1 in seqs:
        for slot in range(len(s1[0])):
            for s2 in seqs:
                if s2[1] != s1[0][slot] or len(s1[0]) + len(s2[0]) - 1 > top:
                    continue
                n1, n2 = P.dim(s1), P.dim(s2)
                n12 = P.dim(substitute(s1, slot, s2))
                tab = {}
                for i in range(n1):
                    for j in range(n2):
                        xy = P.compose_basis(s1, i, slot, s2, j)
                        g = dict(xy)
                        g.update({t + n12: x for t, x in gamma.get((s1, i, slot, s2, j), {}).items()})
                        tab[(i, j)] = g
                        tab[(i + n1, j)] = {t + n12: x for t, x in xy.items()}
                        tab[(i, j + n2)] = {t + n12: x for t, x in xy.items()}
                comps[(s1, slot, s2)] = tab
    units = {c: P.unit(c) for c in P.colors}
    return ExplicitOperad(P.colors, P.F, top, levels, trs, comps, units, name="P[t]")


CASES = [("i", 3), ("com", 3), ("nilpotent2", 4), ("ass", 3)]


@pytest.mark.parametrize("name,N", CASES)
def test_cocycles_are_exactly_the_deformations(name, N):
    P = preset(name, N=N)
    S, coc = _solve(P, [0], None)
    for v in coc:
        assert check_operad(perturbed(P, S, v)).ok
    # a generic perturbation off the cocycle space must break some axiom
    rnd = random.Random(7)
    if len(coc) < len(S.var):
        for _ in range(3):
            v = {k: QQ.norm(rnd.choice([-2, -1, 1, 3])) for k in range(len(S.var))}
            assert not check_operad(perturbed(P, S, v)).ok


@pytest.mark.parametrize("name,N,want", [("i", 3, 0), ("com", 3, 0), ("nilpotent2", 4, 0),
                                         ("com", 4, 0), ("ass", 3, 1)])
def test_def1_dims(name, N, want):
    D = def1_space(preset(name, N=N))
    assert D.dim == want
    assert len(D.representatives) == D.dim
    assert D.gauge_rank <= len(D.cocycles)


@pytest.mark.parametrize("name,N", [("com", 3), ("ass", 3), ("nilpotent2", 4)])
def test_direction_k2_doubles(name, N):
    P = preset(name, N=N)
    one = def1_space(P).dim
    assert def1_direction(P, direction({0: 2})).dim == 2 * one
    assert def1_direction(P, direction({0: 1})).dim == one


def test_direction_restrictions():
    P = preset("com", N=3)
    assert def1_direction(P, direction({})).dim == 0
    with pytest.raises(ValueError):
        def1_direction(P, direction({-1: 1}))
    A = ChainComplex(["a", "b"], [1, 0], [{1: 1}, {}], QQ)
    with pytest.raises(NotImplementedError):
        def1_direction(P, A)


def test_artinian_rings():
    assert is_artinian(dual_numbers()).ok
    w = is_artinian(product_kk())
    assert not w.ok and w.reason == "not local"
    assert is_artinian(square_zero_ext(direction({0: 2, 1: 1}))).ok
