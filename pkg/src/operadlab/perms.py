"""
Permutations acting on the right of operations.

A permutation of n inputs is a tuple p with p[j] = the old input placed
at new position j (0-based).  For an operation f, f·p has new input j
equal to old input p[j], so (f·p)·q = f·(p∘q) with (p∘q)[j] = p[q[j]].
"""

from itertools import permutations as _itperms


def identity(n):
    return tuple(range(n))


def compose(p, q):
    """p∘q, the permutation with f·(p∘q) = (f·p)·q."""
    return tuple(p[j] for j in q)


def inverse(p):
    inv = [0] * len(p)
    for j, x in enumerate(p):
        inv[x] = j
    return tuple(inv)


def transposition(n, i):
    """Adjacent transposition swapping positions i and i+1."""
    p = list(range(n))
    p[i], p[i + 1] = p[i + 1], p[i]
    return tuple(p)


def act_seq(items, p):
    return tuple(items[j] for j in p)


def sort_perm(labels):
    """The permutation putting inputs in increasing label order."""
    return tuple(sorted(range(len(labels)), key=lambda j: labels[j]))


def adjacent_word(p):
    """
    Indices i_1..i_k with p = s_{i_1}∘...∘s_{i_k}, so that
    f·p = (...(f·s_{i_1})...)·s_{i_k}.
    """
    arr = list(p)
    swaps = []
    n = len(arr)
    for a in range(n):
        for b in range(n - 1 - a):
            if arr[b] > arr[b + 1]:
                arr[b], arr[b + 1] = arr[b + 1], arr[b]
                swaps.append(b)
    # arr∘s_{swaps[0]}∘... = id, so p = s_{swaps[-1]}∘...∘s_{swaps[0]}
    return swaps[::-1]


def is_identity(p):
    return all(j == x for j, x in enumerate(p))


def sign(p):
    s = 1
    seen = [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        j, ln = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            ln += 1
        if ln % 2 == 0:
            s = -s
    return s


def koszul_sign(p, degrees):
    """
    Sign of reordering graded items: items listed in old order with the
    given degrees are rearranged so that new position j holds old item
    p[j].
    """
    s = 0
    n = len(p)
    for a in range(n):
        da = degrees[p[a]]
        if da % 2 == 0:
            continue
        for b in range(a + 1, n):
            if p[b] < p[a] and degrees[p[b]] % 2:
                s += 1
    return -1 if s % 2 else 1


def block_perm(p, sizes):
    """
    Expand p to blocks: old input k is replaced by sizes[k] consecutive
    inputs.  Returns the induced permutation on the expanded inputs.
    """
    starts = []
    t = 0
    for s in sizes:
        starts.append(t)
        t += s
    out = []
    for j in p:
        out.extend(range(starts[j], starts[j] + sizes[j]))
    return tuple(out)


def all_perms(n):
    return [tuple(x) for x in _itperms(range(n))]
