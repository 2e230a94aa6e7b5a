"""Hochschild and Quillen tables of Com, computed two ways."""

from operadlab.barhom import BarSetup, fiber_sequence_report, hochschild, quillen
from operadlab.ibmod import cotangent_ib, self_ib
from operadlab.operads import preset
from operadlab.pirashvili import compare_com_cotangent, constant_functor, gamma_hochschild


def show(T):
    print("%s (method %s, N=%s)" % (T.kind, T.method, T.N))
    for n, dim, ok in T.rows:
        print("  %3d  %d%s" % (n, dim, "" if ok else "  (unstabilized)"))


P = preset("com", N=4)
S = BarSetup(6, (-3, 3))
show(hochschild(P, self_ib(P), S))
show(gamma_hochschild(constant_functor(3), S))
show(quillen(P, self_ib(P), S))

L = cotangent_ib(P)
print("dim L(m):", [L.dim((("*",) * m, "*")) for m in range(5)])
print(compare_com_cotangent(4))
print(fiber_sequence_report(P, self_ib(P), BarSetup(4, (-3, 3))))
