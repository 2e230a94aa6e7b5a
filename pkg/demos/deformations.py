"""First-order deformations of a few small operads."""

from operadlab.deform import def1_direction, def1_space, direction, dual_numbers, is_artinian, product_kk
from operadlab.operads import preset

for R in (dual_numbers(), product_kk()):
    w = is_artinian(R)
    print("%-10s artinian=%s %s" % (R.name, w.ok, w.reason or ""))

for name, N in (("i", 3), ("com", 3), ("nilpotent2", 4), ("ass", 3)):
    P = preset(name, N=N)
    D = def1_space(P)
    two = def1_direction(P, direction({0: 2})).dim
    print("%-11s %r  over k+k: %d" % (name, D, two))
