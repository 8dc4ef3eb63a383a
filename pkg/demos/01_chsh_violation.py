"""Exact CHSH values on two qubits: local bound 2, quantum maximum 2*sqrt(2).

Walks the standard singlet experiment: outcome tables for a few setting
pairs, the CHSH combination at the optimal angles, and a sweep showing how
the violation depends on the relative angle between the two parties' bases.
"""

import math

import numpy as np

import chronobell as cb

singlet = cb.make_singlet()
A = lambda deg: cb.BlochSetting.from_angle(deg, "A")
B = lambda deg: cb.BlochSetting.from_angle(deg, "B")

print("=== outcome tables on the singlet ===")
for deg in (0, 45, 90):
    jd = cb.joint_distribution(singlet, A(0), B(deg))
    print(f"a=z, b at {deg:3d} deg: P(+,+)={jd.prob(1, 1):.4f}  P(+,-)={jd.prob(1, -1):.4f}"
          f"  E={jd.correlator():+.4f}")

print()
print("=== CHSH at the optimal settings: a=0, a2=90, b=45, b2=-45 degrees ===")
value = cb.chsh_value(singlet, A(0), A(90), B(45), B(-45))
print(f"E(a,b) + E(a,b2) + E(a2,b) - E(a2,b2) = {value:+.9f}")
print(f"local bound 2, Tsirelson bound 2*sqrt(2) = {2 * math.sqrt(2):.9f}")

print()
print("=== sweep: b at angle t, b2 at -t ===")
print("  t    CHSH value   |CHSH| > 2?")
for t in np.linspace(0, 90, 10):
    v = cb.chsh_value(singlet, A(0), A(90), B(t), B(-t))
    marker = " <-- violation" if abs(v) > 2 else ""
    print(f"{t:5.1f}  {v:+.6f}{marker}")

print()
print("=== a product state never violates ===")
product = cb.make_product_state()
worst = max(
    abs(cb.chsh_value(product, A(0), A(a2), B(b), B(b2)))
    for a2 in (30, 60, 90)
    for b in (15, 45)
    for b2 in (-45, 135)
)
print(f"max |CHSH| over a grid of settings: {worst:.6f} <= 2")
