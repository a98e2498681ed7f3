"""Torsion growth in congruence quotients of the integer Heisenberg group.

For the level-n subgroup the abelianisation is Z^2 plus Z/n, so ln|tors| / index
equals ln(n) / n^3 and decays to zero.
"""

import math

from ranktorsion import build_schreier, homology, make_action

for n in (2, 3, 4, 5, 6, 8):
    group, action = make_action("heisenberg", n=n)
    snf = homology(group, build_schreier(action))
    N = n ** 3
    stat = math.log(snf.trs) / N
    print(f"n={n:<2} index={N:<4} H1 = Z^{snf.betti} + {snf.torsion}  "
          f"ln|tors|/index = {stat:.6f}  (ln n / n^3 = {math.log(n) / N:.6f})")
