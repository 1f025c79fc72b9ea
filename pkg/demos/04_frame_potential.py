# Probabilistic frame potential
#
# For measures on the unit sphere the p = 2 potential is the sum of squared
# eigenvalues of the frame operator. It is at least 1/n, with equality
# exactly for tight frames.

import numpy as np

from frameport import pfp, pfp_minimizer_check
from frameport.measure import DiscreteMeasure


def lines(k):
    t = np.pi * np.arange(k) / k
    return DiscreteMeasure(np.column_stack([np.cos(t), np.sin(t)]), np.full(k, 1 / k))


for k in range(2, 7):
    print(f"{k} equiangular lines: potential {pfp(lines(k)):.15f}")

rng = np.random.default_rng(0)
atoms = rng.standard_normal((20, 3))
atoms /= np.linalg.norm(atoms, axis=1, keepdims=True)
mu = DiscreteMeasure(atoms, np.full(20, 1 / 20))
print("random sphere measure:", pfp(mu), ">= 1/3")

rep = pfp_minimizer_check(mu)
print("violation:", rep.violation, " worst direction:", rep.argmin)
