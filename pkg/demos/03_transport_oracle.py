# The exact transport oracle
#
# Every distance in the package is checked against a transportation simplex
# solver. For small problems the optimum is also the best basic feasible
# solution, and in one dimension the monotone (quantile) coupling is optimal.

import numpy as np

from frameport import solve_exact
from frameport.measure import DiscreteMeasure

rng = np.random.default_rng(3)

# %% A small problem with a visible plan

mu = DiscreteMeasure([[0.0], [1.0], [3.0]], [0.5, 0.25, 0.25])
nu = DiscreteMeasure([[0.5], [2.0]], [0.5, 0.5])
plan = solve_exact(mu, nu, p=2)
print("cost", plan.cost)
print("plan\n", plan.flow)
print("pivots", plan.pivots, " min reduced cost", plan.min_reduced_cost)

# %% One dimension: compare with the sorted quantile coupling

x, y = np.sort(rng.standard_normal(200)), np.sort(rng.standard_normal(200))
mu1 = DiscreteMeasure(x[:, None], np.full(200, 1 / 200))
nu1 = DiscreteMeasure(y[:, None], np.full(200, 1 / 200))
print("simplex ", solve_exact(mu1, nu1, p=2).cost)
print("quantile", np.mean((x - y) ** 2))
