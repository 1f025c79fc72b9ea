# Transport duals
#
# A coupling gamma is a transport dual when the cross moment of its two
# marginals is the identity. The canonical dual pushes mu by S^{-1}; adding a
# perturbation h with zero cross moment against mu gives further duals,
# which all sit farther from the canonical one.

import numpy as np

from frameport import (
    canonical_dual_coupling,
    delta_dual_family,
    dual_distance_check,
    dual_feasibility,
    frame_operator,
    is_m_dual,
    pushforward_dual,
)
from frameport.duals import diverging_duals, split_mass_dual
from frameport.measure import DiscreteMeasure

rng = np.random.default_rng(11)
mu = DiscreteMeasure(rng.standard_normal((8, 2)), np.full(8, 1 / 8))
S = frame_operator(mu)

# %% The canonical dual and a perturbed one

gamma = canonical_dual_coupling(mu)
print("canonical is a dual:", is_m_dual(gamma).valid)
nu, g = pushforward_dual(mu, 0.5 * rng.standard_normal((8, 2)))
print("perturbed is a dual:", is_m_dual(g).valid)
print(dual_distance_check(mu, nu, g).to_dict())
print("eigenvalues of S_nu^1/2 S S_nu^1/2:", dual_feasibility(S, frame_operator(nu))[1])

# %% Duals of a point mass in one dimension

a = 2.0
for lam in (0.25, 1.0, 4.0):
    nu = delta_dual_family(a, lam)
    print(f"lambda={lam}: atoms {nu.atoms.ravel()}, weights {nu.weights}")
nu, _ = split_mass_dual(a, 0.3)
print("split-mass dual:", nu.atoms.ravel(), nu.weights)

# %% The dual set is not compact: translating by alpha keeps duality

centred = DiscreteMeasure([[-1.0], [1.0]], [0.5, 0.5])
for nu in diverging_duals(centred, [0, 10, 100]):
    print("dual with mean", nu.atoms.T @ nu.weights)
