# Bures geometry of frame operators
#
# Squared transport distance between two measures is bounded below by the
# Bures distance of their frame operators, and the bound is attained inside
# each fiber (all measures with a fixed frame operator) by a linear map.

import numpy as np

from frameport import (
    bures_squared,
    closest_in_fiber,
    closest_on_ray,
    closest_tight,
    frame_operator,
    geodesic,
    optimal_map,
    solve_exact,
    wasserstein_p,
)
from frameport.measure import DiscreteMeasure

rng = np.random.default_rng(7)
mu = DiscreteMeasure(rng.standard_normal((12, 3)), np.full(12, 1 / 12))
S = frame_operator(mu)
T = np.diag([1.0, 2.0, 3.0])

# %% Lower bound versus exact transport to an arbitrary measure

nu = DiscreteMeasure(rng.standard_normal((9, 3)), np.full(9, 1 / 9))
print("Bures bound", bures_squared(S, frame_operator(nu)))
print("exact W2^2 ", solve_exact(mu, nu).cost)

# %% The closest point in the fiber of T is a linear push-forward

closest, d = closest_in_fiber(mu, T)
print("distance to fiber", d, " check", np.sqrt(solve_exact(mu, closest).cost))
print("frame operator of the closest point\n", frame_operator(closest).round(12))

# %% Along the ray {cT : c > 0} and towards tight frames

c, _, d_ray = closest_on_ray(mu, T)
print(f"best scale c={c:.6f}, distance {d_ray:.6f}")
c, tight, d_tight = closest_tight(mu)
print(f"closest tight frame: S = {c**2:.6f} I, distance {d_tight:.6f}")

# %% Geodesics: the segment (1-t) id + t A runs at constant speed

A = optimal_map(S, T)
total = wasserstein_p(mu, geodesic(mu, A, 1.0))
for t in (0.25, 0.5, 0.75):
    print(f"t={t}: W2 from start {wasserstein_p(mu, geodesic(mu, A, t)):.10f}  expected {t * total:.10f}")
