# Discrete measures as frames
#
# A probability measure on R^n acts like a weighted frame: its frame operator
# is the weighted sum of outer products of its atoms, and the distance from
# the measure to its projection onto a hyperplane plays the role of a frame
# coefficient.

import numpy as np

from frameport import (
    frame_ellipsoid,
    frame_operator,
    frame_report,
    new_discrete,
    project_hyperplane,
    directional_distance,
    wasserstein_p,
)

# %% A small measure in the plane

mu = new_discrete(2, [(2.0, 0.5), (-0.3, 1.0), (1.0, 1.0)], [0.2, 0.5, 0.3])
S = frame_operator(mu)
print("frame operator\n", S)

# %% Directional distance against the transport oracle
#
# Projecting onto the hyperplane orthogonal to x moves every atom along x,
# so the closed form and the exact transport cost must agree.

x = np.array([np.cos(0.7), np.sin(0.7)])
for p in (1, 2, 3):
    closed = directional_distance(mu, x, p)
    oracle = wasserstein_p(mu, project_hyperplane(mu, x), p)
    print(f"p={p}: closed form {closed:.12f}   oracle {oracle:.12f}")

# %% Frame bounds: eigenvalues at p = 2, a sphere search otherwise

for p in (2, 1.5):
    rep = frame_report(mu, p)
    print(f"p={p}: A={rep.lower_bound:.6f} B={rep.upper_bound:.6f} method={rep.method}")

# %% The frame ellipsoid {y : y^T S y <= 1}

ell = frame_ellipsoid(mu)
print("semi-axis lengths", ell.semi_lengths)
