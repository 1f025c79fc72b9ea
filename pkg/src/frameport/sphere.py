"""Deterministic point sets on the unit sphere."""

import numpy as np

GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))
PROBE_COUNT = 64
PROBE_SEED = 0


def circle_grid(count):
    """``count`` equally spaced directions on the upper half circle.

    Direction functions in this package are even in ``x``, so the half
    circle covers all of S^1.
    """
    theta = np.pi * np.arange(count) / count
    return np.column_stack([np.cos(theta), np.sin(theta)])


def fibonacci_sphere(count, hemisphere=False):
    """Golden-angle spiral on S^2 (or on its upper half)."""
    i = np.arange(count) + 0.5
    if hemisphere:
        z = 1.0 - i / count
    else:
        z = 1.0 - 2.0 * i / count
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = GOLDEN_ANGLE * np.arange(count)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def sphere_grid(dim, count):
    """Grid used for sphere optimisation; supports ``dim <= 3``."""
    if dim == 1:
        return np.ones((1, 1))
    if dim == 2:
        return circle_grid(count)
    if dim == 3:
        return fibonacci_sphere(count, hemisphere=True)
    raise ValueError(f"no sphere grid for dim={dim}")


def probe_directions(dim, count=PROBE_COUNT, seed=PROBE_SEED):
    """Fixed probe set and its identifier.

    Uniform half-circle angles in R^2, a Fibonacci sphere in R^3, and for
    ``dim >= 4`` stacked orthonormal bases from QR of seeded Gaussian
    matrices. In R^1 the only direction up to sign is ``+1``.
    """
    if dim == 1:
        return np.ones((1, 1)), "line-1"
    if dim == 2:
        return circle_grid(count), f"circle-{count}"
    if dim == 3:
        return fibonacci_sphere(count), f"fibonacci-{count}"
    rng = np.random.default_rng(seed)
    blocks = []
    while sum(len(b) for b in blocks) < count:
        Q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
        blocks.append(Q.T)
    return np.vstack(blocks)[:count], f"qr-seed{seed}-{count}"
