import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from frameport.duals import convex_combine_duals, pushforward_dual
from frameport.measure import DiscreteMeasure

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def random_measure(rng, dim, size, scale=1.0):
    atoms = scale * rng.standard_normal((size, dim))
    weights = rng.random(size) + 0.05
    return DiscreteMeasure(atoms, weights / weights.sum())


def random_frame(rng, dim, size=None):
    """Random measure with a well-conditioned frame operator."""
    size = size if size is not None else max(dim + 2, int(rng.integers(dim + 1, 12)))
    while True:
        mu = random_measure(rng, dim, size)
        w = np.linalg.eigvalsh(mu.atoms.T @ (mu.weights[:, None] * mu.atoms))
        if w[0] > 1e-2 * max(1.0, w[-1]):
            return mu


def random_psd(rng, dim, rank=None):
    B = rng.standard_normal((rank or dim, dim))
    return B.T @ B


def random_definite(rng, dim):
    return random_psd(rng, dim) + 0.1 * np.eye(dim)


def random_unit(rng, dim):
    x = rng.standard_normal(dim)
    return x / np.linalg.norm(x)


def sphere_measure(rng, dim, size):
    atoms = rng.standard_normal((size, dim))
    atoms /= np.linalg.norm(atoms, axis=1, keepdims=True)
    weights = rng.random(size) + 0.05
    return DiscreteMeasure(atoms, weights / weights.sum())


def ngon(k, half=False):
    """Uniform measure on ``k`` equally spaced unit vectors in the plane.

    With ``half=True`` the angles cover ``[0, pi)``, i.e. ``k`` equiangular
    lines, which is the only reading that makes ``k = 2`` tight.
    """
    span = np.pi if half else 2 * np.pi
    t = span * np.arange(k) / k
    return DiscreteMeasure(np.column_stack([np.cos(t), np.sin(t)]), np.full(k, 1.0 / k))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_transport_dual(rng, dim, kind=None):
    """A generated transport-dual coupling ``gamma`` of a random frame.

    Kinds: push-forward duals with random perturbation tables, and mixtures
    of push-forward duals of two frames.
    """
    kind = kind or ("pushforward", "mixture")[int(rng.integers(2))]
    scale = float(rng.choice([0.1, 1.0, 3.0]))
    mu = random_frame(rng, dim)
    _, gamma = pushforward_dual(mu, scale * rng.standard_normal(mu.atoms.shape))
    if kind == "pushforward":
        return gamma
    other = random_frame(rng, dim)
    _, g2 = pushforward_dual(other, scale * rng.standard_normal(other.atoms.shape))
    t = float(rng.random())
    return convex_combine_duals([(t, gamma), (1 - t, g2)])
