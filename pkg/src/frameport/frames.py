"""Frame quantities of a measure and the transport geometry of its fiber.

For a measure ``mu`` on R^n the frame operator is ``S_mu = sum w_i v_i v_i^t``.
The distance from ``mu`` to its projection onto the hyperplane ``x``-perp is
``(sum w_i |<x, v_i>|^p)^(1/p)``; for ``p = 2`` this is ``sqrt(x^t S_mu x)``.
Everything below builds on those two facts together with the optimal linear
map between fibers from :mod:`frameport.psd`.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import psd
from .measure import (
    MeasureError,
    check_unit,
    fsum_rows,
    push_forward_linear,
)
from .sphere import sphere_grid

FRAME_TOL = 1e-9
DEFAULT_GRID = 10_000
SPHERE_TOL = 1e-8


class NotAFrameError(ValueError):
    """The operation needs a frame (definite frame operator)."""


class UnsupportedError(ValueError):
    """Requested ``p`` / dimension combination has no implemented algorithm."""


def frame_operator(mu):
    """``S_mu = sum_i w_i v_i v_i^t`` with compensated summation."""
    X = mu.atoms
    terms = mu.weights[:, None, None] * X[:, :, None] * X[:, None, :]
    S = fsum_rows(terms)
    return 0.5 * (S + S.T)


def directional_moments(mu, directions, p=2):
    """``sum_i w_i |<x, v_i>|^p`` for each row ``x`` of ``directions``."""
    directions = np.atleast_2d(np.asarray(directions, dtype=float))
    proj = np.abs(mu.atoms @ directions.T)
    return np.array([math.fsum(col) for col in (mu.weights[:, None] * proj ** p).T])


def directional_distance(mu, x, p=2):
    """``W_p(mu, (pi_{x-perp})_# mu)`` in closed form.

    Parameters
    ----------
    mu : DiscreteMeasure
    x : array-like, shape (dim,)
        Unit vector.
    p : float, default=2
    """
    if not p >= 1:
        raise ValueError("p must be >= 1")
    x = check_unit(x, mu.dim)
    return float(directional_moments(mu, x[None, :], p)[0] ** (1.0 / p))


@dataclass(frozen=True)
class FrameReport:
    """Frame bounds ``A <= B`` of a measure for exponent ``p``.

    For ``p = 2`` the bounds are the extreme eigenvalues of the frame
    operator. Otherwise they are the extremes of the directional ``p``-th
    moment over a sphere grid of ``grid`` points followed by one local
    refinement; ``method`` records which.
    """

    frame_operator: np.ndarray
    lower_bound: float
    upper_bound: float
    is_frame: bool
    is_tight: bool
    is_parseval: bool
    p: float
    frame_tol: float
    method: str
    grid: int = None

    def to_dict(self):
        return {
            "A": self.lower_bound,
            "B": self.upper_bound,
            "frame": self.is_frame,
            "tight": self.is_tight,
            "parseval": self.is_parseval,
            "p": self.p,
            "frame_operator": self.frame_operator.tolist(),
            "frame_tol": self.frame_tol,
            "method": self.method,
            "grid": self.grid,
        }


def _refine(f, x0, dim, step, sign):
    # One local pass in angular coordinates; sign=+1 minimises, -1 maximises.
    if dim == 2:
        theta0 = math.atan2(x0[1], x0[0])

        def g(theta):
            return sign * f(np.array([math.cos(theta), math.sin(theta)]))

        res = optimize.minimize_scalar(
            g, bounds=(theta0 - step, theta0 + step), method="bounded",
            options={"xatol": 1e-12},
        )
        t = res.x
        return np.array([math.cos(t), math.sin(t)])

    def to_vec(ang):
        a, b = ang
        return np.array([math.sin(a) * math.cos(b), math.sin(a) * math.sin(b), math.cos(a)])

    ang0 = np.array([math.acos(np.clip(x0[2], -1, 1)), math.atan2(x0[1], x0[0])])
    res = optimize.minimize(
        lambda ang: sign * f(to_vec(ang)), ang0, method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-14, "initial_simplex": np.array(
            [ang0, ang0 + [step, 0.0], ang0 + [0.0, step]])},
    )
    return to_vec(res.x)


def sphere_extremes(mu, p, grid=DEFAULT_GRID):
    """Min and max of the directional ``p``-th moment over S^{n-1}.

    Grid search (see :func:`frameport.sphere.sphere_grid`) plus one local
    refinement of the best grid point for each extreme.

    Returns
    -------
    (lo, x_lo, hi, x_hi)
    """
    dim = mu.dim
    if dim > 3:
        raise UnsupportedError(f"sphere search for p != 2 needs dim <= 3, got {dim}")
    points = sphere_grid(dim, grid)
    values = directional_moments(mu, points, p)
    if dim == 1:
        return values[0], points[0], values[0], points[0]

    def f(x):
        return directional_moments(mu, x[None, :], p)[0]

    step = math.pi / len(points) if dim == 2 else 4.0 / math.sqrt(len(points))
    out = []
    for sign, idx in ((1.0, int(np.argmin(values))), (-1.0, int(np.argmax(values)))):
        x = _refine(f, points[idx], dim, step, sign)
        x = x / np.linalg.norm(x)
        fx = f(x)
        if sign * fx <= sign * values[idx]:
            out.append((fx, x))
        else:
            out.append((values[idx], points[idx]))
    (lo, x_lo), (hi, x_hi) = out
    return lo, x_lo, hi, x_hi


def frame_report(mu, p=2, frame_tol=FRAME_TOL, grid=DEFAULT_GRID):
    """Frame bounds and tight/Parseval flags of ``mu``.

    Raises
    ------
    UnsupportedError
        For ``p != 2`` in dimension above 3.
    """
    if not p >= 1:
        raise ValueError("p must be >= 1")
    S = frame_operator(mu)
    if p == 2:
        w = np.linalg.eigvalsh(S)
        A, B = max(float(w[0]), 0.0), max(float(w[-1]), 0.0)
        method, used_grid = "eigen", None
    else:
        A, _, B, _ = sphere_extremes(mu, p, grid)
        A, B = float(A), float(B)
        method, used_grid = "grid", int(grid)
    is_frame = A > frame_tol
    is_tight = is_frame and (B - A) <= frame_tol * max(1.0, B)
    is_parseval = is_tight and abs(A - 1.0) <= frame_tol
    return FrameReport(S, A, B, is_frame, is_tight, is_parseval, float(p),
                       frame_tol, method, used_grid)


@dataclass(frozen=True)
class Ellipsoid:
    """Image of the unit sphere under ``S_mu^{1/2}``.

    ``axes[:, i]`` is the direction of the ``i``-th semi-axis, of length
    ``semi_lengths[i]`` (nonincreasing).
    """

    axes: np.ndarray
    semi_lengths: np.ndarray

    @property
    def is_degenerate(self):
        return not bool(np.all(self.semi_lengths > 0))

    def directional_value(self, y):
        """``y^t S y``; equals one on the level set of normalised directions.

        For unit ``x`` the point ``x / W_2(mu, (pi_{x-perp})_# mu)`` has value
        exactly one.
        """
        c = self.axes.T @ np.asarray(y, dtype=float)
        return float(np.sum(self.semi_lengths ** 2 * c * c))

    def to_dict(self):
        return {"axes": self.axes.tolist(), "semi_lengths": self.semi_lengths.tolist()}


def frame_ellipsoid(mu):
    w, V = psd.psd_eigh(frame_operator(mu))
    return Ellipsoid(V, np.sqrt(w))


def _require_frame(S):
    w, _ = psd.psd_eigh(S)
    if not w[-1] > max(psd.tol_psd(w), FRAME_TOL * max(1.0, w[0])):
        raise NotAFrameError("measure is not a frame (singular frame operator)")


def canonical_dual(mu):
    """``(S_mu^{-1})_# mu``."""
    S = frame_operator(mu)
    _require_frame(S)
    return push_forward_linear(mu, psd.pinv_psd(S))


def _require_definite(T, name="T"):
    if not psd.is_definite(T):
        raise psd.NotPSDError(f"{name} must be positive definite")


def fiber_distance_squared(S, A):
    """``tr S (I - A)^2`` evaluated as ``||S^{1/2} (I - A)||_F^2``."""
    D = psd.sqrt_psd(S) @ (np.eye(A.shape[0]) - A)
    return float(np.sum(D * D))


def closest_in_fiber(mu, T):
    """Closest measure to ``mu`` with frame operator ``T``.

    Returns
    -------
    nu : DiscreteMeasure
        ``A(S_mu, T)_# mu``.
    distance : float
        ``W_2(mu, nu) = sqrt(tr S_mu (I - A)^2)``.
    """
    S = frame_operator(mu)
    _require_frame(S)
    T = psd.as_symmetric(T, "T")
    _require_definite(T)
    A = psd.optimal_map(S, T)
    return push_forward_linear(mu, A), math.sqrt(fiber_distance_squared(S, A))


def closest_on_ray(mu, T):
    """Closest measure to ``mu`` whose frame operator is a multiple of ``T``.

    The optimal multiple is ``c_min^2 T`` with
    ``c_min = tr (S^{1/2} T S^{1/2})^{1/2} / tr T``.

    Returns
    -------
    (c_min, nu, distance)
    """
    S = frame_operator(mu)
    _require_frame(S)
    T = psd.as_symmetric(T, "T")
    _require_definite(T)
    rS = psd.sqrt_psd(S)
    c_min = float(np.sum(np.sqrt(np.clip(np.linalg.eigvalsh(rS @ T @ rS), 0, None))))
    c_min /= float(np.trace(T))
    A = c_min * psd.optimal_map(S, T)
    nu = push_forward_linear(mu, A)
    return c_min, nu, math.sqrt(fiber_distance_squared(S, A))


def closest_tight(mu):
    """:func:`closest_on_ray` with ``T = I``."""
    return closest_on_ray(mu, np.eye(mu.dim))


def gelbrich_bound(S, T):
    """Lower bound on ``W_2^2(mu, nu)`` from the frame operators alone."""
    return psd.bures_squared(S, T)


def check_orthonormal(basis, dim):
    B = np.atleast_2d(np.asarray(basis, dtype=float))
    if B.shape[1] != dim:
        raise MeasureError(f"basis vectors must have length {dim}")
    if np.max(np.abs(B @ B.T - np.eye(B.shape[0]))) > 1e-10:
        raise MeasureError("basis is not orthonormal")
    return B


def directional_lower_bound(mu, nu, basis):
    """Sum over an orthonormal basis of squared differences of the
    directional 2-Wasserstein distances of ``mu`` and ``nu``; a lower bound
    on ``W_2^2(mu, nu)``."""
    if mu.dim != nu.dim:
        raise MeasureError("dimension mismatch")
    B = check_orthonormal(basis, mu.dim)
    a = np.sqrt(directional_moments(mu, B, 2))
    b = np.sqrt(directional_moments(nu, B, 2))
    return math.fsum((a - b) ** 2)


def geodesic(mu, A, t):
    """``((1 - t) I + t A)_# mu``."""
    return push_forward_linear(mu, psd.interpolate_map(A, t))


def retract_to_fiber(mu, S):
    """``A(S_mu, S)_# mu``; the identity on measures with frame operator ``S``."""
    S_mu = frame_operator(mu)
    _require_frame(S_mu)
    S = psd.as_symmetric(S, "S")
    _require_definite(S, "S")
    return push_forward_linear(mu, psd.optimal_map(S_mu, S))


def _check_sphere(mu):
    norms = np.sqrt(np.sum(mu.atoms ** 2, axis=1))
    if np.max(np.abs(norms - 1.0)) > SPHERE_TOL:
        raise MeasureError("all atoms must lie on the unit sphere")


def pfp(mu, p=2):
    """Probabilistic p-frame potential ``sum_{i,j} w_i w_j |<v_i, v_j>|^p``."""
    _check_sphere(mu)
    G = np.abs(mu.atoms @ mu.atoms.T) ** p
    return math.fsum((mu.weights[:, None] * G * mu.weights[None, :]).ravel())


@dataclass(frozen=True)
class PotentialReport:
    """Necessary-condition check for minimisers of the frame potential.

    ``min_gap`` is the minimum over the sphere of the directional ``p``-th
    moment minus the potential; ``support_gap`` the largest deviation of the
    directional moment from the potential over support atoms.
    """

    potential: float
    min_gap: float
    support_gap: float
    violation: bool
    p: float
    tol: float
    method: str
    grid: int = None
    argmin: np.ndarray = field(default=None, repr=False)

    def to_dict(self):
        return {
            "pfp": self.potential,
            "min_gap": self.min_gap,
            "support_gap": self.support_gap,
            "violation": self.violation,
            "p": self.p,
            "tol": self.tol,
            "method": self.method,
            "grid": self.grid,
            "argmin": None if self.argmin is None else self.argmin.tolist(),
        }


def pfp_minimizer_check(mu, p=2, tol=1e-9, grid=DEFAULT_GRID):
    """Test whether ``mu`` satisfies the necessary conditions of a potential
    minimiser: directional moment ``>= PFP`` everywhere, ``= PFP`` on the
    support."""
    value = pfp(mu, p)
    if p == 2:
        w, V = np.linalg.eigh(frame_operator(mu))
        lo, x_lo = float(w[0]), V[:, 0]
        method, used_grid = "eigen", None
    else:
        lo, x_lo, _, _ = sphere_extremes(mu, p, grid)
        method, used_grid = "grid", int(grid)
    on_support = directional_moments(mu, mu.atoms, p)
    min_gap = float(lo) - value
    support_gap = float(np.max(np.abs(on_support - value)))
    return PotentialReport(value, min_gap, support_gap, min_gap < -tol, float(p),
                           tol, method, used_grid, np.asarray(x_lo))
