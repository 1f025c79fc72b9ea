"""Transport duals and M-duals.

A coupling ``gamma`` of ``mu`` and ``nu`` makes the pair an ``M``-dual when
its cross moment ``Psi = sum mass_i x_i y_i^t`` equals ``M``; ``M = I`` gives
the transport duals. Every check here recomputes ``Psi`` and the block
frame operator from the coupling itself.
"""

from dataclasses import dataclass

import numpy as np

from . import psd
from .frames import (
    NotAFrameError,
    _require_frame,
    directional_moments,
    frame_operator,
    frame_report,
)
from .measure import DiscreteMeasure, MeasureError, dirac, mean
from .ot import Coupling, coupling_frame_operator, mix_couplings, pushforward_coupling
from .sphere import probe_directions

DUAL_TOL = 1e-8


class DualError(ValueError):
    pass


@dataclass(frozen=True)
class DualCertificate:
    """Evidence that a coupling realises an ``M``-dual pair.

    ``valid`` is derived from ``psi_residual`` and ``psd_ok``, both computed
    from the coupling, never supplied by the caller.
    """

    coupling: Coupling
    M: np.ndarray
    psi: np.ndarray
    psi_residual: float
    psd_ok: bool
    product_min: float
    probe_set: str
    tol: float

    @property
    def valid(self):
        return bool(self.psi_residual <= self.tol and self.psd_ok)

    def to_dict(self):
        return {
            "valid": self.valid,
            "M": self.M.tolist(),
            "psi": self.psi.tolist(),
            "psi_residual": self.psi_residual,
            "psd_ok": self.psd_ok,
            "product_min": self.product_min,
            "probe_set": self.probe_set,
            "tol": self.tol,
        }


def _product_min(S_left, S_right, dim):
    probes, probe_id = probe_directions(dim)
    a = np.einsum("ij,jk,ik->i", probes, S_left, probes)
    b = np.einsum("ij,jk,ik->i", probes, S_right, probes)
    return float(np.min(np.sqrt(np.clip(a, 0, None) * np.clip(b, 0, None)))), probe_id


def is_m_dual(gamma, M=None, tol=DUAL_TOL):
    """Certificate for ``gamma`` as an ``M``-dual coupling (default ``M = I``).

    ``product_min`` is the minimum over the fixed probe set of the product of
    the two marginals' directional 2-Wasserstein distances.
    """
    if gamma.left_dim != gamma.right_dim:
        raise MeasureError("dual couplings need equal left and right dimensions")
    n = gamma.left_dim
    M = np.eye(n) if M is None else psd.as_matrix(M, "M")
    if M.shape != (n, n):
        raise MeasureError(f"M has shape {M.shape}, expected {(n, n)}")
    _, S_left, Psi, S_right = coupling_frame_operator(gamma)
    residual = float(np.linalg.norm(Psi - M))
    psd_ok = psd.block_coupling_psd(S_left, S_right, Psi, tol)
    product_min, probe_id = _product_min(S_left, S_right, n)
    return DualCertificate(gamma, M, Psi, residual, psd_ok, product_min, probe_id, tol)


def dual_feasibility(S_mu, S_nu, tol=DUAL_TOL):
    """Necessary condition ``S_nu >= S_mu^{-1}`` for a transport dual.

    Returns
    -------
    loewner_ok : bool
        Loewner comparison of ``S_nu`` with ``S_mu^{-1}``.
    eigenvalues : ndarray
        Eigenvalues of ``S_nu^{1/2} S_mu S_nu^{1/2}``, largest first; all are
        at least one exactly when the Loewner condition holds.
    """
    S_mu = psd.as_symmetric(S_mu, "S_mu")
    if not psd.is_definite(S_mu):
        raise NotAFrameError("S_mu must be definite")
    loewner_ok = psd.loewner_geq(S_nu, psd.pinv_psd(S_mu), tol)
    r = psd.sqrt_psd(S_nu)
    eig = np.linalg.eigvalsh(0.5 * (r @ S_mu @ r + (r @ S_mu @ r).T))[::-1]
    return loewner_ok, eig


def canonical_dual_coupling(mu):
    """``(id x S_mu^{-1})_# mu``."""
    S = frame_operator(mu)
    _require_frame(S)
    return pushforward_coupling(mu, mu.atoms @ psd.pinv_psd(S))


def dual_map_images(mu, h):
    r"""Images ``H(v_i)`` of the push-forward dual map

    .. math::
        H(z) = S^{-1} z + h(z) - \sum_j w_j \langle S^{-1} z, v_j \rangle h_j

    for an atom-indexed perturbation table ``h`` (one row per atom).
    """
    S = frame_operator(mu)
    _require_frame(S)
    h = np.asarray(h, dtype=float)
    if h.ndim == 0 or (h.ndim == 1 and h.shape[0] == mu.dim):
        h = np.broadcast_to(h, mu.atoms.shape)
    elif h.ndim == 1 and mu.dim == 1:
        h = h.reshape(-1, 1)
    if h.shape != mu.atoms.shape:
        raise MeasureError(f"need an h-value per atom, got shape {h.shape}")
    Z = mu.atoms @ psd.pinv_psd(S)
    return Z + h - (Z @ mu.atoms.T) @ (mu.weights[:, None] * h)


def pushforward_dual(mu, h):
    """Transport dual ``H_# mu`` and its coupling ``(id x H)_# mu``."""
    gamma = pushforward_coupling(mu, dual_map_images(mu, h))
    return gamma.right_marginal(), gamma


def m_dual_from_transport_dual(gamma, M, tol=DUAL_TOL):
    """Map a transport-dual coupling to an ``M``-dual via ``id x M^t``."""
    M = psd.as_matrix(M, "M")
    if M.shape[0] != M.shape[1] or abs(np.linalg.det(M)) < 1e-12 * max(
        1.0, np.linalg.norm(M) ** M.shape[0]
    ):
        raise DualError("M must be square and invertible")
    if not is_m_dual(gamma, None, tol).valid:
        raise DualError("input coupling is not a transport dual")
    return gamma.map_right(M.T)


def transport_dual_from_m_dual(gamma, M):
    """Inverse of :func:`m_dual_from_transport_dual`: push by ``id x M^{-t}``."""
    M = psd.as_matrix(M, "M")
    return gamma.map_right(np.linalg.inv(M).T)


def convex_combine_duals(parts, M=None, tol=DUAL_TOL):
    """Mixture of ``M``-dual couplings; stays an ``M``-dual."""
    parts = list(parts)
    if not parts:
        raise DualError("need at least one part")
    n = parts[0][1].left_dim
    M = np.eye(n) if M is None else psd.as_matrix(M, "M")
    for _, g in parts:
        if not is_m_dual(g, M, tol).valid:
            raise DualError("every part must be an M-dual coupling for the same M")
    return mix_couplings(parts)


def finite_mixture_dual(parts, M=None, tol=DUAL_TOL):
    """Mixture of arbitrary couplings and its ``M``-dual certificate.

    The parts need not be ``M``-duals individually; the mixture is one
    exactly when the mass-weighted average of their cross moments is ``M``.

    Returns
    -------
    (mu, nu, certificate)
    """
    gamma = mix_couplings(parts)
    cert = is_m_dual(gamma, M, tol)
    return gamma.left_marginal(), gamma.right_marginal(), cert


def delta_dual_family(a, lam):
    """Two-atom transport dual of ``delta_a`` with second moment ``lam``.

    ``((a^2 lam - 1) / (a^2 lam)) delta_0 + (1 / (a^2 lam)) delta_{a lam}``,
    which has mean ``1/a``. A vanishing weight at the origin is dropped.
    """
    a, lam = float(a), float(lam)
    if a == 0:
        raise DualError("a must be nonzero")
    s = a * a * lam
    if s < 1.0 - 1e-12:
        raise DualError(f"lambda={lam} is below 1/a^2={1.0 / (a * a)}")
    w_far = 1.0 / s if s > 1.0 else 1.0
    w_zero = (s - 1.0) / s if s > 1.0 else 0.0
    if w_zero == 0.0:
        return dirac([a * lam])
    return DiscreteMeasure([[0.0], [a * lam]], [w_zero, w_far])


def point_mass_dual_coupling(a, nu):
    """The only coupling of ``delta_a`` and a 1-D measure ``nu``."""
    if nu.dim != 1:
        raise MeasureError("point-mass duals are one-dimensional")
    return Coupling(np.full((nu.size, 1), float(a)), nu.atoms, nu.weights)


def is_point_mass_dual(a, nu, tol=1e-9):
    """Whether ``nu`` is a transport dual of ``delta_a``: its mean is ``1/a``."""
    return bool(abs(float(mean(nu)[0]) - 1.0 / float(a)) <= tol)


@dataclass(frozen=True)
class DualDistanceReport:
    """Margins of the canonical-dual optimality inequalities.

    All margins are nonnegative up to tolerance for a valid transport dual;
    they vanish for the canonical dual.

    ``cost_margin``: coupling cost minus ``tr(S + S^{-1} - 2I)``.
    ``projection_margin``: min over probes of ``W_2(nu, .) - W_2(mu_c, .)``.
    ``product_margin``: min over probes of ``W_2(mu, .) W_2(nu, .)`` minus one.
    ``eigen_min``: smallest eigenvalue of ``S_nu^{1/2} S_mu S_nu^{1/2}``.
    """

    cost_margin: float
    projection_margin: float
    product_margin: float
    eigen_min: float
    probe_set: str

    def to_dict(self):
        return {
            "cost_margin": self.cost_margin,
            "projection_margin": self.projection_margin,
            "product_margin": self.product_margin,
            "eigen_min": self.eigen_min,
            "probe_set": self.probe_set,
        }


def dual_distance_check(mu, nu, gamma, tol=DUAL_TOL):
    """Evaluate the canonical-dual inequalities for a transport-dual coupling.

    Raises
    ------
    DualError
        If ``gamma`` is not a transport dual or its marginals are not
        ``mu`` and ``nu`` (compared through their frame operators).
    """
    cert = is_m_dual(gamma, None, tol)
    if not cert.valid:
        raise DualError("coupling is not a transport dual")
    S = frame_operator(mu)
    _require_frame(S)
    S_nu = frame_operator(nu)
    _, S_left, _, S_right = coupling_frame_operator(gamma)
    scale = max(1.0, float(np.max(np.abs(S))), float(np.max(np.abs(S_nu))))
    if (np.max(np.abs(S_left - S)) > 1e-9 * scale
            or np.max(np.abs(S_right - S_nu)) > 1e-9 * scale):
        raise DualError("coupling marginals do not match mu and nu")
    S_inv = psd.pinv_psd(S)
    n = mu.dim
    cost_margin = gamma.cost(2) - float(np.trace(S + S_inv) - 2 * n)
    probes, probe_id = probe_directions(n)
    d_nu = np.sqrt(directional_moments(nu, probes, 2))
    d_mu = np.sqrt(directional_moments(mu, probes, 2))
    d_c = np.sqrt(np.clip(np.einsum("ij,jk,ik->i", probes, S_inv, probes), 0, None))
    _, eig = dual_feasibility(S, S_nu, tol)
    return DualDistanceReport(
        cost_margin,
        float(np.min(d_nu - d_c)),
        float(np.min(d_mu * d_nu)) - 1.0,
        float(eig[-1]),
        probe_id,
    )


def marginals_are_frames(gamma, p=2):
    """Frame flags of both marginals of a coupling."""
    return (
        frame_report(gamma.left_marginal(), p).is_frame,
        frame_report(gamma.right_marginal(), p).is_frame,
    )


def diverging_duals(mu, alphas):
    """Transport duals ``x -> x / lam + alpha`` of a centred 1-D frame.

    Their means equal ``alpha``, so an unbounded ``alphas`` sequence gives a
    family of duals leaving every ``W_2`` ball.
    """
    if mu.dim != 1:
        raise MeasureError("this family is one-dimensional")
    if abs(float(mean(mu)[0])) > 1e-12:
        raise MeasureError("mu must be centred")
    out = []
    for alpha in alphas:
        nu, _ = pushforward_dual(mu, np.full((mu.size, 1), float(alpha)))
        out.append(nu)
    return out


def scalar_dual_coupling(a, lam):
    """Explicit two-pair coupling of ``delta_a`` and :func:`delta_dual_family`."""
    return point_mass_dual_coupling(a, delta_dual_family(a, lam))


def split_mass_dual(a, split):
    """Non-push-forward dual of ``delta_a`` splitting mass ``split`` in (0, 1).

    ``split * delta_{1/(split a)} + (1 - split) * delta_0``.
    """
    split = float(split)
    if not 0.0 < split < 1.0:
        raise DualError("split must lie in (0, 1)")
    nu = DiscreteMeasure([[1.0 / (split * a)], [0.0]], [split, 1.0 - split])
    return nu, point_mass_dual_coupling(a, nu)


__all__ = [
    "DualCertificate",
    "DualDistanceReport",
    "DualError",
    "canonical_dual_coupling",
    "convex_combine_duals",
    "delta_dual_family",
    "diverging_duals",
    "dual_distance_check",
    "dual_feasibility",
    "dual_map_images",
    "finite_mixture_dual",
    "is_m_dual",
    "is_point_mass_dual",
    "m_dual_from_transport_dual",
    "marginals_are_frames",
    "point_mass_dual_coupling",
    "pushforward_dual",
    "scalar_dual_coupling",
    "split_mass_dual",
    "transport_dual_from_m_dual",
]
