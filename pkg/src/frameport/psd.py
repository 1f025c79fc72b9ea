"""Symmetric and positive semidefinite matrix calculus.

Matrices are plain ``(n, n)`` float arrays. Every root, inverse and
projection is a spectral function of one symmetric eigendecomposition,
:func:`psd_eigh`, whose rank decisions use the scale-aware threshold
``tol_psd = n * eps * max(1, lambda_max)``.
"""

import json

import numpy as np

EPS = np.finfo(float).eps
SYM_TOL = 1e-10


class NotPSDError(ValueError):
    """A matrix that must be positive semidefinite (or definite) is not."""


class ShapeError(ValueError):
    pass


def as_matrix(M, name="matrix"):
    M = np.asarray(M, dtype=float)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ShapeError(f"{name} has non-finite entries")
    return M


def as_symmetric(E, name="matrix"):
    """Validate near-symmetry and return ``(E + E^t) / 2``."""
    E = as_matrix(E, name)
    if E.shape[0] != E.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {E.shape}")
    scale = max(1.0, float(np.max(np.abs(E))) if E.size else 1.0)
    if np.max(np.abs(E - E.T), initial=0.0) > SYM_TOL * scale:
        raise ShapeError(f"{name} is not symmetric")
    return 0.5 * (E + E.T)


def tol_psd(eigenvalues):
    n = len(eigenvalues)
    lam_max = float(np.max(eigenvalues)) if n else 0.0
    return n * EPS * max(1.0, lam_max)


def psd_eigh(S, name="matrix"):
    """Eigendecomposition of a PSD matrix with nonincreasing eigenvalues.

    Negative eigenvalues within ``tol_psd`` are clamped to zero.

    Returns
    -------
    w : ndarray, shape (n,)
        Eigenvalues, largest first.
    V : ndarray, shape (n, n)
        Orthonormal eigenvectors as columns.

    Raises
    ------
    NotPSDError
        If an eigenvalue is below ``-tol_psd``.
    """
    S = as_symmetric(S, name)
    w, V = np.linalg.eigh(S)
    w, V = w[::-1], V[:, ::-1]
    tol = tol_psd(w)
    if w.size and w[-1] < -tol:
        raise NotPSDError(f"{name} has eigenvalue {w[-1]!r} < -{tol!r}")
    return np.clip(w, 0.0, None), V


def _spectral(w, V, f):
    return (V * f(w)) @ V.T


def _sym(M):
    return 0.5 * (M + M.T)


def _sqrt_clamped(M):
    # For intermediates that are PSD in exact arithmetic; roundoff negatives
    # are clamped rather than reported.
    w, V = np.linalg.eigh(_sym(M))
    return _spectral(np.clip(w, 0.0, None), V, np.sqrt)


def is_definite(S):
    w, _ = psd_eigh(S)
    return bool(w[-1] > tol_psd(w))


def sqrt_psd(S):
    """Principal square root of a PSD matrix."""
    w, V = psd_eigh(S)
    return _spectral(w, V, np.sqrt)


def _pinv_spectrum(w, power=1.0):
    tol = tol_psd(w)
    out = np.zeros_like(w)
    keep = w > tol
    out[keep] = w[keep] ** -power
    return out


def pinv_psd(S):
    """Moore-Penrose inverse: inverts ``S`` on its image, zero on its kernel."""
    w, V = psd_eigh(S)
    return _spectral(w, V, _pinv_spectrum)


def inv_sqrt_psd(S):
    """Pseudo-inverse of the square root of ``S``."""
    w, V = psd_eigh(S)
    return _spectral(w, V, lambda x: _pinv_spectrum(x, 0.5))


def image_projection(S):
    """Orthogonal projection onto the image of ``S``."""
    w, V = psd_eigh(S)
    tol = tol_psd(w)
    return _spectral(w, V, lambda x: (x > tol).astype(float))


def optimal_map(S, T):
    r"""Unique PSD solution ``A`` of ``A S A = T`` for definite ``S``.

    .. math::
        A = S^{-1/2} (S^{1/2} T S^{1/2})^{1/2} S^{-1/2}

    Pushing any measure with frame operator ``S`` forward by ``A`` gives the
    closest measure (in ``W_2``) with frame operator ``T``.

    Raises
    ------
    NotPSDError
        If ``S`` is not definite or ``T`` is not PSD.
    """
    w, V = psd_eigh(S, "S")
    if not w[-1] > tol_psd(w):
        raise NotPSDError("S must be positive definite")
    T = as_symmetric(T, "T")
    psd_eigh(T, "T")
    if T.shape != V.shape:
        raise ShapeError(f"S and T shapes differ: {V.shape} vs {T.shape}")
    root = _spectral(w, V, np.sqrt)
    inv_root = _spectral(w, V, lambda x: x ** -0.5)
    middle = _sqrt_clamped(root @ T @ root)
    return _sym(inv_root @ middle @ inv_root)


def congruence(S, M):
    """``M S M^t``."""
    S = as_symmetric(S, "S")
    M = as_matrix(M, "M")
    if M.shape[1] != S.shape[0]:
        raise ShapeError(f"cannot form M S M^t with M {M.shape} and S {S.shape}")
    return _sym(M @ S @ M.T)


def loewner_geq(A, B, tol=1e-9):
    """True iff ``A - B`` has smallest eigenvalue at least ``-tol``."""
    A = as_symmetric(A, "A")
    B = as_symmetric(B, "B")
    if A.shape != B.shape:
        raise ShapeError(f"shapes differ: {A.shape} vs {B.shape}")
    return bool(np.linalg.eigvalsh(A - B)[0] >= -tol)


def block_matrix(S, T, Psi):
    """Assemble ``[[S, Psi], [Psi^t, T]]``."""
    Psi = as_matrix(Psi, "Psi")
    return np.block([[S, Psi], [Psi.T, T]])


def _numerically_definite(w):
    # Schur complements amplify error by the condition number; only take that
    # route when the inverted block is comfortably invertible.
    return bool(w.size) and bool(w[-1] > 1e-8 * max(1.0, w[0]))


def block_coupling_psd(S, T, Psi, tol=1e-9):
    """Decide whether ``[[S, Psi], [Psi^t, T]]`` is PSD within ``tol``.

    Uses the Schur complement ``S - Psi T^{-1} Psi^t`` when ``T`` is definite,
    else ``T - Psi^t S^{-1} Psi`` when ``S`` is, and otherwise the eigenvalues
    of the assembled ``2n x 2n`` block.
    """
    S = as_symmetric(S, "S")
    T = as_symmetric(T, "T")
    wS, VS = psd_eigh(S, "S")
    wT, VT = psd_eigh(T, "T")
    Psi = as_matrix(Psi, "Psi")
    if Psi.shape != (VS.shape[0], VT.shape[0]):
        raise ShapeError(f"Psi has shape {Psi.shape}")
    if _numerically_definite(wT):
        schur = S - Psi @ _spectral(wT, VT, lambda x: 1.0 / x) @ Psi.T
    elif _numerically_definite(wS):
        schur = T - Psi.T @ _spectral(wS, VS, lambda x: 1.0 / x) @ Psi
    else:
        return block_psd_direct(S, T, Psi, tol)
    return bool(np.linalg.eigvalsh(_sym(schur))[0] >= -tol)


def block_psd_direct(S, T, Psi, tol=1e-9):
    """Same decision as :func:`block_coupling_psd` from the full block."""
    S = as_symmetric(S, "S")
    T = as_symmetric(T, "T")
    return bool(np.linalg.eigvalsh(block_matrix(S, T, Psi))[0] >= -tol)


def bures_squared(S, T):
    r"""Gelbrich trace expression, the squared distance between fibers.

    .. math::
        \operatorname{tr}(S + T - 2 (S^{1/2} T S^{1/2})^{1/2})

    Evaluated in the Procrustes form ``||S^{1/2} - U^t T^{1/2}||_F^2`` with
    ``U`` the polar factor of ``T^{1/2} S^{1/2}``, which is algebraically the
    same quantity but keeps full relative accuracy when ``S`` and ``T`` are
    close.
    """
    rS = sqrt_psd(S)
    rT = sqrt_psd(T)
    if rS.shape != rT.shape:
        raise ShapeError(f"shapes differ: {rS.shape} vs {rT.shape}")
    P, _, Qt = np.linalg.svd(rT @ rS)
    U = P @ Qt
    diff = rS - U.T @ rT
    return max(0.0, float(np.sum(diff * diff)))


def bures_distance(S, T):
    """The metric ``d_W(S, T) = sqrt(bures_squared(S, T))``."""
    return float(np.sqrt(bures_squared(S, T)))


def interpolate_map(A, t):
    """``(1 - t) I + t A`` for ``t`` in [0, 1]."""
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t={t} is outside [0, 1]")
    A = as_symmetric(A, "A")
    return (1.0 - t) * np.eye(A.shape[0]) + t * A


def matrix_to_dict(M):
    M = as_matrix(M)
    return {"dim": int(M.shape[0]), "rows": M.tolist()}


def matrix_from_dict(data):
    try:
        rows = np.asarray(data["rows"], dtype=float)
        dim = int(data["dim"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ShapeError(f"malformed matrix object: {exc}") from exc
    if rows.shape != (dim, dim):
        raise ShapeError(f"rows of shape {rows.shape} do not match dim={dim}")
    return as_matrix(rows)


def matrix_to_json(M, **kwargs):
    return json.dumps(matrix_to_dict(M), **kwargs)


def matrix_from_json(text):
    return matrix_from_dict(json.loads(text))
