"""Finitely supported probability measures on R^n.

A :class:`DiscreteMeasure` is a list of atoms with nonnegative weights
summing to one. Atoms are never merged automatically; use
:func:`canonicalize` to compare measures up to permutation and merging of
coincident atoms.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

WEIGHT_TOL = 1e-12
UNIT_TOL = 1e-10


class MeasureError(ValueError):
    """Invalid measure data or incompatible measures."""


def fsum_rows(values):
    """Compensated column sums of a 2-D array, summing over axis 0."""
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        return math.fsum(values)
    flat = values.reshape(values.shape[0], -1)
    out = np.array([math.fsum(flat[:, j]) for j in range(flat.shape[1])])
    return out.reshape(values.shape[1:])


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Probability measure ``sum_i w_i delta_{v_i}`` on R^dim.

    Attributes
    ----------
    atoms : ndarray, shape (m, dim)
        Support points, one per row. Duplicates are allowed.
    weights : ndarray, shape (m,)
        Nonnegative weights summing to one within ``WEIGHT_TOL``.
    """

    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        atoms = np.array(self.atoms, dtype=float)
        weights = np.array(self.weights, dtype=float).reshape(-1)
        if atoms.ndim != 2:
            raise MeasureError(f"atoms must be a 2-D array, got shape {atoms.shape}")
        if atoms.shape[0] == 0:
            raise MeasureError("a measure needs at least one atom")
        if atoms.shape[0] != weights.shape[0]:
            raise MeasureError(
                f"{atoms.shape[0]} atoms but {weights.shape[0]} weights"
            )
        if not (np.all(np.isfinite(atoms)) and np.all(np.isfinite(weights))):
            raise MeasureError("atoms and weights must be finite")
        if np.any(weights < 0):
            raise MeasureError("weights must be nonnegative")
        total = math.fsum(weights)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise MeasureError(f"weights sum to {total!r}, expected 1")
        atoms.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    @property
    def dim(self):
        return self.atoms.shape[1]

    @property
    def size(self):
        return self.atoms.shape[0]

    def __repr__(self):
        return f"DiscreteMeasure(dim={self.dim}, size={self.size})"

    def to_dict(self):
        return {
            "dim": int(self.dim),
            "atoms": self.atoms.tolist(),
            "weights": self.weights.tolist(),
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def new_discrete(dim, atoms, weights, renormalize=False):
    """Build a validated measure.

    Parameters
    ----------
    dim : int
        Ambient dimension.
    atoms : array-like, shape (m, dim)
        Support points. A flat list is accepted when ``dim == 1``.
    weights : array-like, shape (m,)
        Nonnegative weights.
    renormalize : bool, default=False
        Divide the weights by their sum instead of requiring it to be one.

    Raises
    ------
    MeasureError
        On dimension mismatch, negative weights, zero total mass, or (without
        ``renormalize``) weights that do not sum to one.
    """
    dim = int(dim)
    if dim < 1:
        raise MeasureError("dim must be a positive integer")
    atoms = np.asarray(atoms, dtype=float)
    if atoms.ndim == 1 and dim == 1:
        atoms = atoms.reshape(-1, 1)
    if atoms.ndim != 2 or atoms.shape[1] != dim:
        raise MeasureError(f"atoms of shape {atoms.shape} do not live in R^{dim}")
    weights = np.asarray(weights, dtype=float).reshape(-1)
    if np.any(weights < 0):
        raise MeasureError("weights must be nonnegative")
    if renormalize:
        total = math.fsum(weights)
        if not total > 0:
            raise MeasureError("total mass must be positive")
        weights = weights / total
    return DiscreteMeasure(atoms, weights)


def dirac(point):
    """Point mass at ``point``."""
    point = np.atleast_1d(np.asarray(point, dtype=float))
    return DiscreteMeasure(point.reshape(1, -1), [1.0])


def from_dict(data):
    """Inverse of :meth:`DiscreteMeasure.to_dict`."""
    try:
        return new_discrete(data["dim"], data["atoms"], data["weights"])
    except (KeyError, TypeError) as exc:
        raise MeasureError(f"malformed measure object: {exc}") from exc


def from_json(text):
    return from_dict(json.loads(text))


def check_unit(x, dim=None):
    """Return ``x`` as a float vector, raising unless it has norm one."""
    x = np.atleast_1d(np.asarray(x, dtype=float)).reshape(-1)
    if dim is not None and x.shape[0] != dim:
        raise MeasureError(f"direction has length {x.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(x)):
        raise MeasureError("direction must be finite")
    norm = math.sqrt(math.fsum(x * x))
    if abs(norm - 1.0) > UNIT_TOL:
        raise MeasureError(f"direction has norm {norm!r}, expected a unit vector")
    return x


def push_forward_linear(mu, T):
    """Image of ``mu`` under ``v -> T v``; weights are unchanged."""
    T = np.asarray(T, dtype=float)
    if T.ndim == 0 and mu.dim == 1:
        T = T.reshape(1, 1)
    if T.ndim != 2 or T.shape[1] != mu.dim:
        raise MeasureError(f"matrix of shape {T.shape} cannot act on R^{mu.dim}")
    return DiscreteMeasure(mu.atoms @ T.T, mu.weights)


def push_forward_map(mu, images):
    """Replace atom ``i`` by ``images[i]``.

    ``images`` may live in a different dimension than ``mu``; one row per
    atom is required.
    """
    images = np.asarray(images, dtype=float)
    if images.ndim == 1:
        if mu.dim == 1 and images.shape[0] == mu.size:
            images = images.reshape(-1, 1)
        else:
            images = images.reshape(1, -1)
    if images.ndim != 2 or images.shape[0] != mu.size:
        raise MeasureError(
            f"need one image per atom ({mu.size}), got shape {images.shape}"
        )
    return DiscreteMeasure(images, mu.weights)


def project_hyperplane(mu, x):
    """Push ``mu`` forward by the orthogonal projection onto ``x``-perp."""
    x = check_unit(x, mu.dim)
    coeff = mu.atoms @ x
    return DiscreteMeasure(mu.atoms - np.outer(coeff, x), mu.weights)


def project_line(mu, x):
    """One-dimensional measure of the coordinates ``<v, x>``."""
    x = check_unit(x, mu.dim)
    return DiscreteMeasure((mu.atoms @ x).reshape(-1, 1), mu.weights)


def mean(mu):
    return fsum_rows(mu.weights[:, None] * mu.atoms)


def center(mu):
    return DiscreteMeasure(mu.atoms - mean(mu), mu.weights)


def moment(mu, p=2):
    """``M_p(mu) = sum_i w_i |v_i|^p`` for ``p >= 1``."""
    if not p >= 1:
        raise MeasureError("moment order must be >= 1")
    norms = np.sqrt(np.sum(mu.atoms ** 2, axis=1))
    return math.fsum(mu.weights * norms ** p)


def convex_combine(parts):
    """Mixture ``sum_i t_i mu_i`` of ``(t_i, mu_i)`` pairs.

    Atom lists are concatenated; atoms with zero mixture weight are kept so
    that indices stay aligned with the inputs.
    """
    parts = list(parts)
    if not parts:
        raise MeasureError("need at least one part")
    ts = np.array([float(t) for t, _ in parts])
    if np.any(ts < 0) or abs(math.fsum(ts) - 1.0) > WEIGHT_TOL:
        raise MeasureError("mixture weights must be a probability vector")
    dims = {m.dim for _, m in parts}
    if len(dims) != 1:
        raise MeasureError(f"cannot mix measures of dimensions {sorted(dims)}")
    atoms = np.vstack([m.atoms for _, m in parts])
    weights = np.concatenate([t * m.weights for t, m in parts])
    return DiscreteMeasure(atoms, weights)


def canonicalize(mu, atol=1e-12, drop_zero=True):
    """Sort atoms lexicographically and merge coincident ones.

    Atoms closer than ``atol`` (max-norm) to the first atom of a run of
    lexicographically sorted atoms are merged into it. Zero-weight atoms are
    dropped unless ``drop_zero`` is False.
    """
    order = np.lexsort(mu.atoms.T[::-1])
    atoms = mu.atoms[order]
    weights = mu.weights[order]
    merged_atoms = []
    merged_weights = []
    for a, w in zip(atoms, weights):
        for k, b in enumerate(merged_atoms):
            if np.max(np.abs(a - b)) <= atol:
                merged_weights[k].append(w)
                break
        else:
            merged_atoms.append(a)
            merged_weights.append([w])
    w_out = np.array([math.fsum(ws) for ws in merged_weights])
    a_out = np.array(merged_atoms)
    if drop_zero and np.any(w_out > 0):
        keep = w_out > 0
        a_out, w_out = a_out[keep], w_out[keep]
    return DiscreteMeasure(a_out, w_out)


def measures_close(mu, nu, atol=1e-9, wtol=1e-9):
    """Equality up to permutation and merging of coincident atoms."""
    if mu.dim != nu.dim:
        return False
    a = canonicalize(mu, atol=atol)
    b = canonicalize(nu, atol=atol)
    if a.size != b.size:
        return False
    return bool(
        np.allclose(a.atoms, b.atoms, rtol=0, atol=atol)
        and np.allclose(a.weights, b.weights, rtol=0, atol=wtol)
    )
