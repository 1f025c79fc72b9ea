"""Exact optimal transport between discrete measures.

The solver is a primal transportation simplex on the spanning-tree basis of
the bipartite transport graph. It is meant as a certifying oracle for the
closed-form distances elsewhere in the package, not as a fast OT engine:
problem size is capped at ``m * k <= MAX_CELLS``.
"""

import json
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .measure import DiscreteMeasure, MeasureError, dirac, fsum_rows

MAX_CELLS = 40_000
# Consecutive degenerate pivots tolerated under the steepest-edge rule before
# switching to Bland's rule for the rest of the solve.
DEGENERATE_STREAK = 50


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class Coupling:
    """Finitely supported probability on ``R^n x R^n'``.

    Pair ``i`` puts mass ``masses[i]`` on ``(left[i], right[i])``.
    """

    left: np.ndarray
    right: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        left = np.array(self.left, dtype=float)
        right = np.array(self.right, dtype=float)
        masses = np.array(self.masses, dtype=float).reshape(-1)
        if left.ndim == 1:
            left = left.reshape(-1, 1)
        if right.ndim == 1:
            right = right.reshape(-1, 1)
        if not left.shape[0] == right.shape[0] == masses.shape[0]:
            raise MeasureError("left, right and masses must have equal length")
        # Marginals validate mass, sign and finiteness.
        left_marginal = DiscreteMeasure(left, masses)
        right_marginal = DiscreteMeasure(right, masses)
        object.__setattr__(self, "left", left_marginal.atoms)
        object.__setattr__(self, "right", right_marginal.atoms)
        object.__setattr__(self, "masses", left_marginal.weights)
        object.__setattr__(self, "_left_marginal", left_marginal)
        object.__setattr__(self, "_right_marginal", right_marginal)

    @property
    def left_dim(self):
        return self.left.shape[1]

    @property
    def right_dim(self):
        return self.right.shape[1]

    @property
    def size(self):
        return self.masses.shape[0]

    def left_marginal(self):
        return self._left_marginal

    def right_marginal(self):
        return self._right_marginal

    def __repr__(self):
        return (
            f"Coupling(left_dim={self.left_dim}, right_dim={self.right_dim}, "
            f"size={self.size})"
        )

    def cost(self, p=2):
        """``sum_i mass_i |x_i - y_i|^p``."""
        if self.left_dim != self.right_dim:
            raise MeasureError("cost needs equal left and right dimensions")
        d = np.sqrt(np.sum((self.left - self.right) ** 2, axis=1))
        return math.fsum(self.masses * d ** p)

    def map_right(self, L):
        """Push forward by ``id x L``: right atoms ``y -> L y``."""
        L = np.atleast_2d(np.asarray(L, dtype=float))
        return Coupling(self.left, self.right @ L.T, self.masses)

    def map_left(self, L):
        L = np.atleast_2d(np.asarray(L, dtype=float))
        return Coupling(self.left @ L.T, self.right, self.masses)

    def to_dict(self):
        if self.left_dim != self.right_dim:
            raise MeasureError("JSON coupling format needs equal dimensions")
        return {
            "dim": int(self.left_dim),
            "pairs": [
                {"x": x.tolist(), "y": y.tolist(), "mass": float(w)}
                for x, y, w in zip(self.left, self.right, self.masses)
            ],
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def coupling_from_dict(data):
    try:
        dim = int(data["dim"])
        pairs = data["pairs"]
        left = np.array([p["x"] for p in pairs], dtype=float).reshape(-1, dim)
        right = np.array([p["y"] for p in pairs], dtype=float).reshape(-1, dim)
        masses = [p["mass"] for p in pairs]
    except (KeyError, TypeError, ValueError) as exc:
        raise MeasureError(f"malformed coupling object: {exc}") from exc
    return Coupling(left, right, masses)


def coupling_from_json(text):
    return coupling_from_dict(json.loads(text))


@dataclass(frozen=True)
class TransportPlan:
    """Optimal coupling with its cost ``sum mass |x - y|^p``.

    ``min_reduced_cost`` is the smallest reduced cost at termination; it is
    the dual-feasibility certificate of optimality (nonnegative up to
    roundoff).
    """

    coupling: Coupling
    cost: float
    p: float
    flow: np.ndarray
    min_reduced_cost: float
    pivots: int

    @property
    def distance(self):
        return self.cost ** (1.0 / self.p)


def cost_matrix(X, Y, p=2):
    diff = X[:, None, :] - Y[None, :, :]
    d = np.sqrt(np.sum(diff * diff, axis=2))
    if p == 2:
        return d * d
    return d ** p


def _northwest_corner(a, b):
    m, k = len(a), len(b)
    a = a.copy()
    b = b.copy()
    flow = np.zeros((m, k))
    basis = []
    i = j = 0
    while True:
        x = min(a[i], b[j])
        flow[i, j] = x
        basis.append((i, j))
        a[i] -= x
        b[j] -= x
        if i == m - 1 and j == k - 1:
            break
        if j == k - 1 or (i < m - 1 and a[i] <= b[j]):
            i += 1
        else:
            j += 1
    return flow, basis


class _Tree:
    """Spanning tree on rows ``0..m-1`` and columns ``m..m+k-1``."""

    def __init__(self, m, k, basis):
        self.m, self.k = m, k
        self.adj = [set() for _ in range(m + k)]
        for i, j in basis:
            self.add(i, j)

    def add(self, i, j):
        self.adj[i].add(self.m + j)
        self.adj[self.m + j].add(i)

    def remove(self, i, j):
        self.adj[i].discard(self.m + j)
        self.adj[self.m + j].discard(i)

    def potentials(self, C):
        m = self.m
        u = np.zeros(m)
        v = np.zeros(self.k)
        seen = [False] * (m + self.k)
        seen[0] = True
        queue = deque([0])
        while queue:
            node = queue.popleft()
            for nb in sorted(self.adj[node]):
                if seen[nb]:
                    continue
                seen[nb] = True
                if node < m:
                    v[nb - m] = C[node, nb - m] - u[node]
                else:
                    u[nb] = C[nb, node - m] - v[node - m]
                queue.append(nb)
        if not all(seen):
            raise SolverError("basis is not a spanning tree")
        return u, v

    def path(self, start, goal):
        parent = {start: None}
        queue = deque([start])
        while queue:
            node = queue.popleft()
            if node == goal:
                break
            for nb in sorted(self.adj[node]):
                if nb not in parent:
                    parent[nb] = node
                    queue.append(nb)
        nodes = [goal]
        while parent[nodes[-1]] is not None:
            nodes.append(parent[nodes[-1]])
        return nodes[::-1]


def _transport_simplex(a, b, C, max_pivots=None):
    m, k = C.shape
    flow, basis = _northwest_corner(a, b)
    tree = _Tree(m, k, basis)
    scale = max(1.0, float(np.max(np.abs(C))))
    tol = 1e-13 * scale
    if max_pivots is None:
        max_pivots = 50 * (m + k) ** 2 + 1000
    bland = False
    streak = 0
    pivots = 0
    while True:
        u, v = tree.potentials(C)
        reduced = C - u[:, None] - v[None, :]
        negative = reduced < -tol
        if not negative.any():
            return flow, float(reduced.min()), pivots
        if pivots >= max_pivots:
            raise SolverError(f"no convergence after {pivots} pivots")
        if bland:
            enter = int(np.flatnonzero(negative.ravel())[0])
        else:
            # argmin returns the first (row-major) index among ties
            enter = int(np.argmin(reduced))
        p, q = divmod(enter, k)
        # Cycle: entering cell (+), then alternate along the tree path from
        # column q back to row p.
        nodes = tree.path(m + q, p)
        cells = []
        for s in range(len(nodes) - 1):
            x, y = nodes[s], nodes[s + 1]
            cells.append((y, x - m) if x >= m else (x, y - m))
        minus = cells[0::2]
        plus = cells[1::2]
        theta = min(flow[c] for c in minus)
        leave = min(c for c in minus if flow[c] == theta)
        for c in minus:
            flow[c] -= theta
        for c in plus:
            flow[c] += theta
        flow[p, q] += theta
        flow[leave] = 0.0
        tree.remove(*leave)
        tree.add(p, q)
        pivots += 1
        streak = streak + 1 if theta == 0 else 0
        if streak > DEGENERATE_STREAK:
            bland = True


def solve_exact(mu, nu, p=2):
    """Optimal transport plan between ``mu`` and ``nu`` for cost ``|x-y|^p``.

    Parameters
    ----------
    mu, nu : DiscreteMeasure
        Measures of equal dimension with ``mu.size * nu.size <= MAX_CELLS``.
    p : float, default=2
        Cost exponent, ``p >= 1``.

    Returns
    -------
    TransportPlan
        The coupling keeps only pairs of positive mass, ordered row-major in
        the input atom order. The output is deterministic for fixed inputs.
    """
    if mu.dim != nu.dim:
        raise MeasureError(f"dimension mismatch: {mu.dim} vs {nu.dim}")
    if not p >= 1:
        raise ValueError("p must be >= 1")
    m, k = mu.size, nu.size
    if m * k > MAX_CELLS:
        raise ValueError(f"problem size {m}x{k} exceeds {MAX_CELLS} cells")
    C = cost_matrix(mu.atoms, nu.atoms, p)
    flow, min_rc, pivots = _transport_simplex(mu.weights, nu.weights, C)
    flow = np.clip(flow, 0.0, None)
    rows, cols = np.nonzero(flow > 0)
    if rows.size == 0:
        raise SolverError("empty plan")
    masses = flow[rows, cols]
    masses = masses / math.fsum(masses)
    coupling = Coupling(mu.atoms[rows], nu.atoms[cols], masses)
    cost = math.fsum(masses * C[rows, cols])
    return TransportPlan(coupling, cost, float(p), flow, min_rc, pivots)


def wasserstein_p(mu, nu, p=2):
    """``W_p(mu, nu) = cost ** (1/p)`` of the exact plan."""
    return solve_exact(mu, nu, p).distance


def coupling_frame_operator(gamma):
    """Frame operator of a coupling on ``R^{2n}`` and its blocks.

    Returns
    -------
    S : ndarray, shape (2n, 2n)
        ``[[S_left, Psi], [Psi^t, S_right]]``.
    S_left, Psi, S_right : ndarray, shape (n, n)
        ``Psi = sum_i mass_i x_i y_i^t``.
    """
    if gamma.left_dim != gamma.right_dim:
        raise MeasureError("coupling frame operator needs equal dimensions")
    w = gamma.masses[:, None, None]
    X, Y = gamma.left, gamma.right
    S_left = fsum_rows(w * X[:, :, None] * X[:, None, :])
    S_right = fsum_rows(w * Y[:, :, None] * Y[:, None, :])
    Psi = fsum_rows(w * X[:, :, None] * Y[:, None, :])
    S = np.block([[S_left, Psi], [Psi.T, S_right]])
    return S, S_left, Psi, S_right


def pushforward_coupling(mu, images):
    """Coupling ``(id x h)_# mu`` for the atom-indexed map ``v_i -> images[i]``."""
    images = np.asarray(images, dtype=float)
    if images.ndim == 1:
        images = images.reshape(mu.size, -1) if images.size == mu.size else images
    if images.ndim != 2 or images.shape[0] != mu.size:
        raise MeasureError(
            f"need one image per atom ({mu.size}), got shape {images.shape}"
        )
    return Coupling(mu.atoms, images, mu.weights)


def diagonal_coupling(mu):
    return Coupling(mu.atoms, mu.atoms, mu.weights)


def product_coupling(mu, nu):
    """Independent coupling ``mu x nu``."""
    left = np.repeat(mu.atoms, nu.size, axis=0)
    right = np.tile(nu.atoms, (mu.size, 1))
    masses = np.outer(mu.weights, nu.weights).ravel()
    return Coupling(left, right, masses)


def mix_couplings(parts):
    """Mixture ``sum_i t_i gamma_i`` of ``(t_i, gamma_i)`` pairs."""
    parts = list(parts)
    if not parts:
        raise MeasureError("need at least one part")
    ts = np.array([float(t) for t, _ in parts])
    if np.any(ts < 0) or abs(math.fsum(ts) - 1.0) > 1e-12:
        raise MeasureError("mixture weights must be a probability vector")
    dims = {(g.left_dim, g.right_dim) for _, g in parts}
    if len(dims) != 1:
        raise MeasureError("cannot mix couplings of different dimensions")
    return Coupling(
        np.vstack([g.left for _, g in parts]),
        np.vstack([g.right for _, g in parts]),
        np.concatenate([t * g.masses for t, g in parts]),
    )


def distance_to_origin(mu, p=2):
    """``W_p(mu, delta_0)``; every plan to a point mass is the same."""
    return wasserstein_p(mu, dirac(np.zeros(mu.dim)), p)
