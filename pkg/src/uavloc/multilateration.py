"""Multi-anchor baseline: linearized least squares and Gauss-Newton refinement."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometryError, NumericalError, ParameterError, ShapeError


@dataclass(frozen=True)
class AnchorSet:
    anchors: np.ndarray  # (I, 3)
    ranges: np.ndarray  # (I,)

    def __post_init__(self):
        anchors = np.asarray(self.anchors, dtype=float)
        ranges = np.asarray(self.ranges, dtype=float)
        if anchors.ndim != 2 or anchors.shape[1] != 3 or ranges.shape != (len(anchors),):
            raise ShapeError(f"anchors {anchors.shape} and ranges {ranges.shape} are inconsistent")
        if np.any(ranges < 0):
            raise ParameterError("ranges must be non-negative")
        object.__setattr__(self, "anchors", anchors)
        object.__setattr__(self, "ranges", ranges)


@dataclass(frozen=True)
class SolverConfig:
    max_iter: int = 50
    tol: float = 1e-10
    regularization: float = 0.0

    def __post_init__(self):
        if self.max_iter < 1 or self.tol <= 0 or self.regularization < 0:
            raise ParameterError("invalid solver configuration")


@dataclass(frozen=True)
class GaussNewtonResult:
    position: np.ndarray
    residual: float  # sum of squared range residuals
    iterations: int
    converged: bool


def build_system(anchor_set: AnchorSet) -> tuple[np.ndarray, np.ndarray]:
    """The ``S`` matrix and ``p`` vector, referenced to the last anchor.

    Rows are ``anchor_I - anchor_i`` and ``(g_i^2 - g_I^2) - (|a_i|^2 - |a_I|^2)``.
    Subtracting the sphere equations gives ``2 S x = p``.
    """
    a = anchor_set.anchors
    g = anchor_set.ranges
    ref, g_ref = a[-1], g[-1]
    S = ref - a[:-1]
    p = (g[:-1] ** 2 - g_ref ** 2) - (np.sum(a[:-1] ** 2, axis=1) - np.sum(ref ** 2))
    return S, p


def linear_solve(anchor_set: AnchorSet, fixed_z: float | None = None, regularization: float = 0.0) -> np.ndarray:
    """Least-squares position from the linearized sphere equations.

    With ``fixed_z`` the target altitude is known and only ``(x, y)`` is solved.
    """
    n_unknown = 2 if fixed_z is not None else 3
    if len(anchor_set.anchors) < n_unknown + 1:
        raise ParameterError(f"need at least {n_unknown + 1} anchors")
    S, p = build_system(anchor_set)
    A = 2.0 * S
    if fixed_z is not None:
        p = p - A[:, 2] * fixed_z
        A = A[:, :2]
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[-1] <= 1e-10 * max(sv[0], 1.0) and regularization == 0:
        raise DegenerateGeometryError("anchor geometry is rank deficient")
    AtA = A.T @ A + regularization * np.eye(A.shape[1])
    x = np.linalg.solve(AtA, A.T @ p)
    return np.append(x, fixed_z) if fixed_z is not None else x


def residuals(anchor_set: AnchorSet, position) -> np.ndarray:
    return np.linalg.norm(anchor_set.anchors - np.asarray(position, dtype=float), axis=1) - anchor_set.ranges


def jacobian(anchor_set: AnchorSet, position) -> np.ndarray:
    diff = np.asarray(position, dtype=float) - anchor_set.anchors
    dist = np.linalg.norm(diff, axis=1)
    # the range is not differentiable at its anchor; use the zero subgradient
    safe = np.where(dist > 0, dist, 1.0)
    return np.where(dist[:, None] > 0, diff / safe[:, None], 0.0)


def gauss_newton_refine(anchor_set: AnchorSet, init, cfg: SolverConfig = SolverConfig(),
                        fixed_z: float | None = None) -> GaussNewtonResult:
    """Gauss-Newton with optional damping and step halving.

    Each accepted step never increases the sum of squared residuals. Returns
    the best iterate; ``converged`` is False if ``max_iter`` ran out first.
    """
    r = np.asarray(init, dtype=float).copy()
    if r.shape != (3,) or not np.all(np.isfinite(r)):
        raise ParameterError("initial point must be a finite 3-vector")
    if fixed_z is not None:
        r[2] = fixed_z
    cols = slice(0, 2) if fixed_z is not None else slice(0, 3)
    f = residuals(anchor_set, r)
    cost = float(f @ f)
    for it in range(1, cfg.max_iter + 1):
        J = jacobian(anchor_set, r)[:, cols]
        JtJ = J.T @ J + cfg.regularization * np.eye(J.shape[1])
        if np.linalg.cond(JtJ) > 1e14:
            raise NumericalError("normal matrix is numerically singular")
        step = np.linalg.solve(JtJ, J.T @ f)
        t = 1.0
        while True:
            cand = r.copy()
            cand[cols] -= t * step
            f_cand = residuals(anchor_set, cand)
            cost_cand = float(f_cand @ f_cand)
            if cost_cand <= cost or t < 1e-8:
                break
            t *= 0.5
        if cost_cand > cost:
            return GaussNewtonResult(r, cost, it, True)
        moved = t * np.linalg.norm(step)
        r, f, cost = cand, f_cand, cost_cand
        if moved < cfg.tol:
            return GaussNewtonResult(r, cost, it, True)
    return GaussNewtonResult(r, cost, cfg.max_iter, False)


def locate(anchor_set: AnchorSet, cfg: SolverConfig = SolverConfig(), fixed_z: float | None = None) -> GaussNewtonResult:
    """Linear initialization followed by Gauss-Newton refinement."""
    x0 = linear_solve(anchor_set, fixed_z=fixed_z, regularization=cfg.regularization)
    return gauss_newton_refine(anchor_set, x0, cfg, fixed_z=fixed_z)
