"""Single-anchor pseudo-trilateration.

A UAV visiting spots ``s_1..s_N`` measures one range per spot. Each range
confines the ground target to a circle (the range sphere cut by the ground
plane). Among all tracks with one point per circle, the solver looks for the
one with the shortest total path length:

* :func:`solve_greedy` projects the previous point onto the next circle;
* :func:`solve_dp_oracle` discretizes every circle and solves the
  discretized chain exactly by dynamic programming.

The module also carries the two-circle geometry that explains why a
straight anchor path leaves a mirror ambiguity and a closed one does not.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import GeometryError, ParameterError, ShapeError, SizeError
from .geometry import UavPath

DP_BUDGET = 30_000_000  # N * bins^2 cells


@dataclass(frozen=True)
class PseudoTriInstance:
    spots: UavPath
    ranges: np.ndarray
    target_altitude: float = 0.0

    def __post_init__(self):
        ranges = np.asarray(self.ranges, dtype=float)
        if ranges.shape != (len(self.spots),):
            raise ShapeError(f"{len(self.spots)} spots but ranges shaped {ranges.shape}")
        if np.any(ranges < 0):
            raise ParameterError("ranges must be non-negative")
        object.__setattr__(self, "ranges", ranges)

    def __len__(self) -> int:
        return len(self.spots)

    @property
    def radii(self) -> np.ndarray:
        dz = self.spots.spots[:, 2] - self.target_altitude
        return np.sqrt(np.maximum(0.0, self.ranges ** 2 - dz ** 2))

    @property
    def centers(self) -> np.ndarray:
        return self.spots.horizontal


@dataclass(frozen=True)
class FeasibleCircle:
    center: np.ndarray
    radius: float


def path_cost(positions, squared: bool = False) -> float:
    steps = np.linalg.norm(np.diff(np.asarray(positions, dtype=float), axis=0), axis=1)
    return float(np.sum(steps ** 2 if squared else steps))


@dataclass(frozen=True)
class SolutionTrack:
    positions: np.ndarray  # (N, 2)
    path_cost: float


def _track(positions, squared=False) -> SolutionTrack:
    positions = np.asarray(positions, dtype=float)
    return SolutionTrack(positions, path_cost(positions, squared))


def feasible_circle(spot, gamma_hat: float, target_alt: float = 0.0) -> FeasibleCircle:
    if gamma_hat < 0:
        raise ParameterError("range must be non-negative")
    spot = np.asarray(spot, dtype=float)
    dz = spot[2] - target_alt
    return FeasibleCircle(center=spot[:2].copy(), radius=float(np.sqrt(max(0.0, gamma_hat ** 2 - dz ** 2))))


def project_to_circle(point, center, radius: float) -> np.ndarray:
    """Nearest point on a circle; from the exact center, angle 0 is chosen."""
    d = np.asarray(point, dtype=float) - center
    norm = np.hypot(d[0], d[1])
    u = d / norm if norm > 0 else np.array([1.0, 0.0])
    return center + radius * u


def solve_greedy(inst: PseudoTriInstance, init=None, passes: int = 1, tol: float = 0.0,
                 squared: bool = False) -> SolutionTrack:
    """Project each previous position onto the next feasible circle.

    ``init`` defaults to the horizontal position of the first spot. With
    ``passes > 1`` the sweep is repeated around the closed path, each sweep
    starting from the previous sweep's last position; it stops early once the
    first position moves less than ``tol``.
    """
    if passes < 1:
        raise ParameterError("passes must be >= 1")
    centers, radii = inst.centers, inst.radii
    p = centers[0].copy() if init is None else np.asarray(init, dtype=float)[:2].copy()
    if not np.all(np.isfinite(p)):
        raise ParameterError("initial point must be finite")
    out = np.empty((len(inst), 2))
    for sweep in range(passes):
        first = out[0].copy()
        for n in range(len(inst)):
            p = project_to_circle(p, centers[n], radii[n])
            out[n] = p
        if sweep > 0 and np.hypot(*(out[0] - first)) <= tol:
            break
    return _track(out, squared)


def circle_bins(inst: PseudoTriInstance, angular_bins: int) -> np.ndarray:
    """Candidate points, shape ``(N, bins, 2)``, at angles ``2*pi*k/bins``."""
    ang = 2.0 * np.pi * np.arange(angular_bins) / angular_bins
    unit = np.column_stack([np.cos(ang), np.sin(ang)])
    return inst.centers[:, None, :] + inst.radii[:, None, None] * unit[None, :, :]


def solve_dp_oracle(inst: PseudoTriInstance, angular_bins: int = 360, squared: bool = False) -> SolutionTrack:
    """Exact minimum-cost chain over the discretized circles."""
    if angular_bins < 8:
        raise ParameterError("angular_bins must be >= 8")
    n = len(inst)
    if n * angular_bins ** 2 > DP_BUDGET:
        raise SizeError(f"N={n} with {angular_bins} bins exceeds the DP budget")
    pts = circle_bins(inst, angular_bins)
    cost = np.zeros(angular_bins)
    back = np.zeros((n, angular_bins), dtype=np.int64)
    for k in range(1, n):
        d = np.linalg.norm(pts[k][None, :, :] - pts[k - 1][:, None, :], axis=2)
        if squared:
            d = d ** 2
        total = cost[:, None] + d  # previous bin x current bin
        back[k] = np.argmin(total, axis=0)
        cost = total[back[k], np.arange(angular_bins)]
    idx = np.empty(n, dtype=np.int64)
    idx[-1] = int(np.argmin(cost))
    for k in range(n - 1, 0, -1):
        idx[k - 1] = back[k, idx[k]]
    return _track(pts[np.arange(n), idx], squared)


def snap_to_bins(track: SolutionTrack, inst: PseudoTriInstance, angular_bins: int,
                 squared: bool = False) -> SolutionTrack:
    """Replace each position with its circle's nearest discretization point."""
    pts = circle_bins(inst, angular_bins)
    d = np.linalg.norm(pts - track.positions[:, None, :], axis=2)
    return _track(pts[np.arange(len(inst)), np.argmin(d, axis=1)], squared)


def mirror_across_line(point, r: float, q: float) -> np.ndarray:
    """Reflection of ``point`` across the line ``y = r x + q``."""
    x, y = float(point[0]), float(point[1])
    den = r * r + 1.0
    return np.array([
        -(2 * q * r + r * r * x - 2 * r * y - x) / den,
        (2 * q + r * r * y + 2 * r * x - y) / den,
    ])


def lemma1_two_solutions(spot_a, spot_b, gamma_a: float, gamma_b: float, line: tuple[float, float],
                         target_alt: float = 0.0, tol: float = 1e-6) -> tuple[np.ndarray, np.ndarray]:
    """Both ground points consistent with two ranges from spots on a line.

    The two points are mirror images across the anchor line. The first one
    returned lies on the side where ``y >= r x + q``.
    """
    r, q = line
    ca = feasible_circle(spot_a, gamma_a, target_alt)
    cb = feasible_circle(spot_b, gamma_b, target_alt)
    for c in (ca, cb):
        if abs(c.center[1] - (r * c.center[0] + q)) > tol * max(1.0, np.hypot(*c.center)):
            raise GeometryError("spot does not lie on the given line")
    delta = cb.center - ca.center
    d = float(np.hypot(*delta))
    if d == 0:
        raise GeometryError("spots coincide; intersection is not isolated")
    along = (ca.radius ** 2 - cb.radius ** 2 + d * d) / (2 * d)
    h2 = ca.radius ** 2 - along ** 2
    if h2 < -tol * max(1.0, ca.radius ** 2):
        raise GeometryError("feasible circles do not intersect")
    h = np.sqrt(max(0.0, h2))
    u = delta / d
    normal = np.array([-u[1], u[0]])
    base = ca.center + along * u
    p1, p2 = base + h * normal, base - h * normal
    if p1[1] - (r * p1[0] + q) < p2[1] - (r * p2[0] + q):
        p1, p2 = p2, p1
    return p1, p2


class Ambiguity(enum.Enum):
    UNIQUE = "unique"
    DOUBLE = "double"
    CIRCLE_OF_SOLUTIONS = "circle_of_solutions"


def collinearity_residual(points) -> float:
    """Largest distance of any point from the best-fit line through them."""
    pts = np.asarray(points, dtype=float)
    centered = pts - pts.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    normal_part = centered - np.outer(centered @ vt[0], vt[0])
    return float(np.max(np.linalg.norm(normal_part, axis=1)))


def ambiguity_check(path: UavPath, target_altitude_known: bool = True, tol: float = 1e-9) -> Ambiguity:
    """Classify how many optimal solutions an anchor path admits.

    A straight path leaves a mirror pair in the ground plane, or a whole
    circle of solutions when the target altitude is also unknown.
    """
    if len(path) < 3:
        raise ParameterError("need at least 3 spots")
    pts = path.spots if not target_altitude_known else path.horizontal
    if collinearity_residual(pts) <= tol:
        return Ambiguity.DOUBLE if target_altitude_known else Ambiguity.CIRCLE_OF_SOLUTIONS
    return Ambiguity.UNIQUE
