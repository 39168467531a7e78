"""Ball-overlap counting and the pigeonhole covering bound.

Given N points inside a compact set of diameter diam, the balls of radius r
around them must stack up somewhere: some point of space belongs to at least

    N * (sqrt(2) * r / (2*r + diam))**n

of the open balls.  (Cover a circumscribing ball, whose radius Jung's theorem
controls, by boxes of side sqrt(2)*r; each box fits inside an r-ball, and the
fullest box pins the overlap.)  `max_overlap` measures the actual maximum
overlap of a point cloud — exactly in dimensions 1 and 2, where the depth
maximum of a union of balls is attained on the boundary arrangement and a
sweep over interval endpoints (n=1) or covered arcs of each circle (n=2)
finds it in O(N^2 log N) — so the bound can be exercised on random clouds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist

# Inflation used by the n >= 3 fallback when counting at witness candidates:
# they sit on ball boundaries by construction, and the open-ball maximum is
# attained arbitrarily close to them.  Random clouds have no ties at this
# scale, so closed counts match the generic open-ball depth.
WITNESS_EPS = 1e-12


@dataclass(frozen=True)
class PointCloud:
    """Finite point set with its diameter (brute-force, cached)."""

    points: np.ndarray
    diam: float = field(init=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ValueError(f"points must be a (count, n) array, got shape {pts.shape}")
        if not np.isfinite(pts).all():
            raise ValueError("points must be finite")
        object.__setattr__(self, "points", pts)
        diam = float(pdist(pts).max()) if len(pts) > 1 else 0.0
        object.__setattr__(self, "diam", diam)

    @property
    def n(self) -> int:
        return self.points.shape[1]

    @property
    def count(self) -> int:
        return self.points.shape[0]


def jung_radius(n: int, diam: float) -> float:
    """Circumradius bound for a set of given diameter in R^n.

    R = diam * sqrt(n / (2*(n+1))); in the plane this is diam/sqrt(3), on
    the line diam/2.  Monotone in both arguments, -> diam/sqrt(2) as n grows.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if diam < 0 or not np.isfinite(diam):
        raise ValueError(f"diam must be finite and >= 0, got {diam!r}")
    return diam * np.sqrt(n / (2.0 * (n + 1)))


def covering_lower_bound(count: int, r: float, diam: float, n: int) -> float:
    """Pigeonhole overlap bound N * (sqrt(2)*r / (2*r + diam))**n."""
    if not isinstance(count, (int, np.integer)) or count < 1:
        raise ValueError(f"count must be a positive integer, got {count!r}")
    if r <= 0 or not np.isfinite(r):
        raise ValueError(f"r must be positive, got {r!r}")
    if diam < 0 or not np.isfinite(diam):
        raise ValueError(f"diam must be finite and >= 0, got {diam!r}")
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    return count * (np.sqrt(2.0) * r / (2.0 * r + diam)) ** n


def _max_overlap_1d(x: np.ndarray, r: float) -> tuple[int, np.ndarray]:
    """Endpoint sweep: max interval depth, starts processed before ends."""
    starts = np.sort(x - r)
    ends = np.sort(x + r)
    pos = np.concatenate([starts, ends])
    # at equal coordinates a start (+1) must count before an end (-1)
    kind = np.concatenate([np.zeros(len(x)), np.ones(len(x))])
    order = np.lexsort((kind, pos))
    running = np.cumsum(np.where(kind[order] == 0, 1, -1))
    best = int(np.argmax(running))
    return int(running[best]), np.array([pos[order][best]])


def _circle_cover(deltas: np.ndarray, alphas: np.ndarray) -> tuple[int, float]:
    """Max number of arcs [delta-alpha, delta+alpha] sharing an angle.

    Arcs are closed, at most a half-circle wide.  Returns (max count, an
    angle attaining it).  Wrap-around arcs contribute to a base count at
    angle 0 and re-enter the sweep at their shifted start.
    """
    s = np.mod(deltas - alphas, 2.0 * np.pi)
    e = np.mod(deltas + alphas, 2.0 * np.pi)
    wraps = s > e
    base = int(np.count_nonzero(wraps))
    angles = np.concatenate([s, e])
    kind = np.concatenate([np.zeros(len(s)), np.ones(len(e))])  # 0 = start
    delta = np.concatenate([np.ones(len(s), dtype=int), -np.ones(len(e), dtype=int)])
    # a wrapped arc covers angle 0 already; its start only re-raises later
    order = np.lexsort((kind, angles))
    running = base + np.cumsum(delta[order])
    best = int(np.argmax(running))
    if running[best] <= base:
        return base, 0.0
    return int(running[best]), float(angles[order][best])


def _max_overlap_2d(pts: np.ndarray, r: float) -> tuple[int, np.ndarray]:
    """Exact max depth of r-balls in the plane via per-circle arc sweeps.

    The depth maximum of a union of closed balls is attained on some circle,
    and equals 1 + (max cover of that circle by the other balls).  Ball j
    covers the arc of circle i within angle arccos(d/2r) of the direction
    toward j, where d = |x_i - x_j| <= 2r.
    """
    count = len(pts)
    tree = cKDTree(pts)
    neighbors = tree.query_ball_point(pts, 2.0 * r)
    best, witness = 1, pts[0]
    for i in range(count):
        idx = np.asarray([j for j in neighbors[i] if j != i], dtype=int)
        if len(idx) + 1 <= best:
            continue
        diff = pts[idx] - pts[i]
        dist = np.hypot(diff[:, 0], diff[:, 1])
        dup = dist == 0.0
        ndup = int(np.count_nonzero(dup))
        if ndup:
            diff, dist = diff[~dup], dist[~dup]
        if len(dist) == 0:
            depth = 1 + ndup
            if depth > best:
                best, witness = depth, pts[i]
            continue
        alphas = np.arccos(np.clip(dist / (2.0 * r), -1.0, 1.0))
        cover, angle = _circle_cover(np.arctan2(diff[:, 1], diff[:, 0]), alphas)
        depth = 1 + ndup + cover
        if depth > best:
            best = depth
            witness = pts[i] + r * np.array([np.cos(angle), np.sin(angle)])
    return best, witness


def _candidates_nd(cloud: PointCloud, r: float) -> np.ndarray:
    """n >= 3 witness candidates: centers plus lens midpoints of close pairs."""
    pts = cloud.points
    tree = cKDTree(pts)
    chunks = [pts]
    pairs = tree.query_pairs(2.0 * r, output_type="ndarray").reshape(-1, 2)
    if len(pairs):
        chunks.append(0.5 * (pts[pairs[:, 0]] + pts[pairs[:, 1]]))
    return np.concatenate(chunks, axis=0)


def max_overlap(
    cloud: PointCloud,
    r: float,
    sampler: Optional[int] = None,
    seed: Optional[int] = None,
) -> tuple[int, np.ndarray]:
    """Maximum number of r-balls around the cloud sharing a point.

    Returns (m, witness).  Exact for n <= 2 (boundary sweeps; `sampler` and
    `seed` are ignored there).  For n >= 3 the result is a lower bound from
    centers and pairwise lens midpoints; `sampler` adds that many uniform
    random probes over the bounding box (seeded via `seed`), which can only
    raise the reported overlap toward the true maximum.
    """
    if r <= 0 or not np.isfinite(r):
        raise ValueError(f"r must be positive, got {r!r}")
    if cloud.n == 1:
        return _max_overlap_1d(cloud.points[:, 0], r)
    if cloud.n == 2:
        return _max_overlap_2d(cloud.points, r)
    candidates = _candidates_nd(cloud, r)
    if sampler:
        rng = np.random.default_rng(seed)
        lo = cloud.points.min(axis=0) - r
        hi = cloud.points.max(axis=0) + r
        candidates = np.concatenate(
            [candidates, rng.uniform(lo, hi, size=(int(sampler), cloud.n))], axis=0
        )
    tree = cKDTree(cloud.points)
    depth = tree.query_ball_point(candidates, r + WITNESS_EPS, return_length=True)
    best = int(np.argmax(depth))
    return int(depth[best]), candidates[best]
