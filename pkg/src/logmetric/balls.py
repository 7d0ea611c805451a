"""Eccentricity, quasi-ball defect, and weak eccentricity of regions.

All searches here are exhaustive over the finite space: inner centers
range over the region, outer centers over the whole space, and candidate
radii over realized distance values (a ball is constant between
consecutive realized radii, so this restriction is lossless). The grid
module provides equivalent accelerated paths for large sampled clouds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spaces import (
    FiniteMetricSpace,
    GeometryError,
    Region,
    ball,
    hausdorff_distance,
)


@dataclass(frozen=True)
class BallSpec:
    center: int
    radius: float

    def __post_init__(self):
        if not self.radius >= 0:
            raise GeometryError("ball radius must be nonnegative")


@dataclass(frozen=True)
class EccReport:
    """Eccentricity of a region with the extremal inner and outer balls.

    ``inner`` carries the best in-region center and its inradius (the
    supremum of contained-ball radii, possibly unattained for closed
    balls, possibly infinite for the whole space); ``outer`` carries the
    best covering center and its covering radius. Both are None exactly
    when the region is empty, in which case ecc is 0 by convention.
    """

    ecc: float
    inner: BallSpec | None
    outer: BallSpec | None


def intersect_balls(space: FiniteMetricSpace, b1: BallSpec, b2: BallSpec) -> Region:
    """Indices lying in both closed balls."""
    members = np.flatnonzero((space.row(b1.center) <= b1.radius) & (space.row(b2.center) <= b2.radius))
    return Region(space, tuple(int(i) for i in members))


def inradius_at(space: FiniteMetricSpace, c: int, region: Region) -> float:
    """sup{R : ball(c, R) contained in the region} = min distance from c
    to the complement; infinite when the region is the whole space.

    With closed balls the supremum itself may escape the region; every
    strictly smaller radius is contained.
    """
    c = int(c)
    if c not in region:
        raise GeometryError("center outside region")
    comp = region.complement()
    if comp.size == 0:
        return float("inf")
    return float(space.row(c)[comp].min())


def covering_radius(space: FiniteMetricSpace, c: int, region: Region) -> float:
    """Smallest radius at which the ball about c covers the region."""
    if len(region) == 0:
        raise GeometryError("empty region")
    return float(space.row(int(c))[region.as_array()].max())


def eccentricity(space: FiniteMetricSpace, region: Region) -> EccReport:
    """Least enlargement delta admitting inner and outer sandwich balls
    B(c, R) within the region within B(c', R + delta).

    The inner center ranges over the region (a center outside it cannot
    carry a contained ball of positive radius), the outer center over the
    whole space, and the two optimizations are independent. The empty
    region has eccentricity 0 with no witness balls.
    """
    if len(region) == 0:
        return EccReport(0.0, None, None)
    D = space.matrix()
    sel = region.as_array()
    from_region = D[sel, :]
    cov = from_region.max(axis=0)
    outer_idx = int(np.argmin(cov))
    cov_min = float(cov[outer_idx])
    comp = region.complement()
    if comp.size == 0:
        inner_idx = int(sel[0])
        inr_max = float("inf")
    else:
        inr = from_region[:, comp].min(axis=1)
        pos = int(np.argmax(inr))
        inner_idx = int(sel[pos])
        inr_max = float(inr[pos])
    ecc = max(0.0, cov_min - inr_max)
    return EccReport(ecc, BallSpec(inner_idx, inr_max), BallSpec(outer_idx, cov_min))


def quasi_ball_defect(space: FiniteMetricSpace, region: Region) -> tuple[float, BallSpec]:
    """Least Hausdorff distance from the region to any closed ball.

    Centers range over the whole space and radii over the distances
    realized from each center (plus 0, which is always realized). Ties
    resolve to the smallest center index, then the smallest radius.
    """
    if len(region) == 0:
        raise GeometryError("empty region")
    D = space.matrix()
    n = space.n
    sel = region.as_array()
    dist_to_region = D[:, sel].min(axis=1)
    best = np.inf
    best_c = 0
    best_r = 0.0
    for c in range(n):
        row = D[c]
        order = np.argsort(row, kind="stable")
        radii = row[order]
        # grow the ball one sorted point at a time; a radius is realized
        # only at the last occurrence of its value
        toward_region = np.maximum.accumulate(dist_to_region[order])
        from_region = np.minimum.accumulate(D[np.ix_(order, sel)], axis=0).max(axis=1)
        last = np.empty(n, dtype=bool)
        last[:-1] = radii[:-1] != radii[1:]
        last[-1] = True
        haus = np.maximum(from_region, toward_region)[last]
        k = int(np.argmin(haus))
        cand = float(haus[k])
        if cand < best:
            best = cand
            best_c = c
            best_r = float(radii[last][k])
    return best, BallSpec(best_c, best_r)


def weak_ecc_defect(space: FiniteMetricSpace, region: Region, lam: float) -> float:
    """Least delta in the relaxed sandwich B(z, r) within the region
    within B(z', lam * r + delta), for a fixed lam >= 1.

    At lam = 1 this coincides with the eccentricity. The empty region
    yields 0.
    """
    lam = float(lam)
    if lam < 1:
        raise GeometryError("lambda must be >= 1")
    if len(region) == 0:
        return 0.0
    report = eccentricity(space, region)
    cov_min = report.outer.radius
    inr_max = report.inner.radius
    if np.isinf(inr_max):
        return 0.0
    return max(0.0, cov_min - lam * inr_max)


__all__ = [
    "BallSpec",
    "EccReport",
    "intersect_balls",
    "inradius_at",
    "covering_radius",
    "eccentricity",
    "quasi_ball_defect",
    "weak_ecc_defect",
    "ball",
    "hausdorff_distance",
]
