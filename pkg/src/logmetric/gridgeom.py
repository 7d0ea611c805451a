"""Exact ball geometry on axis-aligned grid samplings.

The generic searches in :mod:`logmetric.balls` walk full distance
matrices and cannot touch multi-million-point sampled clouds. This
module computes the same quantities for regions living on a regular
planar grid without materializing any matrix:

* inradius via an exact Euclidean distance transform,
* covering radii via convex-hull vertices (the farthest region point
  from any center is always a hull vertex),
* the quasi-ball defect via a branch-and-bound over centers whose
  pruning bounds are value-preserving: every discarded center or radius
  is proven worse than the incumbent, so the result agrees with the
  brute-force route up to float reproduction error.

All values are for the plain Euclidean metric d; log-metric counterparts
follow by monotonicity (see the lens module).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage, spatial

from .spaces import GeometryError


@dataclass(frozen=True)
class GridSampling:
    """Regular grid x = (i0 + i) h, y = (j0 + j) h, flat index iy * nx + ix."""

    i0: int
    j0: int
    h: float
    nx: int
    ny: int

    @property
    def n(self) -> int:
        return self.nx * self.ny

    def xs(self) -> np.ndarray:
        return (self.i0 + np.arange(self.nx)) * self.h

    def ys(self) -> np.ndarray:
        return (self.j0 + np.arange(self.ny)) * self.h

    def points(self) -> np.ndarray:
        out = np.empty((self.ny, self.nx, 2), dtype=np.float64)
        out[:, :, 0] = self.xs()[None, :]
        out[:, :, 1] = self.ys()[:, None]
        return out.reshape(-1, 2)

    def coord(self, flat: int) -> tuple[float, float]:
        iy, ix = divmod(int(flat), self.nx)
        return float((self.i0 + ix) * self.h), float((self.j0 + iy) * self.h)


@dataclass(frozen=True)
class GridBallStats:
    """Extremal inner/outer ball data of a grid region under d."""

    inner_index: int
    inradius: float
    outer_index: int
    covrad: float


def _check_mask(gs: GridSampling, mask: np.ndarray) -> np.ndarray:
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (gs.ny, gs.nx):
        raise GeometryError(f"mask shape {mask.shape} does not match grid ({gs.ny}, {gs.nx})")
    return mask


def _dist_grid(gs: GridSampling, cx: float, cy: float) -> np.ndarray:
    dx2 = (gs.xs() - cx) ** 2
    dy2 = (gs.ys() - cy) ** 2
    return np.sqrt(dx2[None, :] + dy2[:, None])


def inradius_field(gs: GridSampling, mask: np.ndarray) -> np.ndarray:
    """Distance from every in-region cell to the nearest cell outside the
    region; infinite everywhere when the region is the whole grid."""
    mask = _check_mask(gs, mask)
    if mask.all():
        return np.full(mask.shape, np.inf)
    return ndimage.distance_transform_edt(mask, sampling=gs.h)


def region_distance_field(gs: GridSampling, mask: np.ndarray) -> np.ndarray:
    """Distance from every cell to the region (zero inside it)."""
    mask = _check_mask(gs, mask)
    if not mask.any():
        raise GeometryError("empty region")
    return ndimage.distance_transform_edt(~mask, sampling=gs.h)


def _mask_points(gs: GridSampling, mask: np.ndarray) -> np.ndarray:
    ys_idx, xs_idx = np.nonzero(mask)
    pts = np.empty((ys_idx.size, 2), dtype=np.float64)
    pts[:, 0] = (gs.i0 + xs_idx) * gs.h
    pts[:, 1] = (gs.j0 + ys_idx) * gs.h
    return pts


def _hull_vertices(pts: np.ndarray) -> np.ndarray:
    if pts.shape[0] <= 8:
        return pts
    try:
        hull = spatial.ConvexHull(pts)
        return pts[hull.vertices]
    except spatial.QhullError:
        # degenerate (collinear) region; keep every point
        return pts


def _anchor_points(s_pts: np.ndarray) -> np.ndarray:
    return np.array(
        [
            s_pts[int(np.argmin(s_pts[:, 0]))],
            s_pts[int(np.argmax(s_pts[:, 0]))],
            s_pts[int(np.argmin(s_pts[:, 1]))],
            s_pts[int(np.argmax(s_pts[:, 1]))],
        ]
    )


def _max_dist_to(points: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Per-point maximum distance to the target set, chunked."""
    out = np.empty(points.shape[0], dtype=np.float64)
    step = max(1, (1 << 21) // max(1, targets.shape[0]))
    for lo in range(0, points.shape[0], step):
        hi = min(points.shape[0], lo + step)
        diff = points[lo:hi, None, :] - targets[None, :, :]
        out[lo:hi] = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff)).max(axis=1)
    return out


def _min_covering_center(gs: GridSampling, s_pts: np.ndarray, hull: np.ndarray) -> tuple[int, float]:
    """Grid point minimizing the covering radius of the region.

    A four-anchor lower bound screens the grid; every center whose bound
    does not exceed the seed's exact value gets an exact evaluation,
    which cannot miss the true minimizer.
    """
    anchors = _anchor_points(s_pts)
    lb = np.zeros((gs.ny, gs.nx), dtype=np.float64)
    for ax, ay in anchors:
        np.maximum(lb, _dist_grid(gs, ax, ay), out=lb)
    lb_flat = lb.ravel()
    seed = int(np.argmin(lb_flat))
    seed_val = float(_max_dist_to(np.array([gs.coord(seed)]), hull)[0])
    cand = np.flatnonzero(lb_flat <= seed_val + 1e-12)
    iy, ix = np.divmod(cand, gs.nx)
    pts = np.empty((cand.size, 2), dtype=np.float64)
    pts[:, 0] = (gs.i0 + ix) * gs.h
    pts[:, 1] = (gs.j0 + iy) * gs.h
    vals = _max_dist_to(pts, hull)
    k = int(np.argmin(vals))
    return int(cand[k]), float(vals[k])


def grid_ball_stats(gs: GridSampling, mask: np.ndarray) -> GridBallStats:
    """Exact inner and outer extremal balls of a grid region.

    Inner: region cell with maximal distance to the complement, the value
    recomputed exactly at the winner. Outer: grid cell with minimal
    covering radius, cross-checked against the direct maximum over the
    whole region.
    """
    mask = _check_mask(gs, mask)
    if not mask.any():
        raise GeometryError("empty region")
    if mask.all():
        inner_flat, inner_exact = 0, float("inf")
    else:
        inr = inradius_field(gs, mask)
        inner_flat = int(np.argmax(np.where(mask, inr, -np.inf).ravel()))
        cx, cy = gs.coord(inner_flat)
        inner_exact = float(_dist_grid(gs, cx, cy)[~mask].min())
    s_pts = _mask_points(gs, mask)
    hull = _hull_vertices(s_pts)
    outer_flat, cov_hull = _min_covering_center(gs, s_pts, hull)
    ox, oy = gs.coord(outer_flat)
    diff = s_pts - np.array([ox, oy])
    cov_exact = float(np.sqrt(np.einsum("ij,ij->i", diff, diff)).max())
    if abs(cov_exact - cov_hull) > 1e-9:
        raise AssertionError("hull covering radius disagrees with direct maximum")
    return GridBallStats(inner_flat, inner_exact, outer_flat, cov_exact)


# -- quasi-ball search --------------------------------------------------


class _QuasiBallEngine:
    """Per-region state for the exact quasi-ball branch-and-bound.

    Bounds used (h = spacing, gap = signed margin from a center to the
    region bounding box on one side, room = margin to the domain edge on
    the same side):

    * f(r), the directed distance region -> ball, satisfies
      max(0, covrad - r) <= f(r) <= max(0, covrad - r + 1.5 h)
      because a grid ball point lies within 1.5 h of any segment point
      toward the farthest region point.
    * g(r), the directed distance ball -> region, is exact via the
      distance field, and g(r) >= r - gap - 1.25 h once the ball pokes
      past the bounding-box side, valid while the domain keeps a grid
      point out there (room >= r).
    """

    def __init__(self, gs: GridSampling, mask: np.ndarray, full_sweep_limit: int = 250_000):
        self.gs = gs
        self.h = gs.h
        self.mask = mask
        self.s_pts = _mask_points(gs, mask)
        self.ds_field = region_distance_field(gs, mask)
        self.xs = gs.xs()
        self.ys = gs.ys()
        self.sx_lo = float(self.s_pts[:, 0].min())
        self.sx_hi = float(self.s_pts[:, 0].max())
        self.sy_lo = float(self.s_pts[:, 1].min())
        self.sy_hi = float(self.s_pts[:, 1].max())
        self.full_sweep_limit = full_sweep_limit

    def side_gaps(self, cx, cy):
        gaps = np.stack([self.sx_hi - cx, cx - self.sx_lo, self.sy_hi - cy, cy - self.sy_lo])
        rooms = np.stack([self.xs[-1] - cx, cx - self.xs[0], self.ys[-1] - cy, cy - self.ys[0]])
        return gaps, rooms

    def _subgrid(self, cx: float, cy: float, radius: float):
        """Coordinates, distances to (cx, cy), and region-distance values
        of every grid point in the box of the given radius."""
        if np.isfinite(radius):
            ix_lo = max(0, int(np.floor((cx - radius - self.xs[0]) / self.h)))
            ix_hi = min(self.gs.nx - 1, int(np.ceil((cx + radius - self.xs[0]) / self.h)))
            iy_lo = max(0, int(np.floor((cy - radius - self.ys[0]) / self.h)))
            iy_hi = min(self.gs.ny - 1, int(np.ceil((cy + radius - self.ys[0]) / self.h)))
        else:
            ix_lo, ix_hi, iy_lo, iy_hi = 0, self.gs.nx - 1, 0, self.gs.ny - 1
        xs = self.xs[ix_lo : ix_hi + 1]
        ys = self.ys[iy_lo : iy_hi + 1]
        coords = np.empty((ys.size, xs.size, 2), dtype=np.float64)
        coords[:, :, 0] = xs[None, :]
        coords[:, :, 1] = ys[:, None]
        dist = np.sqrt(((xs - cx) ** 2)[None, :] + ((ys - cy) ** 2)[:, None])
        ds = self.ds_field[iy_lo : iy_hi + 1, ix_lo : ix_hi + 1]
        return coords.reshape(-1, 2), dist.ravel(), ds.ravel()

    def _escape_cap(self, cx: float, cy: float, level: float) -> float:
        """Smallest radius cap above which g provably exceeds ``level``,
        infinite when no domain side has room for the argument."""
        if not np.isfinite(level):
            return np.inf
        gaps, rooms = self.side_gaps(cx, cy)
        cap = np.inf
        for gap, room in zip(gaps, rooms):
            c = level + float(gap) + 3.0 * self.h
            if c > 0 and room >= c:
                cap = min(cap, c)
        return cap

    def center_defect(self, flat: int, prune_at: float) -> tuple[float, float] | None:
        """Exact min over realized radii of the Hausdorff distance between
        the region and the ball at this center, or None when a sound
        lower bound shows the center cannot beat ``prune_at``."""
        cx, cy = self.gs.coord(flat)
        diff = self.s_pts - np.array([cx, cy])
        s_dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        covrad = float(s_dist.max())
        h = self.h

        # cheap pass over a radius range certain to contain any value
        # below prune_at: beyond it either f or g already exceeds it
        r0 = min(covrad + 2.0 * h, self._escape_cap(cx, cy, prune_at))
        _, dist, ds = self._subgrid(cx, cy, r0)
        keep = dist <= r0
        dist, ds = dist[keep], ds[keep]
        order = np.argsort(dist, kind="stable")
        radii = dist[order]
        g = np.maximum.accumulate(ds[order])
        last = np.empty(radii.size, dtype=bool)
        last[:-1] = radii[:-1] != radii[1:]
        last[-1] = True
        r_last = radii[last]
        g_last = g[last]
        f_lo = np.maximum(0.0, covrad - r_last - 1e-12)
        f_up = np.maximum(0.0, covrad - r_last + 1.5 * h + 1e-12)
        t_lo = float(np.maximum(f_lo, g_last).min())
        if t_lo >= prune_at - 1e-12:
            return None
        t_cap = float(np.maximum(f_up, g_last).min())

        r_lo = max(0.0, covrad - t_cap - 3.0 * h)
        r_hi = self._escape_cap(cx, cy, t_cap)
        if not np.isfinite(r_hi):
            return self._exact_valley(cx, cy, s_dist, 0.0, None)
        return self._exact_valley(cx, cy, s_dist, r_lo, max(r_hi, r_lo))

    def _exact_valley(self, cx, cy, s_dist, r_lo, r_hi):
        """Exact min of max(f, g) over realized radii in [r_lo, r_hi]
        (r_hi None sweeps the whole domain)."""
        h = self.h
        if r_hi is None and self.gs.n > self.full_sweep_limit:
            raise RuntimeError(
                "quasi-ball radius window invalid on a large grid; the "
                "sampled domain must extend beyond the region"
            )
        coords, dist, ds = self._subgrid(cx, cy, np.inf if r_hi is None else r_hi)
        if r_hi is not None:
            keep = dist <= r_hi
            coords, dist, ds = coords[keep], dist[keep], ds[keep]
        order = np.argsort(dist, kind="stable")
        coords = coords[order]
        radii = dist[order]
        g = np.maximum.accumulate(ds[order])
        last = np.empty(radii.size, dtype=bool)
        last[:-1] = radii[:-1] != radii[1:]
        last[-1] = True
        eval_idx = np.flatnonzero(last & (radii >= r_lo))
        if eval_idx.size == 0:
            if r_hi is None:
                raise AssertionError("empty radius sweep")
            return self._exact_valley(cx, cy, s_dist, 0.0, None)
        eval_r = radii[eval_idx]

        # far cluster: only region points beyond r_lo can sit outside a
        # candidate ball; their nearest ball point lies in the ring suffix
        far = s_dist > r_lo - 1e-9
        fs_d = s_dist[far]
        fs_pts = self.s_pts[far]
        fs_order = np.argsort(fs_d, kind="stable")
        fs_d = fs_d[fs_order]
        fs_pts = fs_pts[fs_order]
        ring_start = int(np.searchsorted(radii, r_lo - 3.0 * h, side="left"))
        ring_xy = coords[ring_start:]
        if fs_d.size == 0 or ring_xy.shape[0] == 0:
            f_vals = np.zeros(eval_idx.size, dtype=np.float64)
        else:
            pm = np.empty((ring_xy.shape[0], fs_d.size), dtype=np.float64)
            step = max(1, (1 << 22) // max(1, fs_d.size))
            for lo in range(0, ring_xy.shape[0], step):
                hi = min(ring_xy.shape[0], lo + step)
                dd = ring_xy[lo:hi, None, :] - fs_pts[None, :, :]
                pm[lo:hi] = np.sqrt(np.einsum("ijk,ijk->ij", dd, dd))
            np.minimum.accumulate(pm, axis=0, out=pm)
            # suffix max over far-cluster columns, chunked to cap temporaries
            for lo in range(0, pm.shape[0], step):
                hi = min(pm.shape[0], lo + step)
                pm[lo:hi] = np.maximum.accumulate(pm[lo:hi, ::-1], axis=1)[:, ::-1]
            ring_pos = eval_idx - ring_start
            cutoff = np.searchsorted(fs_d, eval_r, side="right")
            f_vals = np.zeros(eval_idx.size, dtype=np.float64)
            inside = cutoff < fs_d.size
            f_vals[inside] = pm[ring_pos[inside], cutoff[inside]]
        t_all = np.maximum(f_vals, g[eval_idx])
        k = int(np.argmin(t_all))
        return float(t_all[k]), float(eval_r[k])


def grid_quasi_ball(gs: GridSampling, mask: np.ndarray) -> tuple[float, int, float]:
    """Minimal Hausdorff distance from the grid region to any ball of the
    sampled cloud, with the winning center index and realized radius.

    Agrees with :func:`logmetric.balls.quasi_ball_defect` on the same
    cloud. Ties resolve to the smallest center index, then the smallest
    radius. The winner is re-verified by an independent kd-tree Hausdorff
    evaluation.
    """
    mask = _check_mask(gs, mask)
    if not mask.any():
        raise GeometryError("empty region")
    eng = _QuasiBallEngine(gs, mask)
    h = gs.h

    inr = inradius_field(gs, mask)
    seed = int(np.argmax(np.where(mask, inr, -np.inf).ravel()))
    t_seed, r_seed = eng.center_defect(seed, np.inf)
    cap = t_seed + 1e-9

    # stage 1: a ball within cap of the region needs a center within cap
    ds_flat = eng.ds_field.ravel()
    stage1 = np.flatnonzero(ds_flat <= cap)
    iy, ix = np.divmod(stage1, gs.nx)
    cxs = (gs.i0 + ix) * h
    cys = (gs.j0 + iy) * h

    # stage 2: crossing of f >= covrad - r against the bounding-box
    # escape bound on g, used only where the domain has room for it
    anchors = _anchor_points(eng.s_pts)
    covrad_lb = np.zeros(stage1.size, dtype=np.float64)
    for ax, ay in anchors:
        np.maximum(covrad_lb, np.sqrt((cxs - ax) ** 2 + (cys - ay) ** 2), out=covrad_lb)
    gaps, rooms = eng.side_gaps(cxs, cys)
    lb2 = np.zeros(stage1.size, dtype=np.float64)
    for gap_side, room_side in zip(gaps, rooms):
        crossing = (covrad_lb + gap_side + 1.25 * h) / 2.0
        bound = np.where(room_side >= crossing + h, (covrad_lb - gap_side - 1.25 * h) / 2.0, 0.0)
        np.maximum(lb2, bound, out=lb2)
    survivors = stage1[np.maximum(ds_flat[stage1], lb2) <= cap]

    best, best_c, best_r = np.inf, -1, 0.0
    for flat in survivors:
        flat = int(flat)
        res = eng.center_defect(flat, min(cap, best))
        if res is None:
            continue
        t_c, r_c = res
        if t_c < best:
            best, best_c, best_r = t_c, flat, r_c
    if best_c < 0:  # belt: the seed always evaluates below cap
        best, best_c, best_r = t_seed, seed, r_seed

    _verify_winner(gs, eng, best_c, best_r, best)
    return float(best), int(best_c), float(best_r)


def _verify_winner(gs: GridSampling, eng: _QuasiBallEngine, flat: int, radius: float, value: float) -> None:
    cx, cy = gs.coord(flat)
    coords, dist, _ = eng._subgrid(cx, cy, radius + gs.h)
    ball_xy = coords[dist <= radius]
    if ball_xy.shape[0] == 0:
        raise AssertionError("reported ball is empty")
    d1 = spatial.cKDTree(eng.s_pts).query(ball_xy)[0].max()
    d2 = spatial.cKDTree(ball_xy).query(eng.s_pts)[0].max()
    direct = max(float(d1), float(d2))
    if abs(direct - value) > 1e-9:
        raise AssertionError(f"quasi-ball verification failed: engine {value!r} vs direct {direct!r}")
