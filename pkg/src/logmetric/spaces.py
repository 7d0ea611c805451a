"""Finite metric spaces, point clouds, and the log-metric transform.

The central objects are matrix-backed or coordinate-backed finite metric
spaces, closed metric balls, Hausdorff distances between index regions,
Gromov products, and discrete chain lengths. Everything downstream
(hyperbolicity defects, ball geometry, the experiment runners) consumes
these types read-only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

# Full n x n matrices above this size are refused; callers must stay on the
# lazy coordinate path.
MATERIALIZE_LIMIT = 4096

EUCLIDEAN = "euclidean"
LOG_EUCLIDEAN = "log-euclidean"
_MODES = (EUCLIDEAN, LOG_EUCLIDEAN)


class SizeGuardError(RuntimeError):
    """Raised when an operation would materialize data past a size cap."""


class GeometryError(ValueError):
    """Raised for invalid metric data or region arguments."""


def _as_readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Violation:
    kind: str  # diagonal | symmetry | nonnegativity | triangle
    witness: tuple[int, ...]
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of the metric-axiom checks.

    ``failure`` is the first violated axiom (checks run in the order
    diagonal, symmetry, nonnegativity, triangle) or None on pass.
    ``pseudometric_pairs`` lists up to 16 distinct-index pairs at distance
    exactly zero; such pairs are warned about, not rejected.
    """

    ok: bool
    failure: Violation | None
    pseudometric_pairs: tuple[tuple[int, int], ...]
    pseudometric_count: int
    tol: float

    def summary(self) -> str:
        if self.ok:
            if self.pseudometric_count:
                return (
                    f"pass (pseudometric warning: {self.pseudometric_count} "
                    f"zero-distance pair(s), e.g. {self.pseudometric_pairs[0]})"
                )
            return "pass"
        f = self.failure
        return f"{f.kind} failure at {f.witness}: {f.detail}"


class FiniteMetricSpace:
    """A finite metric space over indices 0..n-1.

    Backed either by an explicit distance matrix or by point coordinates
    (see :class:`PointCloud`). Instances are immutable after construction
    and safe to share across threads.
    """

    def __init__(self, matrix: np.ndarray | None, labels: Sequence | None = None, n: int | None = None):
        if matrix is not None:
            matrix = _as_readonly(matrix)
            if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
                raise GeometryError("distance matrix must be square")
            n = matrix.shape[0]
        if n is None:
            raise GeometryError("point count unknown")
        self._matrix = matrix
        self.n = int(n)
        if labels is not None and len(labels) != self.n:
            raise GeometryError("labels length must equal point count")
        self._labels = list(labels) if labels is not None else None

    # -- construction ---------------------------------------------------

    @classmethod
    def from_matrix(
        cls,
        matrix: np.ndarray | Sequence[Sequence[float]],
        labels: Sequence | None = None,
        validate: bool = True,
        tol: float = 1e-9,
    ) -> "FiniteMetricSpace":
        space = cls(np.asarray(matrix, dtype=np.float64), labels=labels)
        if validate:
            report = validate_metric(space, tol=tol)
            if not report.ok:
                raise GeometryError(f"invalid metric: {report.summary()}")
        return space

    @staticmethod
    def from_points(points: np.ndarray | Sequence[Sequence[float]], metric_mode: str = EUCLIDEAN) -> "PointCloud":
        return PointCloud(points, metric_mode=metric_mode)

    # -- basic accessors ------------------------------------------------

    @property
    def labels(self) -> Sequence:
        if self._labels is not None:
            return self._labels
        return range(self.n)

    def _check_index(self, i: int) -> int:
        i = int(i)
        if not 0 <= i < self.n:
            raise GeometryError(f"index {i} out of range for space of size {self.n}")
        return i

    def dist(self, i: int, j: int) -> float:
        i, j = self._check_index(i), self._check_index(j)
        return float(self._matrix[i, j])

    def row(self, i: int) -> np.ndarray:
        """Distances from point i to every point, as a fresh array."""
        i = self._check_index(i)
        return np.array(self._matrix[i], dtype=np.float64)

    def matrix(self) -> np.ndarray:
        """The full distance matrix (read-only view); guarded by size."""
        if self._matrix is None:
            raise SizeGuardError(
                f"materializing a {self.n}x{self.n} distance matrix exceeds "
                f"the {MATERIALIZE_LIMIT}-point limit"
            )
        return self._matrix

    def restrict(self, indices: Iterable[int]) -> "FiniteMetricSpace":
        """Subspace on the given indices (order preserved, no dedup)."""
        idx = [self._check_index(i) for i in indices]
        labels = [self.labels[i] for i in idx] if self._labels is not None else None
        sub = self._matrix[np.ix_(idx, idx)]
        return FiniteMetricSpace(np.array(sub), labels=labels)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n})"


class PointCloud(FiniteMetricSpace):
    """Points in R^dim under the Euclidean metric or its log transform.

    ``metric_mode`` selects d(x, y) = |x - y| ("euclidean") or
    d'(x, y) = ln(1 + |x - y|) ("log-euclidean"). Both are genuine metrics
    for every point set, so no validation pass is run on construction.
    """

    def __init__(self, points, metric_mode: str = EUCLIDEAN, labels: Sequence | None = None):
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] < 1:
            raise GeometryError("points must be an (n, dim) array")
        if metric_mode not in _MODES:
            raise GeometryError(f"metric_mode must be one of {_MODES}")
        self.points = _as_readonly(pts)
        self.dim = int(pts.shape[1])
        self.metric_mode = metric_mode
        super().__init__(None, labels=labels, n=pts.shape[0])

    def _rows_from(self, p: np.ndarray, block: np.ndarray) -> np.ndarray:
        diff = block - p
        d = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        if self.metric_mode == LOG_EUCLIDEAN:
            d = np.log1p(d)
        return d

    def dist(self, i: int, j: int) -> float:
        i, j = self._check_index(i), self._check_index(j)
        return float(self._rows_from(self.points[i], self.points[j : j + 1])[0])

    def row(self, i: int) -> np.ndarray:
        i = self._check_index(i)
        return self._rows_from(self.points[i], self.points)

    def matrix(self) -> np.ndarray:
        if self._matrix is None:
            if self.n > MATERIALIZE_LIMIT:
                raise SizeGuardError(
                    f"materializing a {self.n}x{self.n} distance matrix exceeds "
                    f"the {MATERIALIZE_LIMIT}-point limit"
                )
            out = np.empty((self.n, self.n), dtype=np.float64)
            for i in range(self.n):
                out[i] = self._rows_from(self.points[i], self.points)
            self._matrix = _as_readonly(out)
        return self._matrix

    def restrict(self, indices: Iterable[int]) -> "PointCloud":
        idx = [self._check_index(i) for i in indices]
        labels = [self.labels[i] for i in idx] if self._labels is not None else None
        return PointCloud(np.array(self.points[idx]), metric_mode=self.metric_mode, labels=labels)


@dataclass(frozen=True)
class Region:
    """A subset of a space's indices, stored sorted and deduplicated."""

    space: FiniteMetricSpace
    members: tuple[int, ...]

    def __post_init__(self):
        mem = tuple(sorted({int(i) for i in self.members}))
        for i in mem:
            if not 0 <= i < self.space.n:
                raise GeometryError(f"region member {i} outside space of size {self.space.n}")
        object.__setattr__(self, "members", mem)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, i) -> bool:
        pos = np.searchsorted(self.members, int(i))
        return pos < len(self.members) and self.members[pos] == int(i)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.members, dtype=np.intp)

    def complement(self) -> np.ndarray:
        mask = np.ones(self.space.n, dtype=bool)
        mask[list(self.members)] = False
        return np.flatnonzero(mask)


@dataclass(frozen=True)
class Chain:
    """A finite partition of a path: parameters t_0 < ... < t_k plus the
    visited points, given either as space indices or as coordinates."""

    params: tuple[float, ...]
    points: tuple[int, ...] | np.ndarray = field()

    def __post_init__(self):
        params = tuple(float(t) for t in self.params)
        if any(b <= a for a, b in zip(params, params[1:])):
            raise GeometryError("chain parameters must be strictly increasing")
        object.__setattr__(self, "params", params)
        pts = self.points
        if isinstance(pts, np.ndarray) or (len(pts) > 0 and not isinstance(pts[0], (int, np.integer))):
            arr = np.asarray(pts, dtype=np.float64)
            if arr.ndim != 2:
                raise GeometryError("coordinate chain points must be an (k+1, dim) array")
            if arr.shape[0] != len(params):
                raise GeometryError("chain points length must equal params length")
            object.__setattr__(self, "points", _as_readonly(arr))
        else:
            idx = tuple(int(i) for i in pts)
            if len(idx) != len(params):
                raise GeometryError("chain points length must equal params length")
            object.__setattr__(self, "points", idx)

    @property
    def coordinate_based(self) -> bool:
        return isinstance(self.points, np.ndarray)


# -- operations ---------------------------------------------------------


def _validate_matrix(D: np.ndarray, tol: float) -> Violation | None:
    n = D.shape[0]
    bad = np.flatnonzero(np.diag(D) != 0.0)
    if bad.size:
        i = int(bad[0])
        return Violation("diagonal", (i, i), f"d({i},{i}) = {float(D[i, i])!r} != 0")
    asym = D != D.T
    if asym.any():
        i, j = np.unravel_index(int(np.argmax(asym)), asym.shape)
        return Violation(
            "symmetry", (int(i), int(j)), f"d({i},{j}) = {float(D[i, j])!r} but d({j},{i}) = {float(D[j, i])!r}"
        )
    neg = D < 0.0
    if neg.any():
        i, j = np.unravel_index(int(np.argmax(neg)), neg.shape)
        return Violation("nonnegativity", (int(i), int(j)), f"d({i},{j}) = {float(D[i, j])!r} < 0")
    for a in range(n):
        ra = D[a]
        # excess[b, c] = d(a,b) - (d(a,c) + d(c,b))
        excess = ra[:, None] - (ra[None, :] + D.T)
        excess_max = excess.max()
        if excess_max > tol:
            b, c = np.unravel_index(int(np.argmax(excess > tol)), excess.shape)
            return Violation(
                "triangle",
                (a, int(b), int(c)),
                f"d({a},{b}) = {float(D[a, b])!r} exceeds d({a},{c}) + d({c},{b}) = {float(D[a, c] + D[c, b])!r} by more than {tol}",
            )
    return None


def _duplicate_pairs_from_coords(pts: np.ndarray, cap: int) -> tuple[list[tuple[int, int]], int]:
    order = np.lexsort(pts.T[::-1])
    sorted_pts = pts[order]
    same = np.all(sorted_pts[1:] == sorted_pts[:-1], axis=1)
    pairs: list[tuple[int, int]] = []
    count = 0
    for k in np.flatnonzero(same):
        i, j = int(order[k]), int(order[k + 1])
        count += 1
        if len(pairs) < cap:
            pairs.append((min(i, j), max(i, j)))
    return pairs, count


def validate_metric(space: FiniteMetricSpace, tol: float = 1e-9) -> ValidationReport:
    """Check the metric axioms, reporting the first violation if any.

    Checks run in the order diagonal, symmetry, nonnegativity, triangle;
    the triangle inequality is checked up to an absolute tolerance.
    Distance zero between distinct indices is reported as a pseudometric
    warning rather than a failure.
    """
    cap = 16
    if isinstance(space, PointCloud):
        # Both coordinate modes induce genuine metrics, so only duplicate
        # points need flagging.
        pairs, count = _duplicate_pairs_from_coords(space.points, cap)
        return ValidationReport(True, None, tuple(pairs), count, float(tol))
    D = space.matrix()
    failure = _validate_matrix(D, float(tol))
    pairs: tuple[tuple[int, int], ...] = ()
    count = 0
    if failure is None:
        zero = (D == 0.0) & ~np.eye(space.n, dtype=bool)
        ii, jj = np.nonzero(np.triu(zero))
        count = int(ii.size)
        pairs = tuple((int(a), int(b)) for a, b in zip(ii[:cap], jj[:cap]))
    return ValidationReport(failure is None, failure, pairs, count, float(tol))


def log_transform(space: FiniteMetricSpace) -> FiniteMetricSpace:
    """The space under d' = ln(1 + d).

    ln(1 + x) is concave, increasing, and 0 at 0, so d' is again a metric;
    the output is constructed without a validation pass. Euclidean clouds
    stay lazy (the transform only retags the induced metric); any other
    space goes through its materialized matrix.
    """
    if isinstance(space, PointCloud) and space.metric_mode == EUCLIDEAN:
        return PointCloud(space.points, metric_mode=LOG_EUCLIDEAN, labels=space._labels)
    D = space.matrix()
    return FiniteMetricSpace(np.log1p(D), labels=space._labels)


def gromov_product(space: FiniteMetricSpace, p: int, x: int, y: int) -> float:
    """(x|y)_p = (d(x,p) + d(y,p) - d(x,y)) / 2."""
    return 0.5 * ((space.dist(x, p) + space.dist(y, p)) - space.dist(x, y))


def ball(space: FiniteMetricSpace, c: int, r: float) -> Region:
    """Closed ball: all indices at distance <= r from c."""
    r = float(r)
    if r < 0:
        raise GeometryError("ball radius must be nonnegative")
    members = np.flatnonzero(space.row(c) <= r)
    return Region(space, tuple(int(i) for i in members))


def _cross_distances(space: FiniteMetricSpace, idx_a: np.ndarray, idx_b: np.ndarray) -> np.ndarray:
    """Pairwise distance block between two index sets, shape (|A|, |B|)."""
    if isinstance(space, PointCloud) and space._matrix is None:
        out = np.empty((idx_a.size, idx_b.size), dtype=np.float64)
        block = space.points[idx_b]
        for k, i in enumerate(idx_a):
            out[k] = space._rows_from(space.points[int(i)], block)
        return out
    D = space.matrix()
    return D[np.ix_(idx_a, idx_b)]


def hausdorff_distance(a: Region, b: Region) -> float:
    """Two-sided Hausdorff distance between index regions.

    Both empty gives 0; exactly one empty gives infinity (there is no
    radius of enlargement covering a nonempty set by an empty one).
    """
    if a.space is not b.space:
        raise GeometryError("regions must live in the same space")
    if len(a) == 0 and len(b) == 0:
        return 0.0
    if len(a) == 0 or len(b) == 0:
        return float("inf")
    cross = _cross_distances(a.space, a.as_array(), b.as_array())
    return float(max(cross.min(axis=1).max(), cross.min(axis=0).max()))


def chain_length(chain: Chain, metric: FiniteMetricSpace | str) -> float:
    """Sum of consecutive distances along a chain.

    ``metric`` is the ambient space for index chains, or for coordinate
    chains either a mode string ("euclidean" / "log-euclidean") or a
    cloud whose mode is borrowed.
    """
    if chain.coordinate_based:
        if isinstance(metric, PointCloud):
            mode = metric.metric_mode
        elif isinstance(metric, str):
            mode = metric
        else:
            raise GeometryError("coordinate chains need a metric mode or a point cloud")
        if mode not in _MODES:
            raise GeometryError(f"metric_mode must be one of {_MODES}")
        pts = chain.points
        diff = pts[1:] - pts[:-1]
        seg = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        if mode == LOG_EUCLIDEAN:
            seg = np.log1p(seg)
        return float(seg.sum())
    if not isinstance(metric, FiniteMetricSpace):
        raise GeometryError("index chains need their ambient space")
    idx = chain.points
    return float(sum(metric.dist(idx[k], idx[k + 1]) for k in range(len(idx) - 1)))
