"""Exact four-point and ultrametric defects of finite metric spaces.

Both defects are the least constants making the respective condition hold
over all ordered tuples (repeats allowed). Kernels scan the full tuple
space with a vectorized inner reduction; ties between maximizers are
broken toward the lexicographically smallest witness so that results are
bit-reproducible across runs and chunk sizes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spaces import FiniteMetricSpace


@dataclass(frozen=True)
class DeltaReport:
    """Four-point defect with its attaining quadruple.

    ``witness`` is the lexicographically smallest ordered (p, x, y, z)
    attaining the maximum; re-evaluating :func:`quadruple_defect` on it
    reproduces ``delta`` exactly.
    """

    delta: float
    witness: tuple[int, int, int, int]
    quadruples_scanned: int


@dataclass(frozen=True)
class UltraReport:
    delta_u: float
    witness: tuple[int, int, int]


def quadruple_defect(space: FiniteMetricSpace, p: int, x: int, y: int, z: int) -> float:
    """max(0, min((x|z)_p, (y|z)_p) - (x|y)_p) for one ordered quadruple."""
    D = space.matrix()
    gxz = 0.5 * ((D[p, x] + D[p, z]) - D[x, z])
    gyz = 0.5 * ((D[p, y] + D[p, z]) - D[y, z])
    gxy = 0.5 * ((D[p, x] + D[p, y]) - D[x, y])
    return max(0.0, min(gxz, gyz) - gxy)


def triple_defect(space: FiniteMetricSpace, x: int, y: int, z: int) -> float:
    """max(0, d(x,y) - max(d(x,z), d(y,z))) for one ordered triple."""
    D = space.matrix()
    return max(0.0, D[x, y] - max(D[x, z], D[y, z]))


def _chunk_for(n: int) -> int:
    if n == 0:
        return 1
    # keep the (chunk, n, n) scratch tensor near 32 MB
    return max(1, min(64, (1 << 22) // max(1, n * n)))


def _best_over_base(G: np.ndarray, chunk: int) -> tuple[float, int, int, int]:
    """Max over (x, y) of max_z min(G[x,z], G[y,z]) - G[x,y], first witness."""
    n = G.shape[0]
    best = -np.inf
    bx = by = bz = 0
    for x0 in range(0, n, chunk):
        x1 = min(n, x0 + chunk)
        m = np.minimum(G[x0:x1, None, :], G[None, :, :]).max(axis=2)
        defect = m - G[x0:x1]
        kmax = float(defect.max())
        if kmax > best:
            xi, y = np.unravel_index(int(np.argmax(defect)), defect.shape)
            best = kmax
            bx, by = x0 + int(xi), int(y)
            bz = int(np.argmax(np.minimum(G[bx], G[by])))
    return best, bx, by, bz


def four_point_delta(space: FiniteMetricSpace) -> DeltaReport:
    """Least delta such that (x|y)_p >= min((x|z)_p, (y|z)_p) - delta holds
    for every ordered quadruple (p, x, y, z).

    O(n^4); the base point loop is outermost and each base is scanned with
    a deterministic vectorized reduction, so the result does not depend on
    chunking. The degenerate quadruple (p, p, p, p) contributes exactly 0,
    hence delta >= 0 without clamping.
    """
    D = space.matrix()
    n = space.n
    # on <= 3 points every quadruple repeats a slot and the triangle
    # inequality forces its defect <= 0, so the scan could only return
    # rounding noise; the defect is 0 for any metric
    if n <= 3:
        return DeltaReport(0.0, (0, 0, 0, 0), n**4)
    chunk = _chunk_for(n)
    best = -np.inf
    witness = (0, 0, 0, 0)
    for p in range(n):
        rp = D[p]
        G = 0.5 * ((rp[:, None] + rp[None, :]) - D)
        cand, x, y, z = _best_over_base(G, chunk)
        if cand > best:
            best = cand
            witness = (p, x, y, z)
    return DeltaReport(float(best), witness, n**4)


def four_point_delta_fixed_base(space: FiniteMetricSpace, p: int) -> DeltaReport:
    """Four-point defect with the base point frozen at p; an O(n^3)
    diagnostic lower bound on :func:`four_point_delta`."""
    D = space.matrix()
    n = space.n
    p = int(p)
    if not 0 <= p < n:
        raise ValueError(f"base index {p} out of range")
    if n <= 3:
        return DeltaReport(0.0, (p, 0, 0, 0), n**3)
    rp = D[p]
    G = 0.5 * ((rp[:, None] + rp[None, :]) - D)
    best, x, y, z = _best_over_base(G, _chunk_for(n))
    return DeltaReport(float(best), (p, x, y, z), n**3)


def ultrametric_delta(space: FiniteMetricSpace) -> UltraReport:
    """Least delta with d(x,y) <= max(d(x,z), d(y,z)) + delta over all
    ordered triples. O(n^3) with a vectorized scan per first index."""
    D = space.matrix()
    n = space.n
    best = -np.inf
    witness = (0, 0, 0)
    for x in range(n):
        rx = D[x]
        # m[y, z] = max(d(x,z), d(y,z)); the best z per y minimizes it
        m = np.maximum(rx[None, :], D)
        mmin = m.min(axis=1)
        vals = rx - mmin
        y = int(np.argmax(vals))
        cand = float(vals[y])
        if cand > best:
            best = cand
            z = int(np.argmin(np.maximum(rx, D[y])))
            witness = (x, y, z)
    return UltraReport(float(best), witness)
