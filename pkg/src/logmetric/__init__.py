"""Finite metric spaces under the logarithmic transform d' = ln(1 + d):
hyperbolicity and ultrametric defects, ball geometry, quasi-geodesic
taming, and the lens experiments."""

from .balls import (
    BallSpec,
    EccReport,
    covering_radius,
    eccentricity,
    inradius_at,
    intersect_balls,
    quasi_ball_defect,
    weak_ecc_defect,
)
from .gridgeom import GridBallStats, GridSampling, grid_ball_stats, grid_quasi_ball
from .hyperbolicity import (
    DeltaReport,
    UltraReport,
    four_point_delta,
    four_point_delta_fixed_base,
    quadruple_defect,
    triple_defect,
    ultrametric_delta,
)
from .lens import (
    LensFamily,
    LensStats,
    ecc_growth_experiment,
    grid_experiment,
    lens_exact_stats,
    line_ultrametric_experiment,
    sample_lens,
    sampled_lens_stats,
)
from .quasigeodesic import (
    PLPath,
    QGParams,
    TameConstants,
    TameReport,
    horizon,
    pl_length,
    pl_length_partition,
    pl_length_profile,
    qg_defect,
    tame,
    tame_constants,
)
from .spaces import (
    EUCLIDEAN,
    LOG_EUCLIDEAN,
    MATERIALIZE_LIMIT,
    Chain,
    FiniteMetricSpace,
    GeometryError,
    PointCloud,
    Region,
    SizeGuardError,
    ValidationReport,
    Violation,
    ball,
    chain_length,
    gromov_product,
    hausdorff_distance,
    log_transform,
    validate_metric,
)

__version__ = "0.1.0"
