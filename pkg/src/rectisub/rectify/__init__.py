"""Position-vector decomposition, rectifying tests and curve apparatus."""

from .frenet import (
    KAPPA_MIN,
    CurveResidual,
    FrenetApparatus,
    FrenetUndefined,
    curve_curvature,
    frenet,
    rectifying_curve_residual,
)
from .report import (
    DEFAULT_GRID,
    Entry,
    FrenetReport,
    Grid,
    Tolerances,
    Verdict,
    VerificationReport,
    classify,
    dump_json,
    frenet_report,
    make_grid,
    map_points,
    property_report,
    sample_rows,
)
from .residuals import (
    adapted_frame,
    concurrency_residual,
    point_checks,
    rectifying_residual,
    tangential_derivative,
)
from .split import NormalPositionField, PositionSplit, SplitJets, position_split, split_jets
