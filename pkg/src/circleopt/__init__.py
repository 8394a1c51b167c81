"""Ergodic optimization for circle expanding maps x -> d*x (mod 1).

The toolkit solves the calibrated sub-action equation with a max-transfer
operator, measures convexity defects, constructs Sturmian measures of the
doubling map, and machine-checks the sufficient conditions under which the
maximizing measure of an observable is uniquely Sturmian.
"""

from .torus import (
    AntisymmetricExtension,
    Cosine,
    FunctionSpec,
    GridFunction,
    Negate,
    OneSidedDerivativeReport,
    PiecewisePoly,
    Scale,
    Sum,
    Translate,
    grid_derivative,
    lipschitz_estimate,
    one_sided_derivative_report,
    refine_linear,
    restrict,
    sample,
    spec_from_dict,
    spec_from_json,
    value_range,
)
from .convexity import (
    ConvexityReport,
    DefectBound,
    convexity_defect,
    pointwise_defect,
    uniform_defect,
)
from .transfer import (
    PeriodicOrbit,
    PeriodicOrbitTable,
    SubactionSolution,
    beta_lower_bound,
    calibration_residual,
    max_transfer,
    solve_calibrated,
)
from .sturmian import (
    SturmianCertificate,
    SturmianMeasure,
    antipodal_difference,
    best_sturmian,
    preimage_branch_bound,
    sturmian_certificate,
    sturmian_measure,
    sturmian_word,
)
from .criteria import (
    KAPPA,
    ClassAParams,
    CriterionReport,
    ScanResult,
    TranslateRow,
    check_class_a,
    check_class_b,
    check_kappa,
    check_theorem_sturm,
    scan_translates,
    search_c,
)

__version__ = "0.1.0"
