"""folia: exact + numeric analysis of singular foliations of complex space
induced by polynomial vector fields."""

__version__ = "0.1.0"

from .classify import (
    MembershipVerdict,
    PointAnalysis,
    SeparatrixCandidate,
    Status,
    VerdictLedger,
    a0_evidence,
    classify_point,
    classify_strong,
    classify_weak,
    compute_lp,
)
from .cones import (
    Direction,
    SyzygyIdentity,
    TransversalityVerdict,
    arc_limit_direction,
    certify_transversal,
    falsify_transversal,
    sample_foliation_cone,
    transversality_at,
)
from .context import (
    AlgebraicValue,
    Decision,
    ParamValue,
    Point,
    PointValue,
    SideCondition,
    VarContext,
)
from .dsl import (
    FoliationFile,
    parse_foliation_file,
    parse_point_text,
    parse_slice_text,
    print_foliation_file,
)
from .errors import (
    DeclInvalid,
    FoliaError,
    IntegratorDiverged,
    InvalidFoliation,
    LexError,
    NoCertifiedB,
    ParseError,
    RecheckFailed,
    SemanticError,
)
from .eta import (
    EtaEstimate,
    MetricContext,
    ProductLeafDecl,
    continuity_scan,
    eta_exact_product,
    eta_lower_bound_shoot,
)
from .evaluate import ExtValue, poly_eval
from .factor import factor_split, prepare_factorization
from .foliation import (
    Domain,
    FoliationModel,
    VectorField,
    build_model,
    is_invariant_hypersurface,
    is_invariant_slice,
    restrict,
    saturate,
    singular_set,
)
from .gaussian import GaussianRational
from .gcd import multivariate_gcd, polynomial_gcd
from .integrate import compile_field, integrate_ode
from .pipeline import (
    RunOptions,
    RunResult,
    base_model_of,
    push_forward,
    recheck_run,
    run_pipeline,
)
from .polynomial import Polynomial
from .report import build_report, build_scan_report, emit_report
from .theorems import (
    HypothesisCheck,
    PropertyWitness,
    TheoremReport,
    TransversalTypeReport,
    consistency_check,
    continuity_via_mixed,
    continuity_via_strong_order,
    continuity_via_top_order,
    extension_report,
    property_L,
    property_M,
    transversal_type_at,
)
from .variety import (
    ConeAtPoint,
    Slice,
    Variety,
    c4_cone,
    contains_point,
    solve_variety,
)

__all__ = [
    "AlgebraicValue",
    "ConeAtPoint",
    "Decision",
    "DeclInvalid",
    "Direction",
    "Domain",
    "EtaEstimate",
    "ExtValue",
    "FoliaError",
    "FoliationFile",
    "FoliationModel",
    "GaussianRational",
    "HypothesisCheck",
    "IntegratorDiverged",
    "InvalidFoliation",
    "LexError",
    "MembershipVerdict",
    "MetricContext",
    "NoCertifiedB",
    "ParamValue",
    "ParseError",
    "Point",
    "PointAnalysis",
    "PointValue",
    "Polynomial",
    "ProductLeafDecl",
    "PropertyWitness",
    "RecheckFailed",
    "RunOptions",
    "RunResult",
    "SemanticError",
    "SeparatrixCandidate",
    "SideCondition",
    "Slice",
    "Status",
    "SyzygyIdentity",
    "TheoremReport",
    "TransversalTypeReport",
    "TransversalityVerdict",
    "VarContext",
    "Variety",
    "VectorField",
    "VerdictLedger",
    "a0_evidence",
    "arc_limit_direction",
    "base_model_of",
    "build_model",
    "build_report",
    "build_scan_report",
    "c4_cone",
    "certify_transversal",
    "classify_point",
    "classify_strong",
    "classify_weak",
    "compile_field",
    "compute_lp",
    "consistency_check",
    "contains_point",
    "continuity_scan",
    "continuity_via_mixed",
    "continuity_via_strong_order",
    "continuity_via_top_order",
    "emit_report",
    "eta_exact_product",
    "eta_lower_bound_shoot",
    "extension_report",
    "factor_split",
    "falsify_transversal",
    "is_invariant_hypersurface",
    "is_invariant_slice",
    "multivariate_gcd",
    "parse_foliation_file",
    "parse_point_text",
    "parse_slice_text",
    "poly_eval",
    "polynomial_gcd",
    "prepare_factorization",
    "print_foliation_file",
    "property_L",
    "property_M",
    "push_forward",
    "recheck_run",
    "restrict",
    "run_pipeline",
    "sample_foliation_cone",
    "saturate",
    "singular_set",
    "solve_variety",
    "transversal_type_at",
    "transversality_at",
    "__version__",
]
