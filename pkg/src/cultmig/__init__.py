"""Cultural and geodesic distance between countries and their link to migration."""

__version__ = "0.1.0"

from .analysis import (  # noqa: E402
    CultureMigrationAnalysis,
    ProximityClass,
    ProximityStratifier,
    ProximityThresholds,
    classify_proximity,
    run_analysis,
    stratification_thresholds,
)
from .culture import (  # noqa: E402
    DEFAULT_OVERRIDES,
    CultureProfile,
    ProfileOverride,
    apply_overrides,
    cultural_delta,
    cultural_distance,
)
from .flows import StockFlowTransformer, build_flow_matrix, estimate_annual_flow, normalize_flow  # noqa: E402
from .geodesy import WGS84, CapitalRegistry, Ellipsoid, GeoPoint, capital_distance_km, inverse_geodesic  # noqa: E402
from .ingest import load_corpus, validate_corpus  # noqa: E402
from .stats import (  # noqa: E402
    mann_whitney_u,
    quantile,
    robust_summary,
    significance_code,
    wilcoxon_signed_rank,
)

__all__ = [
    "CapitalRegistry",
    "CultureMigrationAnalysis",
    "CultureProfile",
    "DEFAULT_OVERRIDES",
    "Ellipsoid",
    "GeoPoint",
    "ProfileOverride",
    "ProximityClass",
    "ProximityStratifier",
    "ProximityThresholds",
    "StockFlowTransformer",
    "WGS84",
    "apply_overrides",
    "build_flow_matrix",
    "capital_distance_km",
    "classify_proximity",
    "cultural_delta",
    "cultural_distance",
    "estimate_annual_flow",
    "inverse_geodesic",
    "load_corpus",
    "mann_whitney_u",
    "normalize_flow",
    "quantile",
    "robust_summary",
    "run_analysis",
    "significance_code",
    "stratification_thresholds",
    "validate_corpus",
    "wilcoxon_signed_rank",
]
