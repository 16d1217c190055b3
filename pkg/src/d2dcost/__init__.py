"""Cost analysis of D2D-assisted distributed storage with periodic repair."""

from .model import (
    CodeConstraintError,
    CodeFamily,
    CodeSpec,
    CostBreakdown,
    DEFAULT_PARAMS,
    NetworkParams,
    Scheme,
    binomial_pmf,
    derive_code,
    poisson_occupancy,
)
from .analytic import (
    CostQuery,
    download_cost,
    hybrid_download_cost,
    hybrid_repair_cost,
    hypoexp_survival,
    limit_cost_infinity,
    limit_cost_zero,
    lrc_repair_cost,
    overall_cost,
    p_d2d,
    partial_fraction_weight,
    repair_cost,
    repair_cost_bs_only,
    request_phase_pdf,
)
from .incoming import (
    ChainConfig,
    StationaryDist,
    effective_rate,
    generator,
    incoming_download_cost,
    incoming_overall_cost,
    incoming_repair_cost,
    stationary,
    transition_matrix,
)
from .search import (
    MinCostPoint,
    SearchSpec,
    delta_max,
    delta_opt,
    enumerate_codes,
    min_cost_curve,
)
from .simulator import (
    RequestModel,
    SimConfig,
    SimResult,
    run,
)

__all__ = [
    "ChainConfig",
    "CodeConstraintError",
    "CodeFamily",
    "CodeSpec",
    "CostBreakdown",
    "CostQuery",
    "DEFAULT_PARAMS",
    "MinCostPoint",
    "NetworkParams",
    "RequestModel",
    "Scheme",
    "SearchSpec",
    "SimConfig",
    "SimResult",
    "StationaryDist",
    "binomial_pmf",
    "delta_max",
    "delta_opt",
    "derive_code",
    "download_cost",
    "effective_rate",
    "enumerate_codes",
    "generator",
    "hybrid_download_cost",
    "hybrid_repair_cost",
    "hypoexp_survival",
    "incoming_download_cost",
    "incoming_overall_cost",
    "incoming_repair_cost",
    "limit_cost_infinity",
    "limit_cost_zero",
    "lrc_repair_cost",
    "min_cost_curve",
    "overall_cost",
    "p_d2d",
    "partial_fraction_weight",
    "poisson_occupancy",
    "repair_cost",
    "repair_cost_bs_only",
    "request_phase_pdf",
    "run",
    "stationary",
    "transition_matrix",
]

__version__ = "0.1.0"
