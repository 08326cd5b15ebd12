"""prodtech: production technologies with endogenous competing demand.

Deterministic fixed-proportions and CES surfaces, residual capacities under
competing output demand, expected-output surfaces over stochastic demand
(Monte Carlo / kink-split quadrature / exact closed form), and geometric
diagnostics (isoquant traces, returns-to-scale profiles).
"""

__version__ = "0.1.0"

from .demand import (
    DemandModel,
    SampleStream,
    amh_cdf,
    amh_pdf,
    sample_amh_pair,
    sample_demand,
)
from .errors import (
    ConfigError,
    DegenerateTechnology,
    DimensionMismatch,
    EmptyLevelSet,
    LevelNotBracketed,
    NonMonotoneRay,
    NonPositiveInput,
    ParamDomain,
    ProdtechError,
    UnknownFigure,
    UnsupportedDimension,
)
from .expectation import (
    ExpectationEstimate,
    expected_output_closed_form,
    expected_output_mc,
    expected_output_quadrature,
)
from .geometry import (
    IsoquantTrace,
    RtsClass,
    RtsLabel,
    ScaleProfile,
    TraceMethod,
    classify_rts,
    scale_profile,
    trace_isoquant_analytic,
    trace_isoquant_grid,
    trace_isoquant_rayscan,
)
from .surfaces import (
    CesSurface,
    ExpectedOutputSurface,
    LeontiefSurface,
    ResidualLeontiefSurface,
)
from .technology import (
    CesParams,
    ClampPolicy,
    InputBundle,
    TechnologyMatrix,
    ces_eval,
    leontief_eval,
    residual_leontief,
)

__all__ = [
    "__version__",
    # technology
    "ClampPolicy", "InputBundle", "TechnologyMatrix", "CesParams",
    "ces_eval", "leontief_eval", "residual_leontief",
    # demand
    "DemandModel", "SampleStream", "amh_cdf", "amh_pdf",
    "sample_amh_pair", "sample_demand",
    # expectation
    "ExpectationEstimate", "expected_output_mc",
    "expected_output_quadrature", "expected_output_closed_form",
    # geometry
    "TraceMethod", "IsoquantTrace", "ScaleProfile", "RtsLabel", "RtsClass",
    "trace_isoquant_analytic", "trace_isoquant_rayscan", "trace_isoquant_grid",
    "scale_profile", "classify_rts",
    # surfaces
    "LeontiefSurface", "CesSurface", "ResidualLeontiefSurface",
    "ExpectedOutputSurface",
    # errors
    "ProdtechError", "ParamDomain", "NonPositiveInput", "DimensionMismatch",
    "DegenerateTechnology", "UnsupportedDimension", "LevelNotBracketed",
    "NonMonotoneRay", "EmptyLevelSet", "ConfigError", "UnknownFigure",
]
