"""Algorithm portfolio evaluation via an inverted continuous IRT model.

The package fits a continuous response model to a matrix of algorithm
performance across test instances, treating algorithms as items and
instances as examinees. From the fitted parameters it derives algorithm
consistency, anomalousness and difficulty limits, maps strengths and
weaknesses along the instance-difficulty spectrum, scores model fit, and
builds cross-validated portfolios.
"""

from .crm import (
    CrmModel,
    FitConfig,
    Item,
    ItemParameters,
    PriorConfig,
    TraitPosterior,
    density,
    e_step,
    fit,
    heatmap_grid,
    latent_trait,
    log_likelihood,
    m_step,
    predict,
)
from .errors import (
    AirtError,
    AirtFitWarning,
    ConfigurationError,
    ConsistencyError,
    DegenerateItemError,
    DegenerateScaleError,
    FitError,
    LoadError,
    NumericalError,
    ParseError,
    TransformError,
)
from .goodness import (
    EffectivenessCurve,
    GoodnessReport,
    ResidualSet,
    aucdf,
    effectiveness,
    goodness_report,
    predicted_matrix,
    residuals,
)
from .ingest import (
    PerformanceMatrix,
    ScenarioDescriptor,
    TransformConfig,
    TransformedResponses,
    default_transform,
    inverse_logit,
    load_csv,
    load_scenario,
    transform_performance,
)
from .metrics import (
    CONSISTENCY_SENTINEL,
    AlgorithmMetrics,
    DatasetDifficulty,
    algorithm_metrics,
    dataset_difficulty,
)
from .portfolio import (
    PortfolioComparison,
    ShapleyValues,
    cv_compare,
    performance_gap,
    shapley_values,
    topset_ranking,
    train_rankings,
    win_counts,
)
from .trait_analysis import (
    StrengthReport,
    TraitCurveSet,
    airt_portfolio,
    fit_curves,
    strengths_weaknesses,
)

__version__ = "0.1.0"

__all__ = [
    "AirtError", "AirtFitWarning", "AlgorithmMetrics", "CONSISTENCY_SENTINEL",
    "ConfigurationError", "ConsistencyError", "CrmModel", "DatasetDifficulty",
    "DegenerateItemError", "DegenerateScaleError", "EffectivenessCurve",
    "FitConfig", "FitError", "GoodnessReport", "Item", "ItemParameters",
    "LoadError", "NumericalError", "ParseError", "PerformanceMatrix",
    "PortfolioComparison", "PriorConfig", "ResidualSet", "ScenarioDescriptor",
    "ShapleyValues", "StrengthReport", "TraitCurveSet", "TraitPosterior",
    "TransformConfig", "TransformError", "TransformedResponses",
    "aucdf", "airt_portfolio", "algorithm_metrics", "cv_compare",
    "dataset_difficulty", "default_transform", "density", "e_step",
    "effectiveness", "fit", "fit_curves", "goodness_report", "heatmap_grid",
    "inverse_logit", "latent_trait", "load_csv", "load_scenario",
    "log_likelihood", "m_step", "performance_gap", "predict",
    "predicted_matrix", "residuals", "shapley_values", "strengths_weaknesses",
    "topset_ranking", "train_rankings", "transform_performance", "win_counts",
]
