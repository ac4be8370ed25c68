"""Tail dependence between groups of components of a multivariate vector.

The package computes exact group tail-dependence functionals for several
model families, simulates them, estimates the same quantities from data with
moment-based plug-in estimators (known margins or ranks), validates the
estimators' limit laws by Monte Carlo, and runs a block-maxima analysis
pipeline for financial return data.
"""

from .core import (
    CLAMP,
    DegenerateError,
    GrouptailError,
    IndexPair,
    Margins,
    PowerUniform,
    Provenance,
    PseudoSample,
    RawSample,
    StdNormal,
    Uniform01,
    UnitFrechet,
    ValidationError,
    group_max,
    make_index_pair,
    margin_from_dict,
    pit_transform,
    rank_transform,
)
from .estimate import (
    Estimate,
    eps_pair_estimate,
    eps_scaled_estimate,
    l_pair_estimate,
    lambda_estimate,
    odds,
    stdf_estimate,
    variance_formula,
)
from .models import (
    GaussianModel,
    LogisticModel,
    M4Model,
    MinFactorModel,
    TailFunctionals,
    eta_from_pairwise,
    lambda_from_parts,
    model_from_dict,
)
from .pipeline import (
    BlockMaxima,
    GroupConfig,
    PairAnalysis,
    PriceSeries,
    ReturnTable,
    analyze,
    default_group_config,
    format_analysis_table,
    load_prices,
    merge_prices,
    monthly_block_maxima,
    neg_log_returns,
)
from .simulate import (
    Seed,
    SimOutput,
    sample,
    sample_gaussian,
    sample_logistic,
    sample_m4,
    sample_minfactor,
    unit_frechet,
)
from .validate import (
    ConsistencyReport,
    EpsPairTarget,
    EpsScaledTarget,
    LPairTarget,
    MCConfig,
    MCReport,
    StdfTarget,
    SurvivalCheck,
    config_from_dict,
    mc_consistency,
    mc_normality,
    mc_survival_check,
    theoretical_value,
)

__version__ = "0.1.0"
