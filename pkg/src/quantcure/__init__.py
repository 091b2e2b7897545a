"""Bayesian quantile regression for survival data with a cure fraction.

The lifetime model is a generalized Gompertz distribution whose shape
is allowed to go negative, which caps the cumulative hazard and leaves
a point mass of never-failing subjects.  Regression enters through the
q-th quantile of the susceptible sub-population (or directly through
the power parameter), and inference runs on an adaptive random-walk
Metropolis sampler.  A simulation harness measures bias and interval
coverage over repeated synthetic datasets.
"""

from .errors import (
    ChainConfigError,
    DataLoadError,
    HazardOverflowError,
    OutputError,
    ParameterDomainError,
    PrecisionLossError,
    QuantcureError,
    ScenarioError,
    StudyError,
)
from .fit import (
    DEFAULT_Q_GRID,
    CurveTable,
    FitConfig,
    QuantileFit,
    cure_fraction_draws,
    fit_quantile_grid,
    max_crossing_violation,
    quantile_curves,
    quantile_draws,
)
from .gompertz import (
    CureFraction,
    DGGQuantileParams,
    GGParams,
    cure_mass,
    gompertz_cumhazard,
    log1mexp,
    log_proper_mass,
    logcdf,
    logpdf,
    logsf,
    quantile,
    susceptible_quantile,
    susceptible_sf,
    theta_from_quantile,
)
from .io import EncodingReport, load_csv, write_outputs
from .km import KMCurve, grouped_kaplan_meier, kaplan_meier
from .mcmc import (
    ChainConfig,
    ChainDiagnostics,
    CredibleInterval,
    IntervalKind,
    PosteriorSample,
    adaptive_metropolis,
    effective_sample_size,
    equal_tail_interval,
    hpd_interval,
    posterior_mean,
    run_chains,
    split_rhat,
)
from .model import (
    LinkMode,
    ParameterVector,
    PosteriorTarget,
    PriorSpec,
    SurvivalDataset,
    linear_predictor,
    log_likelihood,
    log_posterior,
    log_prior,
)
from .simulate import (
    SimScenario,
    StudySummary,
    calibrate_tau,
    generate_dataset,
    run_study,
    summarize_replicates,
)

try:
    from importlib.metadata import version as _version

    __version__ = _version("quantcure")
except Exception:
    __version__ = "0.0.0"

__all__ = [
    "__version__",
    "QuantcureError",
    "ParameterDomainError",
    "PrecisionLossError",
    "HazardOverflowError",
    "ChainConfigError",
    "ScenarioError",
    "StudyError",
    "DataLoadError",
    "OutputError",
    "GGParams",
    "DGGQuantileParams",
    "CureFraction",
    "log1mexp",
    "gompertz_cumhazard",
    "logcdf",
    "logsf",
    "logpdf",
    "log_proper_mass",
    "cure_mass",
    "quantile",
    "susceptible_sf",
    "susceptible_quantile",
    "theta_from_quantile",
    "LinkMode",
    "SurvivalDataset",
    "ParameterVector",
    "PriorSpec",
    "PosteriorTarget",
    "linear_predictor",
    "log_likelihood",
    "log_prior",
    "log_posterior",
    "ChainConfig",
    "ChainDiagnostics",
    "PosteriorSample",
    "CredibleInterval",
    "IntervalKind",
    "adaptive_metropolis",
    "run_chains",
    "posterior_mean",
    "hpd_interval",
    "equal_tail_interval",
    "effective_sample_size",
    "split_rhat",
    "DEFAULT_Q_GRID",
    "FitConfig",
    "QuantileFit",
    "CurveTable",
    "fit_quantile_grid",
    "cure_fraction_draws",
    "quantile_draws",
    "quantile_curves",
    "max_crossing_violation",
    "SimScenario",
    "StudySummary",
    "calibrate_tau",
    "generate_dataset",
    "summarize_replicates",
    "run_study",
    "KMCurve",
    "kaplan_meier",
    "grouped_kaplan_meier",
    "EncodingReport",
    "load_csv",
    "write_outputs",
]
