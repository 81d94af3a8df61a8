"""GARCH-family volatility models with QML, Metropolis-Hastings, and
fixed-form Gaussian variational inference (BBVI, QBVI, MGVB, EMGVB)."""

from ._core import (  # noqa: F401
    Chain,
    ConstrainedParams,
    DistKind,
    Family,
    FitResult,
    ForecastBand,
    GarchviError,
    InnovationDist,
    MetricSet,
    MetricSummary,
    MetricsMode,
    MhConfig,
    ModelSpec,
    OptimizerConfig,
    OptimizerKind,
    Prior,
    QmlConfig,
    QmlResult,
    ReturnSeries,
    Segment,
    TransformSpec,
    VariancePath,
    VariationalParams,
    __version__,
    backcast_variance,
    compute_metrics,
    compute_metrics_segment,
    deviation_vs_qml,
    dist_shape_inverse,
    figarch_weights,
    fit_mh,
    fit_qml,
    fit_vi,
    fit_vi_target,
    forecast_bands,
    forecast_variance,
    forward_transform,
    innovation_logpdf,
    innovation_mean_abs,
    inverse_transform,
    inverse_transform_vec,
    load_returns,
    log_likelihood,
    log_likelihood_at,
    logistic,
    metrics_from_samples,
    model_name,
    moving_average,
    numerical_gradient,
    pack_params,
    parameter_count,
    parameter_names,
    parse_model,
    posterior_mean_constrained,
    posterior_sd_constrained,
    prices_to_returns,
    qml_objective,
    qml_objective_at,
    simulate,
    split_train_test,
    unpack_params,
    validate_constraints,
    variance_path,
    variance_recursion,
    write_returns,
)
