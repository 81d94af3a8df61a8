#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "garchvi/models.hpp"
#include "garchvi/timeseries.hpp"
#include "garchvi/transforms.hpp"

namespace garchvi {

/// The four performance metrics of the evaluation protocol. Squared returns
/// proxy the unobserved conditional variance for RMSE/MAD/QLIK.
struct MetricSet {
    double nll = 0.0;   // -log likelihood (Gaussian constant included)
    double rmse = 0.0;  // sqrt(mean((r^2 - h)^2))
    double mad = 0.0;   // mean |r^2 - h|
    double qlik = 0.0;  // mean(log h + r^2/h)
};

enum class Segment { Train, Test, Full };

/// Metrics over the whole series with the given pre-sample variance.
MetricSet compute_metrics(const ModelSpec& spec, const ConstrainedParams& nu,
                          const ReturnSeries& series, double h_init);

/// Split-aware evaluation: the recursion runs over the full series (test h_t
/// inherits the true train history) and only the requested segment is scored.
/// h_init should be the back-cast of the training segment.
MetricSet compute_metrics_segment(const ModelSpec& spec, const ConstrainedParams& nu,
                                  const ReturnSeries& full_series, std::size_t train_length,
                                  Segment segment, double h_init);

/// Mean of the inverse-transformed posterior draws, the Bayesian point
/// estimate in the constrained space.
ConstrainedParams posterior_mean_constrained(const Eigen::MatrixXd& theta_samples,
                                             const TransformSpec& tspec);

/// Componentwise standard deviation of the inverse-transformed draws, in
/// canonical parameter order.
Eigen::VectorXd posterior_sd_constrained(const Eigen::MatrixXd& theta_samples,
                                         const TransformSpec& tspec);

/// Percent deviation from the QML benchmark: 100 (m / m_qml - 1).
double deviation_vs_qml(double metric_estimator, double metric_qml);

enum class MetricsMode { MeanOfMetrics, MetricsAtMean };

struct MetricSummary {
    MetricSet mean;
    MetricSet sd;  // zero in MetricsAtMean mode or with a single draw
};

/// Posterior metrics, either averaged over per-draw metric evaluations
/// (mean +- sd) or evaluated once at the transformed posterior mean.
MetricSummary metrics_from_samples(const ModelSpec& spec, const Eigen::MatrixXd& theta_samples,
                                   const TransformSpec& tspec, const ReturnSeries& full_series,
                                   std::size_t train_length, Segment segment, double h_init,
                                   MetricsMode mode);

struct ForecastBand {
    std::vector<Date> dates;
    std::vector<double> point;  // posterior mean of the per-draw forecasts
    std::vector<double> lower;
    std::vector<double> upper;
};

/// Per-draw variance forecasts summarized into a point path and empirical
/// (1-level)/2 and 1-(1-level)/2 quantile bands.
ForecastBand forecast_bands(const ModelSpec& spec, const Eigen::MatrixXd& theta_samples,
                            const TransformSpec& tspec, const ReturnSeries& history, int horizon,
                            double level);

/// Trailing moving average with the given window; entry i averages the last
/// min(i+1, window) values. Used to smooth lower-bound traces.
std::vector<double> moving_average(const std::vector<double>& values, std::size_t window);

}  // namespace garchvi
