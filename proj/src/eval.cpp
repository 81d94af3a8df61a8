#include "garchvi/eval.hpp"

#include <algorithm>
#include <cmath>

#include "garchvi/errors.hpp"

namespace garchvi {

namespace {

MetricSet metrics_over_range(const ModelSpec& spec, const ConstrainedParams& nu,
                             const ReturnSeries& series, double h_init, std::size_t begin,
                             std::size_t end) {
    if (begin >= end || end > series.size()) throw DimensionMismatch("bad metric segment");
    const VariancePath path = variance_path(spec, nu, series, h_init);
    MetricSet m;
    double se = 0.0, ad = 0.0, ql = 0.0, ll = 0.0;
    for (std::size_t t = begin; t < end; ++t) {
        const double r2 = series.returns()[t] * series.returns()[t];
        const double h = path.h[t];
        const double diff = r2 - h;
        se += diff * diff;
        ad += std::abs(diff);
        ql += std::log(h) + r2 / h;
        ll += path.loglik_per_obs[t];
    }
    const auto n = static_cast<double>(end - begin);
    m.rmse = std::sqrt(se / n);
    m.mad = ad / n;
    m.qlik = ql / n;
    m.nll = -ll;
    return m;
}

/// Empirical quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double prob) {
    if (values.empty()) throw DimensionMismatch("quantile of empty sample");
    std::sort(values.begin(), values.end());
    const double idx = prob * (static_cast<double>(values.size()) - 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(idx));
    const auto hi = static_cast<std::size_t>(std::ceil(idx));
    const double w = idx - static_cast<double>(lo);
    return (1.0 - w) * values[lo] + w * values[hi];
}

}  // namespace

MetricSet compute_metrics(const ModelSpec& spec, const ConstrainedParams& nu,
                          const ReturnSeries& series, double h_init) {
    return metrics_over_range(spec, nu, series, h_init, 0, series.size());
}

MetricSet compute_metrics_segment(const ModelSpec& spec, const ConstrainedParams& nu,
                                  const ReturnSeries& full_series, std::size_t train_length,
                                  Segment segment, double h_init) {
    if (train_length == 0 || train_length > full_series.size())
        throw DimensionMismatch("train length out of range");
    switch (segment) {
        case Segment::Train:
            return metrics_over_range(spec, nu, full_series, h_init, 0, train_length);
        case Segment::Test:
            return metrics_over_range(spec, nu, full_series, h_init, train_length,
                                      full_series.size());
        case Segment::Full:
            return metrics_over_range(spec, nu, full_series, h_init, 0, full_series.size());
    }
    throw DimensionMismatch("bad segment");
}

ConstrainedParams posterior_mean_constrained(const Eigen::MatrixXd& theta_samples,
                                             const TransformSpec& tspec) {
    const auto n = theta_samples.rows();
    if (n < 1) throw DimensionMismatch("need at least one posterior draw");
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(tspec.dim());
    for (Eigen::Index i = 0; i < n; ++i)
        acc += inverse_transform_vec(tspec, theta_samples.row(i).transpose());
    acc /= static_cast<double>(n);
    return unpack_params(tspec, acc);
}

Eigen::VectorXd posterior_sd_constrained(const Eigen::MatrixXd& theta_samples,
                                         const TransformSpec& tspec) {
    const auto n = theta_samples.rows();
    if (n < 2) throw DimensionMismatch("need at least two posterior draws");
    Eigen::MatrixXd values(n, tspec.dim());
    for (Eigen::Index i = 0; i < n; ++i)
        values.row(i) = inverse_transform_vec(tspec, theta_samples.row(i).transpose()).transpose();
    const Eigen::RowVectorXd mean = values.colwise().mean();
    const Eigen::RowVectorXd var =
        (values.rowwise() - mean).array().square().colwise().sum() / static_cast<double>(n - 1);
    return var.array().sqrt().transpose();
}

double deviation_vs_qml(double metric_estimator, double metric_qml) {
    if (metric_qml == 0.0) throw DivisionByZero("QML metric is zero");
    return 100.0 * (metric_estimator / metric_qml - 1.0);
}

MetricSummary metrics_from_samples(const ModelSpec& spec, const Eigen::MatrixXd& theta_samples,
                                   const TransformSpec& tspec, const ReturnSeries& full_series,
                                   std::size_t train_length, Segment segment, double h_init,
                                   MetricsMode mode) {
    const auto n = theta_samples.rows();
    if (n < 1) throw DimensionMismatch("need at least one posterior draw");

    MetricSummary summary;
    if (mode == MetricsMode::MetricsAtMean) {
        const ConstrainedParams nu = posterior_mean_constrained(theta_samples, tspec);
        summary.mean =
            compute_metrics_segment(spec, nu, full_series, train_length, segment, h_init);
        return summary;
    }

    Eigen::MatrixXd per_draw(n, 4);
    for (Eigen::Index i = 0; i < n; ++i) {
        const ConstrainedParams nu = inverse_transform(tspec, theta_samples.row(i).transpose());
        const MetricSet m =
            compute_metrics_segment(spec, nu, full_series, train_length, segment, h_init);
        per_draw(i, 0) = m.nll;
        per_draw(i, 1) = m.rmse;
        per_draw(i, 2) = m.mad;
        per_draw(i, 3) = m.qlik;
    }
    const Eigen::RowVectorXd mean = per_draw.colwise().mean();
    Eigen::RowVectorXd sd = Eigen::RowVectorXd::Zero(4);
    if (n > 1)
        sd = ((per_draw.rowwise() - mean).array().square().colwise().sum() /
              static_cast<double>(n - 1))
                 .sqrt();
    summary.mean = {mean[0], mean[1], mean[2], mean[3]};
    summary.sd = {sd[0], sd[1], sd[2], sd[3]};
    return summary;
}

ForecastBand forecast_bands(const ModelSpec& spec, const Eigen::MatrixXd& theta_samples,
                            const TransformSpec& tspec, const ReturnSeries& history, int horizon,
                            double level) {
    const auto n = theta_samples.rows();
    if (n < 1) throw DimensionMismatch("need at least one posterior draw");
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    if (!(level > 0.0 && level < 1.0)) throw ConfigError("level must be in (0,1)");

    Eigen::MatrixXd paths(n, horizon);
    for (Eigen::Index i = 0; i < n; ++i) {
        const ConstrainedParams nu = inverse_transform(tspec, theta_samples.row(i).transpose());
        const auto f = forecast_variance(spec, nu, history, horizon);
        for (int k = 0; k < horizon; ++k) paths(i, k) = f[static_cast<std::size_t>(k)];
    }

    ForecastBand band;
    band.dates.reserve(static_cast<std::size_t>(horizon));
    Date day = history.dates().back();
    const double lo_p = 0.5 * (1.0 - level);
    for (int k = 0; k < horizon; ++k) {
        day = day.plus_days(1);
        band.dates.push_back(day);
        std::vector<double> column(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) column[static_cast<std::size_t>(i)] = paths(i, k);
        band.point.push_back(paths.col(k).mean());
        band.lower.push_back(quantile(column, lo_p));
        band.upper.push_back(quantile(column, 1.0 - lo_p));
    }
    return band;
}

std::vector<double> moving_average(const std::vector<double>& values, std::size_t window) {
    if (window == 0) throw ConfigError("window must be >= 1");
    std::vector<double> out(values.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        acc += values[i];
        if (i >= window) acc -= values[i - window];
        out[i] = acc / static_cast<double>(std::min(i + 1, window));
    }
    return out;
}

}  // namespace garchvi
