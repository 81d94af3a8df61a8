#include <doctest.h>

#include <cmath>

#include "garchvi/errors.hpp"
#include "garchvi/eval.hpp"
#include "garchvi/rng.hpp"

using namespace garchvi;

namespace {

ReturnSeries series_of(const std::vector<double>& returns) {
    std::vector<Date> dates;
    Date day{2018, 1, 2};
    for (std::size_t i = 0; i < returns.size(); ++i) {
        dates.push_back(day);
        day = day.plus_days(1);
    }
    return ReturnSeries(std::move(dates), returns);
}

ConstrainedParams garch11(double omega, double alpha, double beta) {
    ConstrainedParams nu;
    nu.omega = omega;
    nu.alpha = {alpha};
    nu.beta = {beta};
    return nu;
}

}  // namespace

TEST_CASE("metric hand values") {
    ModelSpec spec = parse_model("garch(1,1)");
    const auto s = series_of({1.0, 2.0});
    const auto m = compute_metrics(spec, garch11(0.1, 0.2, 0.7), s, 2.5);
    // h = [2.5, 2.05], r^2 = [1, 4]
    CHECK(m.mad == doctest::Approx((1.5 + 1.95) / 2.0).epsilon(1e-14));
    CHECK(m.rmse == doctest::Approx(std::sqrt((1.5 * 1.5 + 1.95 * 1.95) / 2.0)).epsilon(1e-14));
    CHECK(m.qlik ==
          doctest::Approx(0.5 * (std::log(2.5) + 1.0 / 2.5 + std::log(2.05) + 4.0 / 2.05))
              .epsilon(1e-14));
    CHECK(m.nll ==
          doctest::Approx(-log_likelihood(spec, garch11(0.1, 0.2, 0.7), s.returns(), 2.5))
              .epsilon(1e-12));
}

TEST_CASE("metrics with forced unit variance and zero returns") {
    ModelSpec spec = parse_model("arch(1)");
    ConstrainedParams nu;
    nu.omega = 1.0;
    nu.alpha = {0.0};
    const auto m = compute_metrics(spec, nu, series_of({0.0, 0.0}), 1.0);
    CHECK(m.qlik == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    CHECK(m.rmse == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.mad == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("metric definitions agree with a direct pass over the variance path") {
    Rng rng(13);
    ModelSpec spec = parse_model("gjr-garch(1,1,1)");
    const TransformSpec tspec(spec);
    Eigen::VectorXd theta(4);
    for (Eigen::Index i = 0; i < 4; ++i) theta[i] = rng.uniform(-1.0, 1.0);
    const auto nu = inverse_transform(tspec, theta);
    std::vector<double> r(60);
    for (auto& v : r) v = rng.normal() * 1.2;
    const auto s = series_of(r);
    const double h0 = backcast_variance(s);

    const auto m = compute_metrics(spec, nu, s, h0);
    const auto h = variance_recursion(spec, nu, r, h0);
    double se = 0, ad = 0, ql = 0;
    for (std::size_t t = 0; t < r.size(); ++t) {
        const double diff = r[t] * r[t] - h[t];
        se += diff * diff;
        ad += std::abs(diff);
        ql += std::log(h[t]) + r[t] * r[t] / h[t];
    }
    const double n = static_cast<double>(r.size());
    CHECK(m.rmse == doctest::Approx(std::sqrt(se / n)).epsilon(1e-13));
    CHECK(m.mad == doctest::Approx(ad / n).epsilon(1e-13));
    CHECK(m.qlik == doctest::Approx(ql / n).epsilon(1e-13));
    CHECK(m.rmse >= 0.0);
    CHECK(m.mad >= 0.0);
}

TEST_CASE("segment evaluation reuses the train history") {
    ModelSpec spec = parse_model("garch(1,1)");
    const auto nu = garch11(0.2, 0.15, 0.6);
    std::vector<double> r = {0.5, -1.0, 2.0, 0.3, -0.8, 1.1};
    const auto s = series_of(r);
    const double h0 = backcast_variance(std::vector<double>(r.begin(), r.begin() + 4));

    const auto train = compute_metrics_segment(spec, nu, s, 4, Segment::Train, h0);
    const auto test = compute_metrics_segment(spec, nu, s, 4, Segment::Test, h0);
    const auto full = compute_metrics_segment(spec, nu, s, 4, Segment::Full, h0);
    // NLL is additive across the split when the recursion is shared
    CHECK(full.nll == doctest::Approx(train.nll + test.nll).epsilon(1e-12));

    // the test-segment h path continues from the true train history
    const auto h = variance_recursion(spec, nu, r, h0);
    double ql = 0;
    for (std::size_t t = 4; t < r.size(); ++t) ql += std::log(h[t]) + r[t] * r[t] / h[t];
    CHECK(test.qlik == doctest::Approx(ql / 2.0).epsilon(1e-13));
}

TEST_CASE("posterior mean in the constrained space") {
    SUBCASE("constant draws reduce to the single-point transform") {
        const TransformSpec tspec(parse_model("gjr-garch(1,1,1)"));
        Eigen::MatrixXd draws = Eigen::MatrixXd::Zero(5, 4);
        const auto nu = posterior_mean_constrained(draws, tspec);
        CHECK(nu.omega == 1.0);
        CHECK(nu.alpha[0] == 0.5);
        CHECK(nu.gamma[0] == doctest::Approx(0.25).epsilon(1e-15));
        CHECK(nu.beta[0] == doctest::Approx(0.1875).epsilon(1e-15));
    }
    SUBCASE("two symmetric draws in theta_omega average to cosh") {
        const TransformSpec tspec(parse_model("garch(1,1)"));
        Eigen::MatrixXd draws = Eigen::MatrixXd::Zero(2, 3);
        draws(0, 0) = 1.0;
        draws(1, 0) = -1.0;
        const auto nu = posterior_mean_constrained(draws, tspec);
        CHECK(nu.omega == doctest::Approx(1.5430806348152437).epsilon(1e-14));
    }
}

TEST_CASE("deviation vs qml") {
    CHECK(deviation_vs_qml(1.01, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(deviation_vs_qml(3.7, 3.7) == 0.0);
    CHECK(deviation_vs_qml(1966.77, 1966.75) ==
          doctest::Approx(100.0 * (1966.77 / 1966.75 - 1.0)).epsilon(1e-12));
    CHECK(deviation_vs_qml(1966.77, 1966.75) == doctest::Approx(0.00102).epsilon(1e-2));
    CHECK_THROWS_AS(deviation_vs_qml(1.0, 0.0), DivisionByZero);
}

TEST_CASE("metrics from samples") {
    ModelSpec spec = parse_model("garch(1,1)");
    const TransformSpec tspec(spec);
    const auto s = series_of({0.5, -1.0, 2.0, 0.3, -0.8, 1.1});
    const double h0 = backcast_variance(s);

    SUBCASE("identical draws: zero dispersion and both modes agree") {
        Eigen::MatrixXd draws = Eigen::MatrixXd::Zero(4, 3);
        const auto by_draw = metrics_from_samples(spec, draws, tspec, s, 4, Segment::Train, h0,
                                                  MetricsMode::MeanOfMetrics);
        const auto at_mean = metrics_from_samples(spec, draws, tspec, s, 4, Segment::Train, h0,
                                                  MetricsMode::MetricsAtMean);
        CHECK(by_draw.sd.nll == 0.0);
        CHECK(by_draw.sd.rmse == 0.0);
        CHECK(by_draw.mean.nll == doctest::Approx(at_mean.mean.nll).epsilon(1e-12));
        CHECK(by_draw.mean.qlik == doctest::Approx(at_mean.mean.qlik).epsilon(1e-12));
    }
    SUBCASE("two draws match the two-point formulas") {
        Eigen::MatrixXd draws = Eigen::MatrixXd::Zero(2, 3);
        draws(0, 0) = 0.3;
        draws(1, 0) = -0.6;
        const auto summary = metrics_from_samples(spec, draws, tspec, s, 4, Segment::Train, h0,
                                                  MetricsMode::MeanOfMetrics);
        const auto m1 = compute_metrics_segment(
            spec, inverse_transform(tspec, draws.row(0).transpose()), s, 4, Segment::Train, h0);
        const auto m2 = compute_metrics_segment(
            spec, inverse_transform(tspec, draws.row(1).transpose()), s, 4, Segment::Train, h0);
        CHECK(summary.mean.nll == doctest::Approx(0.5 * (m1.nll + m2.nll)).epsilon(1e-13));
        CHECK(summary.sd.nll ==
              doctest::Approx(std::abs(m1.nll - m2.nll) / std::sqrt(2.0)).epsilon(1e-12));
    }
}

TEST_CASE("forecast bands") {
    ModelSpec spec = parse_model("garch(1,1)");
    const TransformSpec tspec(spec);
    const auto history = series_of({0.5, -1.0, 2.0, 0.3});

    SUBCASE("degenerate posterior collapses the band") {
        Eigen::MatrixXd draws = Eigen::MatrixXd::Zero(8, 3);
        const auto band = forecast_bands(spec, draws, tspec, history, 5, 0.95);
        REQUIRE(band.point.size() == 5);
        for (std::size_t k = 0; k < 5; ++k) {
            CHECK(band.lower[k] == doctest::Approx(band.point[k]).epsilon(1e-13));
            CHECK(band.upper[k] == doctest::Approx(band.point[k]).epsilon(1e-13));
            CHECK(band.point[k] > 0.0);
        }
        CHECK(band.dates.front() == history.dates().back().plus_days(1));
    }
    SUBCASE("about five percent of per-draw paths fall outside a 95% band") {
        Rng rng(21);
        const int n = 4000;
        Eigen::MatrixXd draws(n, 3);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < 3; ++j) draws(i, j) = 0.3 * rng.normal();
        const auto band = forecast_bands(spec, draws, tspec, history, 3, 0.95);
        for (int k = 0; k < 3; ++k) {
            int outside = 0;
            for (int i = 0; i < n; ++i) {
                const auto nu = inverse_transform(tspec, draws.row(i).transpose());
                const auto f = forecast_variance(spec, nu, history, 3);
                const double v = f[static_cast<std::size_t>(k)];
                if (v < band.lower[static_cast<std::size_t>(k)] ||
                    v > band.upper[static_cast<std::size_t>(k)])
                    ++outside;
            }
            const double frac = static_cast<double>(outside) / n;
            CHECK(frac > 0.04);
            CHECK(frac < 0.06);
        }
    }
    SUBCASE("bands widen as the level rises") {
        Rng rng(22);
        Eigen::MatrixXd draws(500, 3);
        for (int i = 0; i < 500; ++i)
            for (int j = 0; j < 3; ++j) draws(i, j) = 0.4 * rng.normal();
        const auto narrow = forecast_bands(spec, draws, tspec, history, 4, 0.80);
        const auto wide = forecast_bands(spec, draws, tspec, history, 4, 0.99);
        for (std::size_t k = 0; k < 4; ++k) {
            CHECK(wide.upper[k] - wide.lower[k] >= narrow.upper[k] - narrow.lower[k]);
            CHECK(narrow.lower[k] <= narrow.point[k]);
            CHECK(narrow.point[k] <= narrow.upper[k]);
        }
    }
}

TEST_CASE("qlik at the truth beats perturbed parameters on average" * doctest::timeout(300)) {
    ModelSpec spec = parse_model("garch(1,1)");
    const auto truth = garch11(0.1, 0.1, 0.8);
    const auto perturbed = garch11(0.05, 0.2, 0.7);
    double margin = 0.0;
    for (int seed = 0; seed < 20; ++seed) {
        const auto sim = simulate(spec, truth, 20000, 500 + seed);
        const double h0 = backcast_variance(sim);
        const auto mt = compute_metrics(spec, truth, sim, h0);
        const auto mp = compute_metrics(spec, perturbed, sim, h0);
        margin += mp.qlik - mt.qlik;
    }
    CHECK(margin / 20.0 > 0.0);
}

TEST_CASE("moving average") {
    const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
    const auto ma = moving_average(v, 2);
    REQUIRE(ma.size() == 4);
    CHECK(ma[0] == 1.0);
    CHECK(ma[1] == 1.5);
    CHECK(ma[2] == 2.5);
    CHECK(ma[3] == 3.5);
}
