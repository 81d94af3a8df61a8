#include <doctest.h>

#include <cmath>

#include "garchvi/errors.hpp"
#include "garchvi/models.hpp"
#include "garchvi/vi.hpp"

using namespace garchvi;

namespace {

VariationalParams unit_diag(int d) {
    return VariationalParams::diag(Eigen::VectorXd::Zero(d), Eigen::VectorXd::Ones(d));
}

OptimizerConfig config_for(OptimizerKind kind) {
    OptimizerConfig cfg;
    cfg.optimizer = kind;
    return cfg;
}

/// d-dimensional conjugate stub: likelihood -n/2 |theta - y_bar|^2 up to a
/// constant, so the posterior under the tau-prior is Gaussian with precision
/// (1/tau + n) I.
struct ConjugateTarget {
    Eigen::VectorXd y_bar;
    double n = 10.0;
    double tau = 1.0;

    LogLikFn loglik() const {
        const Eigen::VectorXd yb = y_bar;
        const double nn = n;
        return [yb, nn](const Eigen::VectorXd& theta) {
            return -0.5 * nn * (theta - yb).squaredNorm();
        };
    }
    Eigen::VectorXd posterior_mean() const { return y_bar * (n / (1.0 / tau + n)); }
    double posterior_var() const { return 1.0 / (1.0 / tau + n); }
};

}  // namespace

TEST_CASE("gaussian log density") {
    CHECK(gaussian_log_density(Eigen::VectorXd::Zero(1), unit_diag(1)) ==
          doctest::Approx(-0.9189385332046727).epsilon(1e-13));
    CHECK(gaussian_log_density(Eigen::VectorXd::Zero(2), unit_diag(2)) ==
          doctest::Approx(-1.8378770664093453).epsilon(1e-13));

    auto z = VariationalParams::diag(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, 4.0));
    Eigen::VectorXd theta(1);
    theta << 2.0;
    CHECK(gaussian_log_density(theta, z) == doctest::Approx(-2.112085713764618).epsilon(1e-13));

    SUBCASE("full covariance agrees with the diagonal on a diagonal matrix") {
        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(2, 2);
        cov(0, 0) = 0.7;
        cov(1, 1) = 2.3;
        auto full = VariationalParams::full(Eigen::VectorXd::Zero(2), cov);
        auto diag = VariationalParams::diag(Eigen::VectorXd::Zero(2),
                                            (Eigen::VectorXd(2) << 0.7, 2.3).finished());
        Eigen::VectorXd t(2);
        t << 0.4, -1.1;
        CHECK(gaussian_log_density(t, full) ==
              doctest::Approx(gaussian_log_density(t, diag)).epsilon(1e-13));
    }
    SUBCASE("singular covariance rejected") {
        VariationalParams z2;
        z2.mu = Eigen::VectorXd::Zero(2);
        z2.diagonal = false;
        z2.cov = Eigen::MatrixXd::Ones(2, 2);  // rank 1
        CHECK_THROWS_AS(gaussian_log_density(Eigen::VectorXd::Zero(2), z2), SingularCovariance);
    }
}

TEST_CASE("sample_posterior") {
    SUBCASE("degenerate covariance collapses onto the mean") {
        auto z = VariationalParams::diag((Eigen::VectorXd(2) << 1.5, -0.5).finished(),
                                         Eigen::VectorXd::Constant(2, 1e-20));
        Rng rng(1);
        const auto draws = sample_posterior(z, 100, rng);
        for (int i = 0; i < draws.rows(); ++i) {
            CHECK(std::abs(draws(i, 0) - 1.5) < 1e-8);
            CHECK(std::abs(draws(i, 1) + 0.5) < 1e-8);
        }
    }
    SUBCASE("clt bounds at n = 1e5") {
        Rng rng(2);
        const auto draws = sample_posterior(unit_diag(1), 100000, rng);
        const double mean = draws.col(0).mean();
        const double var = (draws.col(0).array() - mean).square().mean();
        CHECK(std::abs(mean) < 4.0 / std::sqrt(100000.0));
        CHECK(var == doctest::Approx(1.0).epsilon(0.05));
    }
    SUBCASE("identical seeds give identical draws") {
        Rng a(33), b(33);
        Eigen::MatrixXd cov(2, 2);
        cov << 1.0, 0.4, 0.4, 0.8;
        auto z = VariationalParams::full(Eigen::VectorXd::Zero(2), cov);
        const auto da = sample_posterior(z, 50, a);
        const auto db = sample_posterior(z, 50, b);
        CHECK((da - db).norm() == 0.0);
    }
}

TEST_CASE("h function") {
    SUBCASE("q equal to the prior and zero likelihood cancels exactly") {
        const Prior prior{1.0};
        const auto zero = [](const Eigen::VectorXd&) { return 0.0; };
        Rng rng(3);
        const auto draws = sample_posterior(unit_diag(3), 20, rng);
        for (int i = 0; i < draws.rows(); ++i)
            CHECK(h_function(draws.row(i), unit_diag(3), prior, zero) ==
                  doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    }
    SUBCASE("prior and q terms cancel at theta = 0 under matching scales") {
        const Prior prior{1.0};
        const auto c_lik = [](const Eigen::VectorXd&) { return -7.25; };
        CHECK(h_function(Eigen::VectorXd::Zero(2), unit_diag(2), prior, c_lik) ==
              doctest::Approx(-7.25).epsilon(1e-13));
    }
    SUBCASE("garch composition at theta = 0") {
        ModelSpec spec = parse_model("garch(1,1)");
        std::vector<Date> dates = {Date{2018, 1, 2}, Date{2018, 1, 3}};
        const ReturnSeries series(dates, {1.0, 2.0});
        const TransformSpec tspec(spec);
        const auto loglik = make_garch_loglik(tspec, series);
        ConstrainedParams nu;
        nu.omega = 1.0;
        nu.alpha = {0.5};
        nu.beta = {0.25};
        const double expected = log_likelihood(spec, nu, series.returns(), 2.5);
        CHECK(h_function(Eigen::VectorXd::Zero(3), unit_diag(3), Prior{1.0}, loglik) ==
              doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("estimate_lb") {
    const Prior prior{1.0};
    SUBCASE("q = prior, zero likelihood: exactly zero for any n") {
        Rng rng(5);
        const auto zero = [](const Eigen::VectorXd&) { return 0.0; };
        CHECK(estimate_lb(unit_diag(2), prior, zero, 7, rng) ==
              doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    }
    SUBCASE("constant likelihood with q = prior gives LB = c") {
        Rng rng(6);
        const auto c_lik = [](const Eigen::VectorXd&) { return 3.75; };
        CHECK(estimate_lb(unit_diag(2), prior, c_lik, 11, rng) ==
              doctest::Approx(3.75).epsilon(1e-12));
    }
    SUBCASE("lb estimate never exceeds the max h over draws from q") {
        Rng rng(7);
        auto z = VariationalParams::diag((Eigen::VectorXd(2) << 0.3, -0.2).finished(),
                                         Eigen::VectorXd::Constant(2, 0.5));
        const auto lik = [](const Eigen::VectorXd& t) { return -t.squaredNorm(); };
        Rng rng_probe(7);
        const auto draws = sample_posterior(z, 64, rng_probe);
        double max_h = -1e300;
        for (int i = 0; i < draws.rows(); ++i)
            max_h = std::max(max_h, h_function(draws.row(i), z, prior, lik));
        CHECK(estimate_lb(z, prior, lik, 64, rng) <= max_h + 1e-12);
    }
}

TEST_CASE("bb gradient") {
    SUBCASE("single sample equals the score times h") {
        auto z = unit_diag(2);
        Eigen::MatrixXd samples(1, 2);
        samples << 0.7, -1.3;
        Eigen::VectorXd h(1);
        h << 2.5;
        const auto g = bb_gradient(z, samples, h);
        CHECK(g.mu[0] == doctest::Approx(0.7 * 2.5).epsilon(1e-14));
        CHECK(g.mu[1] == doctest::Approx(-1.3 * 2.5).epsilon(1e-14));
        CHECK(g.log_var[0] == doctest::Approx((-0.5 + 0.5 * 0.7 * 0.7) * 2.5).epsilon(1e-14));
    }
    SUBCASE("1-d mu gradient is mean(theta * h)") {
        auto z = unit_diag(1);
        Rng rng(8);
        Eigen::MatrixXd samples = sample_posterior(z, 40, rng);
        Eigen::VectorXd h(40);
        for (int i = 0; i < 40; ++i) h[i] = std::sin(samples(i, 0));
        const auto g = bb_gradient(z, samples, h);
        CHECK(g.mu[0] ==
              doctest::Approx((samples.col(0).array() * h.array()).mean()).epsilon(1e-13));
    }
    SUBCASE("constant h has zero-mean score (monte carlo)") {
        auto z = unit_diag(3);
        Rng rng(9);
        const int S = 20000;
        const auto samples = sample_posterior(z, S, rng);
        const Eigen::VectorXd h = Eigen::VectorXd::Constant(S, 4.2);
        const auto g = bb_gradient(z, samples, h);
        const double se = 4.2 / std::sqrt(static_cast<double>(S));
        for (int i = 0; i < 3; ++i) CHECK(std::abs(g.mu[i]) < 4.0 * se);
    }
    SUBCASE("full covariance gradient matches the diagonal one on diagonal zeta") {
        auto zd = unit_diag(2);
        auto zf = VariationalParams::full(Eigen::VectorXd::Zero(2),
                                          Eigen::MatrixXd::Identity(2, 2));
        Eigen::MatrixXd samples(3, 2);
        samples << 0.5, -0.2, 1.1, 0.9, -0.7, 0.3;
        Eigen::VectorXd h(3);
        h << 1.0, -2.0, 0.5;
        const auto gd = bb_gradient(zd, samples, h);
        const auto gf = bb_gradient(zf, samples, h);
        CHECK((gd.mu - gf.mu).norm() < 1e-13);
        // at unit variance, d log q / d cov_ii equals d log q / d log var_i
        CHECK(gf.cov(0, 0) == doctest::Approx(gd.log_var[0]).epsilon(1e-13));
        CHECK(gf.cov(1, 1) == doctest::Approx(gd.log_var[1]).epsilon(1e-13));
    }
}

TEST_CASE("optimizer steps") {
    SUBCASE("zero h values leave zeta unchanged for all four optimizers") {
        for (auto kind : {OptimizerKind::Bbvi, OptimizerKind::Qbvi, OptimizerKind::Mgvb,
                          OptimizerKind::Emgvb}) {
            auto opt = make_optimizer(config_for(kind));
            const auto zeta = opt->init(3);
            Eigen::MatrixXd samples(4, 3);
            samples.setRandom();
            const Eigen::VectorXd h = Eigen::VectorXd::Zero(4);
            const auto next = opt->step(zeta, samples, h);
            INFO("optimizer ", to_string(kind));
            CHECK((next.mu - zeta.mu).norm() == 0.0);
            CHECK((next.marginal_var() - zeta.marginal_var()).norm() == 0.0);
        }
    }
    SUBCASE("bbvi first step is mu + lr (1 - momentum) grad") {
        OptimizerConfig cfg = config_for(OptimizerKind::Bbvi);
        cfg.learning_rate = 0.1;
        cfg.momentum = 0.4;
        auto opt = make_optimizer(cfg);
        auto zeta = VariationalParams::diag(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1));
        Eigen::MatrixXd samples(2, 1);
        samples << 1.0, -1.0;
        Eigen::VectorXd h(2);
        h << 2.0, 0.0;  // mu-gradient = mean(theta h) = 1, log-var gradient = 0
        const auto next = opt->step(zeta, samples, h);
        CHECK(next.mu[0] == doctest::Approx(0.1 * 0.6 * 1.0).epsilon(1e-14));
        CHECK(next.var[0] == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("manifold updates stay positive definite over random gradients") {
        for (auto kind : {OptimizerKind::Mgvb, OptimizerKind::Emgvb}) {
            OptimizerConfig cfg = config_for(kind);
            cfg.learning_rate = 0.05;  // deliberately aggressive
            auto opt = make_optimizer(cfg);
            auto zeta = opt->init(3);
            Rng rng(10 + static_cast<int>(kind));
            for (int step = 0; step < 1000; ++step) {
                const auto samples = sample_posterior(zeta, 8, rng);
                Eigen::VectorXd h(8);
                for (int i = 0; i < 8; ++i) h[i] = rng.uniform(-5.0, 5.0);
                zeta = opt->step(zeta, samples, h);
                REQUIRE_NOTHROW(zeta.validate());
            }
            CHECK(opt->spd_checks_passed() > 0);
        }
    }
}

TEST_CASE("conjugate toy target: all optimizers find the analytic posterior" *
          doctest::timeout(300)) {
    ConjugateTarget target;
    target.y_bar = (Eigen::VectorXd(2) << 0.55, -0.33).finished();

    for (auto kind :
         {OptimizerKind::Bbvi, OptimizerKind::Qbvi, OptimizerKind::Mgvb, OptimizerKind::Emgvb}) {
        OptimizerConfig cfg = config_for(kind);
        cfg.max_iters = 1200;
        cfg.seed = 99;
        cfg.n_posterior_draws = 100;
        const auto fit = fit_vi(target.loglik(), 2, Prior{target.tau}, cfg);
        const auto& mean = fit.zeta_star.mu;
        const auto var = fit.zeta_star.marginal_var();
        INFO("optimizer ", to_string(kind));
        for (int i = 0; i < 2; ++i) {
            CHECK(std::abs(mean[i] - target.posterior_mean()[i]) < 0.05);
            CHECK(var[i] == doctest::Approx(target.posterior_var()).epsilon(0.25));
        }
    }
}

TEST_CASE("fit is deterministic given seed and config") {
    ConjugateTarget target;
    target.y_bar = (Eigen::VectorXd(2) << 0.2, 0.1).finished();
    OptimizerConfig cfg = config_for(OptimizerKind::Mgvb);
    cfg.max_iters = 50;
    cfg.seed = 1234;
    cfg.n_posterior_draws = 64;
    const auto a = fit_vi(target.loglik(), 2, Prior{1.0}, cfg);
    const auto b = fit_vi(target.loglik(), 2, Prior{1.0}, cfg);
    CHECK((a.posterior_samples - b.posterior_samples).norm() == 0.0);
    CHECK(a.lb_trace == b.lb_trace);
    CHECK((a.zeta_star.mu - b.zeta_star.mu).norm() == 0.0);
}

TEST_CASE("fit result bookkeeping") {
    ConjugateTarget target;
    target.y_bar = (Eigen::VectorXd(1) << 0.4).finished();
    OptimizerConfig cfg = config_for(OptimizerKind::Bbvi);
    cfg.max_iters = 20;
    cfg.n_posterior_draws = 10;
    const auto fit = fit_vi(target.loglik(), 1, Prior{1.0}, cfg);
    CHECK(fit.lb_trace.size() == 20);
    CHECK(fit.posterior_samples.rows() == 10);
    CHECK(fit.posterior_samples.cols() == 1);
    CHECK_FALSE(fit.quality_warning);
    CHECK(fit.rejected_samples == 0);
}
