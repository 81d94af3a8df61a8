#include "garchvi/vi.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "garchvi/errors.hpp"
#include "garchvi/models.hpp"

namespace garchvi {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr int kMaxRedraws = 10;
constexpr int kMaxHalvings = 30;
}  // namespace

std::string to_string(OptimizerKind kind) {
    switch (kind) {
        case OptimizerKind::Bbvi: return "bbvi";
        case OptimizerKind::Qbvi: return "qbvi";
        case OptimizerKind::Mgvb: return "mgvb";
        case OptimizerKind::Emgvb: return "emgvb";
    }
    return "?";
}

OptimizerKind optimizer_from_string(const std::string& name) {
    if (name == "bbvi" || name == "BBVI") return OptimizerKind::Bbvi;
    if (name == "qbvi" || name == "QBVI") return OptimizerKind::Qbvi;
    if (name == "mgvb" || name == "MGVB") return OptimizerKind::Mgvb;
    if (name == "emgvb" || name == "EMGVB") return OptimizerKind::Emgvb;
    throw ConfigError("unknown optimizer '" + name + "'");
}

VariationalParams VariationalParams::diag(Eigen::VectorXd mu, Eigen::VectorXd var) {
    VariationalParams z;
    z.mu = std::move(mu);
    z.diagonal = true;
    z.var = std::move(var);
    z.validate();
    return z;
}

VariationalParams VariationalParams::full(Eigen::VectorXd mu, Eigen::MatrixXd cov) {
    VariationalParams z;
    z.mu = std::move(mu);
    z.diagonal = false;
    z.cov = std::move(cov);
    z.validate();
    return z;
}

Eigen::VectorXd VariationalParams::marginal_var() const {
    return diagonal ? var : cov.diagonal();
}

void VariationalParams::validate() const {
    if (!mu.allFinite()) throw SingularCovariance("non-finite mean");
    if (diagonal) {
        if (var.size() != mu.size()) throw DimensionMismatch("var length != mu length");
        if (!var.allFinite() || (var.array() <= 0.0).any())
            throw SingularCovariance("diagonal variances must be positive");
    } else {
        if (cov.rows() != mu.size() || cov.cols() != mu.size())
            throw DimensionMismatch("cov shape != mu length");
        if (!cov.allFinite()) throw SingularCovariance("non-finite covariance");
        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        if (llt.info() != Eigen::Success)
            throw SingularCovariance("covariance is not positive definite");
    }
}

void OptimizerConfig::validate() const {
    if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
    if (n_samples < 1) throw ConfigError("n_samples must be >= 1");
    if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum must be in [0,1)");
    if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
    if (!(cov0_scale > 0.0)) throw ConfigError("cov0_scale must be > 0");
    if (n_posterior_draws < 1) throw ConfigError("n_posterior_draws must be >= 1");
    if (clip_norm < 0.0) throw ConfigError("clip_norm must be >= 0");
}

double gaussian_log_density(const Eigen::VectorXd& theta, const VariationalParams& zeta) {
    if (theta.size() != zeta.mu.size()) throw DimensionMismatch("theta length != mu length");
    const auto d = static_cast<double>(theta.size());
    const Eigen::VectorXd u = theta - zeta.mu;
    if (zeta.diagonal) {
        if ((zeta.var.array() <= 0.0).any()) throw SingularCovariance("non-positive variance");
        return -0.5 * d * kLog2Pi - 0.5 * zeta.var.array().log().sum() -
               0.5 * (u.array().square() / zeta.var.array()).sum();
    }
    Eigen::LLT<Eigen::MatrixXd> llt(zeta.cov);
    if (llt.info() != Eigen::Success) throw SingularCovariance("covariance is not positive definite");
    const Eigen::VectorXd w = llt.matrixL().solve(u);
    const double log_det_half = llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    return -0.5 * d * kLog2Pi - log_det_half - 0.5 * w.squaredNorm();
}

Eigen::MatrixXd sample_posterior(const VariationalParams& zeta, int n, Rng& rng) {
    if (n < 1) throw ConfigError("n must be >= 1");
    zeta.validate();
    const int d = zeta.dim();
    Eigen::MatrixXd out(n, d);
    if (zeta.diagonal) {
        const Eigen::VectorXd sd = zeta.var.array().sqrt();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < d; ++j) out(i, j) = zeta.mu[j] + sd[j] * rng.normal();
    } else {
        Eigen::LLT<Eigen::MatrixXd> llt(zeta.cov);
        const Eigen::MatrixXd L = llt.matrixL();
        Eigen::VectorXd eta(d);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < d; ++j) eta[j] = rng.normal();
            out.row(i) = (zeta.mu + L * eta).transpose();
        }
    }
    return out;
}

double h_function(const Eigen::VectorXd& theta, const VariationalParams& zeta, const Prior& prior,
                  const LogLikFn& loglik) {
    if (!(prior.tau > 0.0)) throw ConfigError("prior tau must be > 0");
    const auto d = static_cast<double>(theta.size());
    const double log_prior =
        -0.5 * d * kLog2Pi - 0.5 * d * std::log(prior.tau) - 0.5 * theta.squaredNorm() / prior.tau;
    return log_prior + loglik(theta) - gaussian_log_density(theta, zeta);
}

double estimate_lb(const VariationalParams& zeta, const Prior& prior, const LogLikFn& loglik,
                   int n, Rng& rng) {
    const Eigen::MatrixXd samples = sample_posterior(zeta, n, rng);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += h_function(samples.row(i), zeta, prior, loglik);
    return acc / static_cast<double>(n);
}

ScoreGradient bb_gradient(const VariationalParams& zeta, const Eigen::MatrixXd& samples,
                          const Eigen::VectorXd& h_values) {
    const int S = static_cast<int>(samples.rows());
    const int d = zeta.dim();
    if (S < 1 || h_values.size() != S || samples.cols() != d)
        throw DimensionMismatch("samples/h_values shapes disagree");

    ScoreGradient g;
    g.mu = Eigen::VectorXd::Zero(d);
    if (zeta.diagonal) {
        g.log_var = Eigen::VectorXd::Zero(d);
        const Eigen::ArrayXd inv_var = zeta.var.array().inverse();
        for (int s = 0; s < S; ++s) {
            const Eigen::ArrayXd u = samples.row(s).transpose().array() - zeta.mu.array();
            const double h = h_values[s];
            g.mu.array() += (u * inv_var) * h;
            // d log q / d log var_i = -1/2 + u_i^2 / (2 var_i)
            g.log_var.array() += (-0.5 + 0.5 * u.square() * inv_var) * h;
        }
        g.mu /= static_cast<double>(S);
        g.log_var /= static_cast<double>(S);
    } else {
        g.cov = Eigen::MatrixXd::Zero(d, d);
        Eigen::LLT<Eigen::MatrixXd> llt(zeta.cov);
        if (llt.info() != Eigen::Success)
            throw SingularCovariance("covariance is not positive definite");
        const Eigen::MatrixXd P = llt.solve(Eigen::MatrixXd::Identity(d, d));
        for (int s = 0; s < S; ++s) {
            const Eigen::VectorXd u = samples.row(s).transpose() - zeta.mu;
            const Eigen::VectorXd pu = P * u;
            const double h = h_values[s];
            g.mu += pu * h;
            g.cov += 0.5 * h * (pu * pu.transpose() - P);
        }
        g.mu /= static_cast<double>(S);
        g.cov /= static_cast<double>(S);
    }
    return g;
}

namespace {

Eigen::VectorXd start_mean(const OptimizerConfig& cfg, int dim) {
    if (cfg.mu0.size() == 0) return Eigen::VectorXd::Zero(dim);
    if (cfg.mu0.size() != dim) throw DimensionMismatch("mu0 length != parameter dimension");
    return cfg.mu0;
}

/// The score has zero mean, so shifting h by its sample mean leaves the
/// gradient estimator unbiased while removing the raw |h| scale (thousands,
/// for a full-sample log-likelihood) from its variance. Without this the
/// paper's step size diverges on any realistically sized series.
Eigen::VectorXd centered(const Eigen::VectorXd& h) {
    return h.array() - h.mean();
}

/// Rescales the stacked gradient to the configured norm ceiling.
double clip_scale(double norm, double clip) {
    if (clip <= 0.0 || norm <= clip || norm == 0.0) return 1.0;
    return clip / norm;
}

class BbviOptimizer final : public ViOptimizer {
public:
    using ViOptimizer::ViOptimizer;

    VariationalParams init(int dim) const override {
        return VariationalParams::diag(start_mean(cfg_, dim),
                                       Eigen::VectorXd::Constant(dim, cfg_.cov0_scale));
    }

    VariationalParams step(const VariationalParams& zeta, const Eigen::MatrixXd& samples,
                           const Eigen::VectorXd& h) override {
        if (!zeta.diagonal) throw ConfigError("bbvi requires a diagonal covariance");
        ScoreGradient g = bb_gradient(zeta, samples, centered(h));
        if (m_mu_.size() == 0) {
            m_mu_ = Eigen::VectorXd::Zero(zeta.dim());
            m_lv_ = Eigen::VectorXd::Zero(zeta.dim());
        }
        const double scale = clip_scale(
            std::sqrt(g.mu.squaredNorm() + g.log_var.squaredNorm()), cfg_.clip_norm);
        g.mu *= scale;
        g.log_var *= scale;
        m_mu_ = cfg_.momentum * m_mu_ + (1.0 - cfg_.momentum) * g.mu;
        m_lv_ = cfg_.momentum * m_lv_ + (1.0 - cfg_.momentum) * g.log_var;
        if (m_mu_.isZero(0.0) && m_lv_.isZero(0.0)) return zeta;  // exact fixed point
        const Eigen::VectorXd mu = zeta.mu + cfg_.learning_rate * m_mu_;
        const Eigen::VectorXd log_var =
            (zeta.var.array().log() + cfg_.learning_rate * m_lv_.array())
                .min(50.0)
                .max(-50.0);
        return VariationalParams::diag(mu, log_var.array().exp());
    }

private:
    Eigen::VectorXd m_mu_, m_lv_;
};

class QbviOptimizer final : public ViOptimizer {
public:
    using ViOptimizer::ViOptimizer;

    VariationalParams init(int dim) const override {
        return VariationalParams::diag(start_mean(cfg_, dim),
                                       Eigen::VectorXd::Constant(dim, cfg_.cov0_scale));
    }

    VariationalParams step(const VariationalParams& zeta, const Eigen::MatrixXd& samples,
                           const Eigen::VectorXd& h) override {
        if (!zeta.diagonal) throw ConfigError("qbvi requires a diagonal covariance");
        const int S = static_cast<int>(samples.rows());
        const int d = zeta.dim();
        // Score in the mean parametrization (m1, m2) = (mu, var + mu^2); the
        // natural-parameter update preconditions for free: the natural
        // gradient w.r.t. (S^-1 mu, -S^-1/2) is exactly the mean-param score.
        Eigen::VectorXd g1 = Eigen::VectorXd::Zero(d);
        Eigen::VectorXd g2 = Eigen::VectorXd::Zero(d);
        const Eigen::VectorXd hc = centered(h);
        const Eigen::ArrayXd inv_var = zeta.var.array().inverse();
        for (int s = 0; s < S; ++s) {
            const Eigen::ArrayXd u = samples.row(s).transpose().array() - zeta.mu.array();
            const Eigen::ArrayXd d_var = (-0.5 * inv_var + 0.5 * u.square() * inv_var.square());
            g2.array() += d_var * hc[s];
            g1.array() += (u * inv_var - 2.0 * zeta.mu.array() * d_var) * hc[s];
        }
        g1 /= static_cast<double>(S);
        g2 /= static_cast<double>(S);
        const double scale =
            clip_scale(std::sqrt(g1.squaredNorm() + g2.squaredNorm()), cfg_.clip_norm);
        g1 *= scale;
        g2 *= scale;
        if (m1_.size() == 0) {
            m1_ = Eigen::VectorXd::Zero(d);
            m2_ = Eigen::VectorXd::Zero(d);
        }
        m1_ = cfg_.momentum * m1_ + (1.0 - cfg_.momentum) * g1;
        m2_ = cfg_.momentum * m2_ + (1.0 - cfg_.momentum) * g2;
        if (m1_.isZero(0.0) && m2_.isZero(0.0)) return zeta;  // exact fixed point

        const Eigen::ArrayXd lambda1 = zeta.mu.array() * inv_var;
        const Eigen::ArrayXd lambda2 = -0.5 * inv_var;
        double rate = cfg_.learning_rate;
        for (int attempt = 0; attempt <= kMaxHalvings; ++attempt) {
            const Eigen::ArrayXd l1 = lambda1 + rate * m1_.array();
            const Eigen::ArrayXd l2 = lambda2 + rate * m2_.array();
            if ((l2 < 0.0).all() && l1.isFinite().all() && l2.isFinite().all()) {
                const Eigen::ArrayXd var = -0.5 / l2;
                return VariationalParams::diag((l1 * var).matrix(), var.matrix());
            }
            ++step_rejections_;
            rate *= 0.5;
        }
        ++failed_steps_;
        return zeta;
    }

private:
    Eigen::VectorXd m1_, m2_;
};

class ManifoldOptimizer final : public ViOptimizer {
public:
    ManifoldOptimizer(const OptimizerConfig& cfg, bool exact_natural)
        : ViOptimizer(cfg), exact_natural_(exact_natural) {}

    VariationalParams init(int dim) const override {
        return VariationalParams::full(
            start_mean(cfg_, dim),
            cfg_.cov0_scale * Eigen::MatrixXd::Identity(dim, dim));
    }

    VariationalParams step(const VariationalParams& zeta, const Eigen::MatrixXd& samples,
                           const Eigen::VectorXd& h) override {
        if (zeta.diagonal) throw ConfigError("manifold optimizers require a full covariance");
        const ScoreGradient g = bb_gradient(zeta, samples, centered(h));
        const Eigen::MatrixXd& S = zeta.cov;
        Eigen::VectorXd nat_mu = S * g.mu;
        Eigen::MatrixXd nat_S = S * g.cov * S;
        if (exact_natural_) nat_S *= 2.0;  // exact Gaussian inverse-Fisher factor
        nat_S = 0.5 * (nat_S + nat_S.transpose()).eval();
        const double scale =
            clip_scale(std::sqrt(nat_mu.squaredNorm() + nat_S.squaredNorm()), cfg_.clip_norm);
        nat_mu *= scale;
        nat_S *= scale;

        const int d = zeta.dim();
        if (m_mu_.size() == 0) {
            m_mu_ = Eigen::VectorXd::Zero(d);
            m_S_ = Eigen::MatrixXd::Zero(d, d);
        }
        m_mu_ = cfg_.momentum * m_mu_ + (1.0 - cfg_.momentum) * nat_mu;
        m_S_ = cfg_.momentum * m_S_ + (1.0 - cfg_.momentum) * nat_S;

        Eigen::LLT<Eigen::MatrixXd> llt(S);
        if (llt.info() != Eigen::Success)
            throw SingularCovariance("covariance is not positive definite");

        double rate = cfg_.learning_rate;
        for (int attempt = 0; attempt <= kMaxHalvings; ++attempt) {
            const Eigen::MatrixXd xi = rate * m_S_;
            // retraction R_S(xi) = S + xi + xi S^-1 xi / 2
            Eigen::MatrixXd next = S + xi + 0.5 * xi * llt.solve(xi);
            next = 0.5 * (next + next.transpose()).eval();
            const Eigen::VectorXd mu = zeta.mu + rate * m_mu_;
            if (next.allFinite() && mu.allFinite()) {
                Eigen::LLT<Eigen::MatrixXd> check(next);
                if (check.info() == Eigen::Success) {
                    ++spd_checks_passed_;
                    VariationalParams out;
                    out.mu = mu;
                    out.diagonal = false;
                    out.cov = std::move(next);
                    return out;
                }
            }
            ++step_rejections_;
            rate *= 0.5;
        }
        ++failed_steps_;
        return zeta;
    }

private:
    bool exact_natural_;
    Eigen::VectorXd m_mu_;
    Eigen::MatrixXd m_S_;
};

}  // namespace

std::unique_ptr<ViOptimizer> make_optimizer(const OptimizerConfig& cfg) {
    switch (cfg.optimizer) {
        case OptimizerKind::Bbvi: return std::make_unique<BbviOptimizer>(cfg);
        case OptimizerKind::Qbvi: return std::make_unique<QbviOptimizer>(cfg);
        case OptimizerKind::Mgvb: return std::make_unique<ManifoldOptimizer>(cfg, false);
        case OptimizerKind::Emgvb: return std::make_unique<ManifoldOptimizer>(cfg, true);
    }
    throw ConfigError("unknown optimizer");
}

FitResult fit_vi(const LogLikFn& loglik, int dim, const Prior& prior, const OptimizerConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    auto opt = make_optimizer(cfg);
    VariationalParams zeta = opt->init(dim);
    Rng rng(cfg.seed);

    FitResult result;
    result.lb_trace.reserve(static_cast<std::size_t>(cfg.max_iters));
    Eigen::MatrixXd samples(cfg.n_samples, dim);
    Eigen::VectorXd h_values(cfg.n_samples);

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        bool ok = true;
        for (int s = 0; s < cfg.n_samples && ok; ++s) {
            int tries = 0;
            for (;;) {
                const Eigen::MatrixXd draw = sample_posterior(zeta, 1, rng);
                double h;
                try {
                    h = h_function(draw.row(0), zeta, prior, loglik);
                } catch (const Error&) {
                    h = std::numeric_limits<double>::quiet_NaN();
                }
                if (std::isfinite(h)) {
                    samples.row(s) = draw.row(0);
                    h_values[s] = h;
                    break;
                }
                ++result.rejected_samples;
                if (++tries >= kMaxRedraws) {
                    ok = false;
                    break;
                }
            }
        }
        if (!ok) {
            ++result.aborted_iterations;
            result.lb_trace.push_back(result.lb_trace.empty()
                                          ? std::numeric_limits<double>::quiet_NaN()
                                          : result.lb_trace.back());
            continue;
        }
        result.lb_trace.push_back(h_values.mean());
        zeta = opt->step(zeta, samples, h_values);
    }

    result.zeta_star = zeta;
    result.posterior_samples = sample_posterior(zeta, cfg.n_posterior_draws, rng);
    result.step_rejections = opt->step_rejections();
    result.failed_steps = opt->failed_steps();
    result.spd_checks_passed = opt->spd_checks_passed();
    const auto total_draws = static_cast<double>(cfg.max_iters) * cfg.n_samples;
    result.quality_warning = result.rejected_samples > 0.01 * total_draws;
    result.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

LogLikFn make_garch_loglik(const TransformSpec& tspec, const ReturnSeries& train) {
    const double h_init = backcast_variance(train);
    return [tspec, returns = train.returns(), h_init](const Eigen::VectorXd& theta) {
        return log_likelihood(tspec.spec, inverse_transform(tspec, theta), returns, h_init);
    };
}

FitResult fit_vi(const ModelSpec& spec, const ReturnSeries& train, const Prior& prior,
                 const OptimizerConfig& cfg) {
    const TransformSpec tspec(spec);
    return fit_vi(make_garch_loglik(tspec, train), tspec.dim(), prior, cfg);
}

}  // namespace garchvi
