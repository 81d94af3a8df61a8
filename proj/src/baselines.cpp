#include "garchvi/baselines.hpp"

#include <cmath>
#include <limits>

#include "garchvi/errors.hpp"

namespace garchvi {

Eigen::VectorXd numerical_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double eps) {
    if (!(eps > 0.0)) throw ConfigError("eps must be > 0");
    Eigen::VectorXd grad(x.size());
    Eigen::VectorXd probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double step = eps * std::max(1.0, std::abs(x[i]));
        probe[i] = x[i] + step;
        const double up = f(probe);
        probe[i] = x[i] - step;
        const double down = f(probe);
        probe[i] = x[i];
        if (!std::isfinite(up) || !std::isfinite(down))
            throw NonFiniteEvaluation("objective non-finite at finite-difference probe");
        grad[i] = (up - down) / (2.0 * step);
    }
    return grad;
}

QmlResult fit_qml(const std::function<double(const Eigen::VectorXd&)>& objective, int dim,
                  const QmlConfig& cfg) {
    Eigen::VectorXd theta =
        cfg.theta0.size() == 0 ? Eigen::VectorXd::Zero(dim) : Eigen::VectorXd(cfg.theta0);
    if (theta.size() != dim) throw DimensionMismatch("theta0 length != parameter dimension");

    double value = objective(theta);
    if (!std::isfinite(value)) throw NonFiniteEvaluation("objective non-finite at start point");

    QmlResult result;
    double step = cfg.initial_step;
    const double armijo = 1e-4;
    int iter = 0;
    for (; iter < cfg.max_iters; ++iter) {
        const Eigen::VectorXd grad = numerical_gradient(objective, theta, cfg.eps);
        if (grad.lpNorm<Eigen::Infinity>() <= cfg.tol) {
            result.converged = true;
            break;
        }
        const double g2 = grad.squaredNorm();
        // backtracking line search along -grad, warm-started from the last
        // accepted step
        double s = std::min(step * 2.0, cfg.initial_step * 1e3);
        bool accepted = false;
        for (int k = 0; k < 60; ++k) {
            const Eigen::VectorXd cand = theta - s * grad;
            double cand_value;
            try {
                cand_value = objective(cand);
            } catch (const Error&) {
                cand_value = std::numeric_limits<double>::infinity();
            }
            if (std::isfinite(cand_value) && cand_value <= value - armijo * s * g2) {
                theta = cand;
                value = cand_value;
                step = s;
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if (!accepted) break;  // no descent direction at line-search resolution
    }
    result.iterations = iter;
    result.theta_star = theta;
    result.objective = value;
    return result;
}

QmlResult fit_qml(const ModelSpec& spec, const ReturnSeries& train, const QmlConfig& cfg) {
    const TransformSpec tspec(spec);
    const double h_init = backcast_variance(train);
    const std::vector<double>& returns = train.returns();
    auto objective = [&](const Eigen::VectorXd& theta) {
        return qml_objective(spec, inverse_transform(tspec, theta), returns, h_init);
    };
    QmlResult result = fit_qml(objective, tspec.dim(), cfg);
    result.nu_star = inverse_transform(tspec, result.theta_star);
    return result;
}

bool mh_accept(double delta_log_post, double u) {
    if (delta_log_post >= 0.0) return true;
    return std::log(u) < delta_log_post;
}

Chain fit_mh(const LogLikFn& loglik, int dim, const Prior& prior, const MhConfig& cfg) {
    if (cfg.n_total < 1 || cfg.n_keep < 1 || cfg.n_keep > cfg.n_total)
        throw ConfigError("need 1 <= n_keep <= n_total");
    if (!(cfg.proposal_scale > 0.0)) throw ConfigError("proposal scale must be > 0");

    Rng rng(cfg.seed);
    const double log2pi = 1.8378770664093454835606594728112;
    auto log_post = [&](const Eigen::VectorXd& th) -> double {
        double ll;
        try {
            ll = loglik(th);
        } catch (const Error&) {
            return -std::numeric_limits<double>::infinity();
        }
        if (!std::isfinite(ll)) return -std::numeric_limits<double>::infinity();
        return ll - 0.5 * dim * log2pi - 0.5 * dim * std::log(prior.tau) -
               0.5 * th.squaredNorm() / prior.tau;
    };

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(dim);
    double lp = log_post(theta);
    if (!std::isfinite(lp)) throw NonFiniteEvaluation("log posterior non-finite at start point");

    double log_scale = std::log(cfg.proposal_scale);
    Chain chain;
    chain.draws.resize(cfg.n_keep, dim);
    chain.log_posts.resize(static_cast<std::size_t>(cfg.n_keep));
    long accepted = 0;
    Eigen::VectorXd prop(dim);

    for (int t = 0; t < cfg.n_total; ++t) {
        const double scale = std::exp(log_scale);
        for (int j = 0; j < dim; ++j) prop[j] = theta[j] + scale * rng.normal();
        const double lp_prop = log_post(prop);
        const double delta = lp_prop - lp;
        const double u = rng.uniform();
        if (std::isfinite(lp_prop) && mh_accept(delta, u)) {
            theta = prop;
            lp = lp_prop;
            ++accepted;
        }
        if (t < cfg.adapt_window) {
            // Robbins-Monro on the log proposal scale toward the target rate
            const double alpha = std::isfinite(delta) ? std::min(1.0, std::exp(delta)) : 0.0;
            const double gain = 1.0 / std::pow(static_cast<double>(t + 1), 0.6);
            log_scale += gain * (alpha - cfg.target_acceptance);
        }
        const int keep_from = cfg.n_total - cfg.n_keep;
        if (t >= keep_from) {
            chain.draws.row(t - keep_from) = theta.transpose();
            chain.log_posts[static_cast<std::size_t>(t - keep_from)] = lp;
        }
    }
    chain.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(cfg.n_total);
    return chain;
}

Chain fit_mh(const ModelSpec& spec, const ReturnSeries& train, const Prior& prior,
             const MhConfig& cfg) {
    const TransformSpec tspec(spec);
    return fit_mh(make_garch_loglik(tspec, train), tspec.dim(), prior, cfg);
}

}  // namespace garchvi
