#pragma once

#include <Eigen/Core>
#include <functional>

#include "garchvi/models.hpp"
#include "garchvi/timeseries.hpp"
#include "garchvi/transforms.hpp"
#include "garchvi/vi.hpp"

namespace garchvi {

/// Central-difference gradient with per-coordinate step eps * max(1, |x_i|).
/// Throws NonFiniteEvaluation when f is non-finite at a probe point.
Eigen::VectorXd numerical_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double eps = 1e-6);

struct QmlConfig {
    int max_iters = 5000;
    double tol = 1e-6;        // infinity norm of the gradient
    double eps = 1e-6;        // relative finite-difference step
    double initial_step = 1.0;
    Eigen::VectorXd theta0;   // empty = zero vector
};

struct QmlResult {
    ConstrainedParams nu_star;
    Eigen::VectorXd theta_star;
    double objective = 0.0;  // QML objective at the optimum
    bool converged = false;
    int iterations = 0;
};

/// Minimizes the Gaussian QML objective composed with the inverse transform by
/// gradient descent with a backtracking (Armijo) line search, started from
/// theta = 0. The returned nu satisfies the constraint set by construction.
QmlResult fit_qml(const ModelSpec& spec, const ReturnSeries& train, const QmlConfig& cfg = {});

/// Same routine on a generic objective (used by tests).
QmlResult fit_qml(const std::function<double(const Eigen::VectorXd&)>& objective, int dim,
                  const QmlConfig& cfg = {});

struct MhConfig {
    int n_total = 30000;
    int n_keep = 7000;
    double proposal_scale = 0.1;
    int adapt_window = 10000;  // Robbins-Monro scale adaptation, frozen afterwards
    double target_acceptance = 0.3;
    std::uint64_t seed = 0;
};

struct Chain {
    Eigen::MatrixXd draws;  // n_keep x d
    std::vector<double> log_posts;
    double acceptance_rate = 0.0;  // accepted / n_total
};

/// Metropolis-Hastings acceptance for a symmetric proposal: accept when
/// log(u) < delta_log_post.
bool mh_accept(double delta_log_post, double u);

/// Random-walk MH with isotropic Gaussian proposals on the unconstrained
/// parameters; the target is exp(log prior + log likelihood). The proposal
/// scale is adapted toward target_acceptance during the adaptation window and
/// frozen afterwards. Returns the last n_keep draws; deterministic per seed.
Chain fit_mh(const LogLikFn& loglik, int dim, const Prior& prior, const MhConfig& cfg);
Chain fit_mh(const ModelSpec& spec, const ReturnSeries& train, const Prior& prior,
             const MhConfig& cfg);

}  // namespace garchvi
