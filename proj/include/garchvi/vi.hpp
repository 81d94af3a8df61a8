#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "garchvi/rng.hpp"
#include "garchvi/timeseries.hpp"
#include "garchvi/transforms.hpp"

namespace garchvi {

enum class OptimizerKind { Bbvi, Qbvi, Mgvb, Emgvb };

std::string to_string(OptimizerKind kind);
OptimizerKind optimizer_from_string(const std::string& name);

/// Gaussian variational posterior, either diagonal (BBVI/QBVI) or full
/// covariance (MGVB/EMGVB).
struct VariationalParams {
    Eigen::VectorXd mu;
    bool diagonal = true;
    Eigen::VectorXd var;  // diagonal case: per-coordinate variances
    Eigen::MatrixXd cov;  // full case

    static VariationalParams diag(Eigen::VectorXd mu, Eigen::VectorXd var);
    static VariationalParams full(Eigen::VectorXd mu, Eigen::MatrixXd cov);

    int dim() const { return static_cast<int>(mu.size()); }

    /// Marginal variances (diagonal of the covariance).
    Eigen::VectorXd marginal_var() const;

    /// Throws SingularCovariance unless variances are positive / the full
    /// covariance admits a Cholesky factorization.
    void validate() const;
};

/// Zero-mean isotropic Gaussian prior on the unconstrained parameters.
struct Prior {
    double tau = 1.0;
};

struct OptimizerConfig {
    OptimizerKind optimizer = OptimizerKind::Mgvb;
    double learning_rate = 0.005;
    int n_samples = 50;
    double momentum = 0.4;
    int max_iters = 2500;
    std::uint64_t seed = 0;
    Eigen::VectorXd mu0;  // empty = zero vector
    double cov0_scale = 0.1;
    int n_posterior_draws = 7000;
    /// Gradient-norm ceiling applied before momentum; 0 disables. Full-sample
    /// likelihoods produce raw score gradients of order 1e4, far beyond what
    /// the fixed step size can absorb.
    double clip_norm = 100.0;

    void validate() const;
};

struct FitResult {
    VariationalParams zeta_star{};
    std::vector<double> lb_trace;         // one MC lower-bound estimate per iteration
    Eigen::MatrixXd posterior_samples;    // n_posterior_draws x d, drawn from zeta_star
    double elapsed_seconds = 0.0;
    int rejected_samples = 0;             // redraws due to non-finite likelihoods
    int aborted_iterations = 0;           // iterations skipped after redraw exhaustion
    int step_rejections = 0;              // learning-rate halvings on invalid updates
    int failed_steps = 0;                 // updates abandoned after halving gave up
    int spd_checks_passed = 0;            // accepted full-covariance Cholesky checks
    bool quality_warning = false;         // >1% of sample draws rejected
};

/// Exact multivariate normal log-density of theta under zeta.
double gaussian_log_density(const Eigen::VectorXd& theta, const VariationalParams& zeta);

/// n draws mu + L eta (L the Cholesky factor, eta standard normal), one row
/// per draw; deterministic given the generator state.
Eigen::MatrixXd sample_posterior(const VariationalParams& zeta, int n, Rng& rng);

/// Model log-likelihood as a function of the unconstrained parameter vector.
using LogLikFn = std::function<double(const Eigen::VectorXd&)>;

/// h(theta) = log p(theta) + log p(y | theta) - log q(theta).
double h_function(const Eigen::VectorXd& theta, const VariationalParams& zeta, const Prior& prior,
                  const LogLikFn& loglik);

/// Monte Carlo lower-bound estimate: mean of h over n fresh draws.
double estimate_lb(const VariationalParams& zeta, const Prior& prior, const LogLikFn& loglik,
                   int n, Rng& rng);

/// Score-function ("black-box") gradient estimate of the lower bound:
/// (1/S) sum_s grad log q(theta_s) * h_s, in the Euclidean parametrization of
/// zeta. Diagonal zeta fills mu/log_var, full zeta fills mu/cov.
struct ScoreGradient {
    Eigen::VectorXd mu;
    Eigen::VectorXd log_var;
    Eigen::MatrixXd cov;
};
ScoreGradient bb_gradient(const VariationalParams& zeta, const Eigen::MatrixXd& samples,
                          const Eigen::VectorXd& h_values);

/// One optimizer = one update rule for zeta, with its momentum state.
///
///   BBVI  - Euclidean steps on (mu, log variance), diagonal covariance.
///   QBVI  - natural-parameter steps (S^-1 mu, -S^-1/2); the natural gradient
///           is the mean-parametrization score, no Fisher matrix is formed.
///   MGVB  - natural gradient S grad_mu for the mean and the SPD-manifold
///           retraction R_S(xi) = S + xi + xi S^-1 xi / 2 for the covariance,
///           with xi built from S G S.
///   EMGVB - same retraction with the exact Gaussian natural gradient
///           2 S G S for the covariance.
///
/// Invalid updates (non-positive variance, failed Cholesky) are retried with
/// a halved learning rate for that call; the events are counted.
class ViOptimizer {
public:
    explicit ViOptimizer(const OptimizerConfig& cfg) : cfg_(cfg) { cfg.validate(); }
    virtual ~ViOptimizer() = default;

    /// Starting point: mu0 (zeros if empty) and cov0_scale * I.
    virtual VariationalParams init(int dim) const = 0;

    /// One Algorithm-1 update from the sampled thetas and their h values.
    virtual VariationalParams step(const VariationalParams& zeta, const Eigen::MatrixXd& samples,
                                   const Eigen::VectorXd& h_values) = 0;

    int step_rejections() const { return step_rejections_; }
    int failed_steps() const { return failed_steps_; }
    int spd_checks_passed() const { return spd_checks_passed_; }

protected:
    OptimizerConfig cfg_;
    int step_rejections_ = 0;
    int failed_steps_ = 0;
    int spd_checks_passed_ = 0;
};

std::unique_ptr<ViOptimizer> make_optimizer(const OptimizerConfig& cfg);

/// Fixed-budget Algorithm-1 loop on a generic target. Runs exactly
/// cfg.max_iters iterations, records one lower-bound estimate per iteration,
/// then draws cfg.n_posterior_draws samples from the final posterior.
/// Deterministic given (seed, config, target).
FitResult fit_vi(const LogLikFn& loglik, int dim, const Prior& prior, const OptimizerConfig& cfg);

/// GARCH front end: the likelihood is evaluated at the inverse-transformed
/// parameters, with the pre-sample variance back-cast from the training data.
FitResult fit_vi(const ModelSpec& spec, const ReturnSeries& train, const Prior& prior,
                 const OptimizerConfig& cfg);

/// Composes log_likelihood with the inverse transform; shared by VI and MH.
LogLikFn make_garch_loglik(const TransformSpec& tspec, const ReturnSeries& train);

}  // namespace garchvi
