#pragma once

#include <string>
#include <vector>

#include "garchvi/distributions.hpp"
#include "garchvi/timeseries.hpp"

namespace garchvi {

enum class Family { Arch, Garch, GjrGarch, Egarch, GjrEgarch, Figarch };

std::string to_string(Family family);

/// Model family plus lag orders.
///
/// Orders: q = number of alpha (shock) terms, o = number of gamma (asymmetry)
/// terms, p = number of beta (variance-lag) terms. For FIGARCH the q slot
/// holds the number of phi terms (0 or 1), so FIGARCH(1,d,1) in the usual
/// naming is {p = 1, q = 1} here; there are no alphas.
struct ModelSpec {
    Family family = Family::Garch;
    int p = 1;
    int o = 0;
    int q = 1;
    InnovationDist innovation = InnovationDist::normal();
    int figarch_truncation = 1000;

    void validate() const;
    int max_lag() const;
    bool is_egarch_family() const {
        return family == Family::Egarch || family == Family::GjrEgarch;
    }
};

/// "arch(1)", "garch(1,1)", "gjr-garch(1,1)" (= p,o,q all 1), "gjr-garch(p,o,q)",
/// "egarch(p,q)", "gjr-egarch(p,q)" or "(p,o,q)", "figarch(m,d,p)" with the d
/// literal, e.g. "figarch(1,d,1)". Case-insensitive.
ModelSpec parse_model(const std::string& text, const InnovationDist& innovation = InnovationDist::normal(),
                      int figarch_truncation = 1000);
std::string model_name(const ModelSpec& spec);

/// Parameters in the constrained space of the family. Vectors are sized per
/// the spec's orders; unused blocks stay empty.
struct ConstrainedParams {
    double omega = 0.0;
    std::vector<double> alpha;  // length q (zero-length for FIGARCH)
    std::vector<double> gamma;  // length o
    std::vector<double> psi;    // length q, EGARCH magnitude coefficients
    std::vector<double> beta;   // length p
    double phi = 0.0;           // FIGARCH, present when q(m) = 1
    double d = 0.0;             // FIGARCH fractional order
    std::vector<double> dist_shape;
};

/// Number of free parameters: omega + the family's coefficient blocks +
/// distribution shape parameters. EGARCH families count both alpha and psi
/// per shock lag.
int parameter_count(const ModelSpec& spec);

/// Canonical ordering: omega, alpha_1..q, gamma_1..o, psi_1..q, beta_1..p,
/// [phi], [d], then distribution shapes. All serialized parameter vectors use
/// this order.
std::vector<std::string> parameter_names(const ModelSpec& spec);

/// Throws ConstraintViolation / ShapeViolation unless nu lies in the family's
/// constraint set (EGARCH variants are unconstrained apart from shapes).
void validate_constraints(const ModelSpec& spec, const ConstrainedParams& nu);

/// ARCH(infinity) weights of the FIGARCH: delta_1 = d, lambda_1 = phi - beta + d,
/// delta_k = ((k-1-d)/k) delta_{k-1}, lambda_k = beta lambda_{k-1} + delta_k
/// - phi delta_{k-1}. Nonnegative whenever 0<=d<=1, 0<=phi<=(1-d)/2,
/// 0<=beta<=d+phi.
std::vector<double> figarch_weights(double phi, double beta, double d, int K);

struct VariancePath {
    std::vector<double> h;
    std::vector<double> loglik_per_obs;
};

/// Conditional variance recursion over the full series.
///
/// Linear-variance families (ARCH/GARCH/GJR) pin h_t = h_init for
/// t <= max(p,o,q) and recurse afterwards, so every lag the recursion touches
/// is in-sample. EGARCH families recurse from t = 1 with pre-sample log h =
/// log(h_init) and pre-sample g-terms = 0. FIGARCH evaluates the truncated
/// ARCH(infinity) sum with pre-sample eps^2 = h_init.
std::vector<double> variance_recursion(const ModelSpec& spec, const ConstrainedParams& nu,
                                       const std::vector<double>& returns, double h_init);

/// variance_recursion plus the per-observation log-likelihood contributions.
VariancePath variance_path(const ModelSpec& spec, const ConstrainedParams& nu,
                           const ReturnSeries& series, double h_init);

/// Gaussian QML objective: sum_t ( log h_t + eps_t^2 / h_t ).
double qml_objective(const ModelSpec& spec, const ConstrainedParams& nu,
                     const std::vector<double>& returns, double h_init);
double qml_objective(const ModelSpec& spec, const ConstrainedParams& nu,
                     const ReturnSeries& series);

/// Full log-likelihood: sum_t [ log f_z(eps_t / sqrt(h_t)) - log(h_t)/2 ].
/// For Normal innovations this equals -(T log 2pi + qml_objective) / 2.
double log_likelihood(const ModelSpec& spec, const ConstrainedParams& nu,
                      const std::vector<double>& returns, double h_init);
double log_likelihood(const ModelSpec& spec, const ConstrainedParams& nu,
                      const ReturnSeries& series);

/// Simulates T observations of eps_t = sqrt(h_t) z_t, deterministic per seed.
/// Pre-sample h and eps^2 start at the unconditional variance when the
/// process is stationary, at omega (exp(omega) for EGARCH) otherwise.
ReturnSeries simulate(const ModelSpec& spec, const ConstrainedParams& nu, int T,
                      std::uint64_t seed);

/// h_{T+1..T+horizon}. Beyond one step, unknown eps^2 is replaced by its
/// conditional expectation h, the GJR indicator term by h/2 (symmetric
/// innovations), and EGARCH g-terms by zero.
std::vector<double> forecast_variance(const ModelSpec& spec, const ConstrainedParams& nu,
                                      const ReturnSeries& history, int horizon);
std::vector<double> forecast_variance(const ModelSpec& spec, const ConstrainedParams& nu,
                                      const std::vector<double>& history, double h_init,
                                      int horizon);

}  // namespace garchvi
