#include "garchvi/models.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

#include "garchvi/errors.hpp"

namespace garchvi {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kConstraintTol = 1e-12;
constexpr double kLogVarClamp = 50.0;  // EGARCH overflow guard on log h

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

/// Sum of log(h_t) with one log per ~600 observations: multiply into an
/// accumulator and flush before it can leave the normal double range.
double sum_log(const std::vector<double>& h) {
    double acc = 1.0, s = 0.0;
    for (double v : h) {
        acc *= v;
        if (acc < 1e-270 || acc > 1e270) {
            s += std::log(acc);
            acc = 1.0;
        }
    }
    return s + std::log(acc);
}

/// Per-observation innovation log-density with the shape constants hoisted
/// out of the time loop.
class LogPdfEval {
public:
    explicit LogPdfEval(const InnovationDist& dist) : kind_(dist.kind) {
        switch (kind_) {
            case DistKind::Normal: break;
            case DistKind::StudentT: {
                nu_ = dist.shape[0];
                scale_ = std::sqrt(nu_ / (nu_ - 2.0));
                norm_ = std::log(scale_) + std::lgamma(0.5 * (nu_ + 1.0)) -
                        std::lgamma(0.5 * nu_) -
                        0.5 * std::log(nu_ * 3.1415926535897932384626433832795);
                break;
            }
            case DistKind::Ged: {
                lambda_ = dist.shape[0];
                a_ = std::sqrt(std::exp((-2.0 / lambda_) * std::log(2.0) +
                                        std::lgamma(1.0 / lambda_) - std::lgamma(3.0 / lambda_)));
                norm_ = std::log(lambda_) - (1.0 + 1.0 / lambda_) * std::log(2.0) -
                        std::lgamma(1.0 / lambda_) - std::log(a_);
                break;
            }
            case DistKind::SkewT: {
                nu_ = dist.shape[0];
                const double skew = dist.shape[1];
                const double log_c = std::lgamma(0.5 * (nu_ + 1.0)) - std::lgamma(0.5 * nu_) -
                                     0.5 * std::log(3.1415926535897932384626433832795 * (nu_ - 2.0));
                a_ = 4.0 * skew * std::exp(log_c) * (nu_ - 2.0) / (nu_ - 1.0);
                b_ = std::sqrt(1.0 + 3.0 * skew * skew - a_ * a_);
                lo_ = 1.0 - skew;
                hi_ = 1.0 + skew;
                norm_ = std::log(b_) + log_c;
                break;
            }
        }
    }

    double operator()(double z) const {
        switch (kind_) {
            case DistKind::Normal: return -0.5 * kLog2Pi - 0.5 * z * z;
            case DistKind::StudentT: {
                const double x = scale_ * z;
                return norm_ - 0.5 * (nu_ + 1.0) * std::log1p(x * x / nu_);
            }
            case DistKind::Ged:
                return norm_ - 0.5 * std::pow(std::abs(z / a_), lambda_);
            case DistKind::SkewT: {
                const double denom = (z < -a_ / b_) ? lo_ : hi_;
                const double t = (b_ * z + a_) / denom;
                return norm_ - 0.5 * (nu_ + 1.0) * std::log1p(t * t / (nu_ - 2.0));
            }
        }
        return 0.0;
    }

private:
    DistKind kind_;
    double nu_ = 0, scale_ = 0, norm_ = 0, lambda_ = 0, a_ = 0, b_ = 0, lo_ = 0, hi_ = 0;
};

void check_finite_positive(double h, std::size_t t) {
    if (!(h > 0.0) || !std::isfinite(h))
        throw NonFiniteVariance("h_" + std::to_string(t + 1) + " = " + std::to_string(h));
}

}  // namespace

std::string to_string(Family family) {
    switch (family) {
        case Family::Arch: return "arch";
        case Family::Garch: return "garch";
        case Family::GjrGarch: return "gjr-garch";
        case Family::Egarch: return "egarch";
        case Family::GjrEgarch: return "gjr-egarch";
        case Family::Figarch: return "figarch";
    }
    return "?";
}

void ModelSpec::validate() const {
    if (p < 0 || o < 0 || q < 0) throw ConfigError("negative lag order");
    switch (family) {
        case Family::Arch:
            if (p != 0 || o != 0 || q < 1) throw ConfigError("arch requires p=0, o=0, q>=1");
            break;
        case Family::Garch:
            if (o != 0 || p < 1 || q < 1) throw ConfigError("garch requires o=0, p>=1, q>=1");
            break;
        case Family::GjrGarch:
            if (o < 1) throw ConfigError("gjr-garch requires o>=1");
            break;
        case Family::Egarch:
            if (o != 0 || q < 1) throw ConfigError("egarch requires o=0, q>=1");
            break;
        case Family::GjrEgarch:
            if (o < 1 || q < 1) throw ConfigError("gjr-egarch requires o>=1, q>=1");
            break;
        case Family::Figarch:
            if (o != 0 || p > 1 || q > 1) throw ConfigError("figarch supports p in {0,1}, m in {0,1}");
            if (figarch_truncation < 1) throw ConfigError("figarch truncation must be >= 1");
            break;
    }
    innovation.validate();
}

int ModelSpec::max_lag() const { return std::max({p, o, q, 1}); }

ModelSpec parse_model(const std::string& text, const InnovationDist& innovation,
                      int figarch_truncation) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(static_cast<char>(std::tolower(c)));
    const auto open = s.find('(');
    std::string name = (open == std::string::npos) ? s : s.substr(0, open);
    std::vector<std::string> args;
    if (open != std::string::npos) {
        if (s.back() != ')') throw ConfigError("malformed model '" + text + "'");
        std::string body = s.substr(open + 1, s.size() - open - 2);
        std::stringstream ss(body);
        std::string cell;
        while (std::getline(ss, cell, ',')) args.push_back(cell);
    }
    auto to_int = [&text](const std::string& a) {
        try {
            return std::stoi(a);
        } catch (...) {
            throw ConfigError("bad order in model '" + text + "'");
        }
    };

    ModelSpec spec;
    spec.innovation = innovation;
    spec.figarch_truncation = figarch_truncation;
    if (name == "arch") {
        spec.family = Family::Arch;
        spec.p = 0;
        spec.o = 0;
        spec.q = args.empty() ? 1 : to_int(args[0]);
    } else if (name == "garch") {
        spec.family = Family::Garch;
        spec.p = args.size() > 0 ? to_int(args[0]) : 1;
        spec.q = args.size() > 1 ? to_int(args[1]) : 1;
    } else if (name == "gjr-garch" || name == "gjrgarch" || name == "gjr") {
        spec.family = Family::GjrGarch;
        if (args.size() == 3) {
            spec.p = to_int(args[0]);
            spec.o = to_int(args[1]);
            spec.q = to_int(args[2]);
        } else {
            spec.p = args.size() > 0 ? to_int(args[0]) : 1;
            spec.q = args.size() > 1 ? to_int(args[1]) : 1;
            spec.o = 1;
        }
    } else if (name == "egarch") {
        spec.family = Family::Egarch;
        spec.p = args.size() > 0 ? to_int(args[0]) : 1;
        spec.q = args.size() > 1 ? to_int(args[1]) : 1;
    } else if (name == "gjr-egarch" || name == "gjregarch") {
        spec.family = Family::GjrEgarch;
        if (args.size() == 3) {
            spec.p = to_int(args[0]);
            spec.o = to_int(args[1]);
            spec.q = to_int(args[2]);
        } else {
            spec.p = args.size() > 0 ? to_int(args[0]) : 1;
            spec.q = args.size() > 1 ? to_int(args[1]) : 1;
            spec.o = 1;
        }
    } else if (name == "figarch") {
        // figarch(m,d,p): m phi terms, the literal d, p beta terms.
        spec.family = Family::Figarch;
        if (args.empty()) {
            spec.q = 1;
            spec.p = 1;
        } else if (args.size() == 3 && args[1] == "d") {
            spec.q = to_int(args[0]);
            spec.p = to_int(args[2]);
        } else {
            throw ConfigError("figarch orders must be written as figarch(m,d,p)");
        }
        spec.o = 0;
    } else {
        throw ConfigError("unknown model family '" + name + "'");
    }
    spec.validate();
    return spec;
}

std::string model_name(const ModelSpec& spec) {
    std::ostringstream out;
    switch (spec.family) {
        case Family::Arch: out << "arch(" << spec.q << ")"; break;
        case Family::Garch: out << "garch(" << spec.p << "," << spec.q << ")"; break;
        case Family::GjrGarch:
            out << "gjr-garch(" << spec.p << "," << spec.o << "," << spec.q << ")";
            break;
        case Family::Egarch: out << "egarch(" << spec.p << "," << spec.q << ")"; break;
        case Family::GjrEgarch:
            out << "gjr-egarch(" << spec.p << "," << spec.o << "," << spec.q << ")";
            break;
        case Family::Figarch: out << "figarch(" << spec.q << ",d," << spec.p << ")"; break;
    }
    return out.str();
}

int parameter_count(const ModelSpec& spec) {
    spec.validate();
    const int shapes = spec.innovation.shape_count();
    switch (spec.family) {
        case Family::Arch:
        case Family::Garch:
        case Family::GjrGarch:
            return 1 + spec.q + spec.o + spec.p + shapes;
        case Family::Egarch:
        case Family::GjrEgarch:
            return 1 + 2 * spec.q + spec.o + spec.p + shapes;
        case Family::Figarch:
            return 1 + spec.p + spec.q + 1 + shapes;
    }
    return 0;
}

std::vector<std::string> parameter_names(const ModelSpec& spec) {
    spec.validate();
    std::vector<std::string> names;
    names.push_back("omega");
    const bool egarch = spec.is_egarch_family();
    const bool figarch = spec.family == Family::Figarch;
    if (!figarch)
        for (int j = 1; j <= spec.q; ++j) names.push_back("alpha_" + std::to_string(j));
    for (int j = 1; j <= spec.o; ++j) names.push_back("gamma_" + std::to_string(j));
    if (egarch)
        for (int j = 1; j <= spec.q; ++j) names.push_back("psi_" + std::to_string(j));
    for (int j = 1; j <= spec.p; ++j) names.push_back("beta_" + std::to_string(j));
    if (figarch) {
        if (spec.q == 1) names.push_back("phi");
        names.push_back("d");
    }
    switch (spec.innovation.kind) {
        case DistKind::Normal: break;
        case DistKind::StudentT: names.push_back("nu"); break;
        case DistKind::Ged: names.push_back("lambda"); break;
        case DistKind::SkewT:
            names.push_back("nu");
            names.push_back("skew");
            break;
    }
    return names;
}

void validate_constraints(const ModelSpec& spec, const ConstrainedParams& nu) {
    spec.validate();
    const bool figarch = spec.family == Family::Figarch;
    const auto expect = [](const std::vector<double>& v, int n, const char* what) {
        if (static_cast<int>(v.size()) != n)
            throw DimensionMismatch(std::string(what) + " has wrong length");
    };
    expect(nu.alpha, figarch ? 0 : spec.q, "alpha");
    expect(nu.gamma, spec.o, "gamma");
    expect(nu.psi, spec.is_egarch_family() ? spec.q : 0, "psi");
    expect(nu.beta, spec.p, "beta");
    expect(nu.dist_shape, spec.innovation.shape_count(), "dist_shape");

    InnovationDist dist = spec.innovation;
    dist.shape = nu.dist_shape;
    dist.validate();

    const double tol = kConstraintTol;
    switch (spec.family) {
        case Family::Arch:
        case Family::Garch: {
            if (!(nu.omega > 0.0)) throw ConstraintViolation("omega must be > 0");
            for (double a : nu.alpha)
                if (a < -tol) throw ConstraintViolation("alpha must be >= 0");
            for (double b : nu.beta)
                if (b < -tol) throw ConstraintViolation("beta must be >= 0");
            if (sum(nu.alpha) + sum(nu.beta) >= 1.0 + tol)
                throw ConstraintViolation("sum(alpha) + sum(beta) must be < 1");
            break;
        }
        case Family::GjrGarch: {
            if (!(nu.omega > 0.0)) throw ConstraintViolation("omega must be > 0");
            for (double a : nu.alpha)
                if (a < -tol) throw ConstraintViolation("alpha must be >= 0");
            for (double b : nu.beta)
                if (b < -tol) throw ConstraintViolation("beta must be >= 0");
            if (sum(nu.alpha) + sum(nu.gamma) < -tol)
                throw ConstraintViolation("sum(alpha) + sum(gamma) must be >= 0");
            if (sum(nu.alpha) + 0.5 * sum(nu.gamma) + sum(nu.beta) >= 1.0 + tol)
                throw ConstraintViolation("sum(alpha + gamma/2 + beta) must be < 1");
            break;
        }
        case Family::Egarch:
        case Family::GjrEgarch:
            break;  // log-variance recursion: unconstrained
        case Family::Figarch: {
            if (!(nu.omega > 0.0)) throw ConstraintViolation("omega must be > 0");
            if (nu.d < -tol || nu.d > 1.0 + tol) throw ConstraintViolation("d must be in [0,1]");
            const double phi = spec.q == 1 ? nu.phi : 0.0;
            if (phi < -tol || phi > 0.5 * (1.0 - nu.d) + tol)
                throw ConstraintViolation("phi must be in [0, (1-d)/2]");
            const double beta = spec.p == 1 ? nu.beta[0] : 0.0;
            if (beta < -tol || beta > nu.d + phi + tol)
                throw ConstraintViolation("beta must be in [0, d+phi]");
            break;
        }
    }
}

std::vector<double> figarch_weights(double phi, double beta, double d, int K) {
    if (K < 1) throw ConfigError("K must be >= 1");
    const double tol = kConstraintTol;
    if (d < -tol || d > 1.0 + tol) throw ConstraintViolation("d must be in [0,1]");
    if (phi < -tol || phi > 0.5 * (1.0 - d) + tol)
        throw ConstraintViolation("phi must be in [0, (1-d)/2]");
    if (beta < -tol || beta > d + phi + tol) throw ConstraintViolation("beta must be in [0, d+phi]");

    std::vector<double> lambda(static_cast<std::size_t>(K));
    double delta = d;  // delta_1
    lambda[0] = phi - beta + d;
    for (int k = 2; k <= K; ++k) {
        // lambda_k = beta lambda_{k-1} + delta_{k-1} ((k-1-d)/k - phi),
        // factored so the nonnegative sign is explicit under the constraints.
        const double ratio = (static_cast<double>(k) - 1.0 - d) / static_cast<double>(k);
        lambda[static_cast<std::size_t>(k - 1)] =
            beta * lambda[static_cast<std::size_t>(k - 2)] + delta * (ratio - phi);
        delta *= ratio;
    }
    return lambda;
}

std::vector<double> variance_recursion(const ModelSpec& spec, const ConstrainedParams& nu,
                                       const std::vector<double>& returns, double h_init) {
    validate_constraints(spec, nu);
    if (returns.empty()) throw EmptySeries();
    if (!(h_init > 0.0) || !std::isfinite(h_init))
        throw NonFiniteVariance("h_init must be positive and finite");

    const std::size_t T = returns.size();
    std::vector<double> h(T);

    switch (spec.family) {
        case Family::Arch:
        case Family::Garch:
        case Family::GjrGarch: {
            const auto lag = static_cast<std::size_t>(spec.max_lag());
            for (std::size_t t = 0; t < std::min(lag, T); ++t) h[t] = h_init;
            for (std::size_t t = lag; t < T; ++t) {
                double v = nu.omega;
                for (int j = 1; j <= spec.q; ++j) {
                    const double e = returns[t - static_cast<std::size_t>(j)];
                    v += nu.alpha[static_cast<std::size_t>(j - 1)] * e * e;
                }
                for (int j = 1; j <= spec.o; ++j) {
                    const double e = returns[t - static_cast<std::size_t>(j)];
                    if (e > 0.0) v += nu.gamma[static_cast<std::size_t>(j - 1)] * e * e;
                }
                for (int j = 1; j <= spec.p; ++j)
                    v += nu.beta[static_cast<std::size_t>(j - 1)] * h[t - static_cast<std::size_t>(j)];
                check_finite_positive(v, t);
                h[t] = v;
            }
            break;
        }
        case Family::Egarch:
        case Family::GjrEgarch: {
            InnovationDist dist = spec.innovation;
            dist.shape = nu.dist_shape;
            const double mean_abs = innovation_mean_abs(dist);
            const double log_h0 = std::log(h_init);
            std::vector<double> log_h(T), z(T);
            for (std::size_t t = 0; t < T; ++t) {
                double v = nu.omega;
                for (int j = 1; j <= spec.q; ++j) {
                    if (t < static_cast<std::size_t>(j)) continue;  // pre-sample g = 0
                    const double zj = z[t - static_cast<std::size_t>(j)];
                    v += nu.alpha[static_cast<std::size_t>(j - 1)] * zj +
                         nu.psi[static_cast<std::size_t>(j - 1)] * (std::abs(zj) - mean_abs);
                }
                for (int j = 1; j <= spec.o; ++j) {
                    if (t < static_cast<std::size_t>(j)) continue;
                    const double zj = z[t - static_cast<std::size_t>(j)];
                    if (zj > 0.0) v += nu.gamma[static_cast<std::size_t>(j - 1)] * zj;
                }
                for (int j = 1; j <= spec.p; ++j) {
                    const double lh = (t < static_cast<std::size_t>(j))
                                          ? log_h0
                                          : log_h[t - static_cast<std::size_t>(j)];
                    v += nu.beta[static_cast<std::size_t>(j - 1)] * lh;
                }
                if (!std::isfinite(v)) throw NonFiniteVariance("egarch log-variance diverged");
                v = std::clamp(v, -kLogVarClamp, kLogVarClamp);
                log_h[t] = v;
                h[t] = std::exp(v);
                z[t] = returns[t] / std::sqrt(h[t]);
            }
            break;
        }
        case Family::Figarch: {
            const double phi = spec.q == 1 ? nu.phi : 0.0;
            const double beta = spec.p == 1 ? nu.beta[0] : 0.0;
            const auto lambda = figarch_weights(phi, beta, nu.d, spec.figarch_truncation);
            const auto K = lambda.size();
            // Tail mass of the pre-sample back-cast: sum of weights past the
            // available history, all multiplying eps^2 = h_init.
            std::vector<double> tail(K + 1, 0.0);
            for (std::size_t k = K; k-- > 0;) tail[k] = tail[k + 1] + lambda[k];
            for (std::size_t t = 0; t < T; ++t) {
                double v = nu.omega;
                const std::size_t avail = std::min(t, K);
                for (std::size_t k = 0; k < avail; ++k) {
                    const double e = returns[t - 1 - k];
                    v += lambda[k] * e * e;
                }
                v += tail[avail] * h_init;
                check_finite_positive(v, t);
                h[t] = v;
            }
            break;
        }
    }
    return h;
}

VariancePath variance_path(const ModelSpec& spec, const ConstrainedParams& nu,
                           const ReturnSeries& series, double h_init) {
    VariancePath path;
    path.h = variance_recursion(spec, nu, series.returns(), h_init);
    InnovationDist dist = spec.innovation;
    dist.shape = nu.dist_shape;
    const LogPdfEval logpdf(dist);
    path.loglik_per_obs.resize(path.h.size());
    for (std::size_t t = 0; t < path.h.size(); ++t) {
        const double ht = path.h[t];
        const double z = series.returns()[t] / std::sqrt(ht);
        path.loglik_per_obs[t] = logpdf(z) - 0.5 * std::log(ht);
    }
    return path;
}

double qml_objective(const ModelSpec& spec, const ConstrainedParams& nu,
                     const std::vector<double>& returns, double h_init) {
    const auto h = variance_recursion(spec, nu, returns, h_init);
    double obj = 0.0;
    for (std::size_t t = 0; t < h.size(); ++t)
        obj += std::log(h[t]) + returns[t] * returns[t] / h[t];
    return obj;
}

double qml_objective(const ModelSpec& spec, const ConstrainedParams& nu,
                     const ReturnSeries& series) {
    return qml_objective(spec, nu, series.returns(), backcast_variance(series));
}

double log_likelihood(const ModelSpec& spec, const ConstrainedParams& nu,
                      const std::vector<double>& returns, double h_init) {
    const auto h = variance_recursion(spec, nu, returns, h_init);
    const double half_sum_log_h = 0.5 * sum_log(h);
    InnovationDist dist = spec.innovation;
    dist.shape = nu.dist_shape;
    if (dist.kind == DistKind::Normal) {
        double sq = 0.0;
        for (std::size_t t = 0; t < h.size(); ++t) sq += returns[t] * returns[t] / h[t];
        return -0.5 * kLog2Pi * static_cast<double>(h.size()) - half_sum_log_h - 0.5 * sq;
    }
    const LogPdfEval logpdf(dist);
    double lp = 0.0;
    for (std::size_t t = 0; t < h.size(); ++t) lp += logpdf(returns[t] / std::sqrt(h[t]));
    return lp - half_sum_log_h;
}

double log_likelihood(const ModelSpec& spec, const ConstrainedParams& nu,
                      const ReturnSeries& series) {
    return log_likelihood(spec, nu, series.returns(), backcast_variance(series));
}

namespace {

double unconditional_start(const ModelSpec& spec, const ConstrainedParams& nu) {
    switch (spec.family) {
        case Family::Arch:
        case Family::Garch:
        case Family::GjrGarch: {
            const double den = 1.0 - sum(nu.alpha) - 0.5 * sum(nu.gamma) - sum(nu.beta);
            return den > 1e-8 ? nu.omega / den : nu.omega;
        }
        case Family::Egarch:
        case Family::GjrEgarch: {
            const double den = 1.0 - sum(nu.beta);
            const double lv = std::abs(den) > 1e-8 ? nu.omega / den : nu.omega;
            return std::exp(std::clamp(lv, -kLogVarClamp, kLogVarClamp));
        }
        case Family::Figarch: {
            const double phi = spec.q == 1 ? nu.phi : 0.0;
            const double beta = spec.p == 1 ? nu.beta[0] : 0.0;
            const auto lambda = figarch_weights(phi, beta, nu.d, spec.figarch_truncation);
            const double den = 1.0 - sum(lambda);
            return den > 1e-8 ? nu.omega / den : nu.omega;
        }
    }
    return 1.0;
}

}  // namespace

ReturnSeries simulate(const ModelSpec& spec, const ConstrainedParams& nu, int T,
                      std::uint64_t seed) {
    validate_constraints(spec, nu);
    if (T < 1) throw ConfigError("T must be >= 1");

    InnovationDist dist = spec.innovation;
    dist.shape = nu.dist_shape;
    Rng rng(seed);

    const double h_start = std::max(unconditional_start(spec, nu), 1e-12);
    std::vector<double> eps(static_cast<std::size_t>(T));
    std::vector<double> h(static_cast<std::size_t>(T));

    if (spec.is_egarch_family()) {
        const double mean_abs = innovation_mean_abs(dist);
        const double log_h0 = std::log(h_start);
        std::vector<double> log_h(static_cast<std::size_t>(T)), z(static_cast<std::size_t>(T));
        for (int t = 0; t < T; ++t) {
            double v = nu.omega;
            for (int j = 1; j <= spec.q; ++j) {
                if (t < j) continue;
                const double zj = z[static_cast<std::size_t>(t - j)];
                v += nu.alpha[static_cast<std::size_t>(j - 1)] * zj +
                     nu.psi[static_cast<std::size_t>(j - 1)] * (std::abs(zj) - mean_abs);
            }
            for (int j = 1; j <= spec.o; ++j) {
                if (t < j) continue;
                const double zj = z[static_cast<std::size_t>(t - j)];
                if (zj > 0.0) v += nu.gamma[static_cast<std::size_t>(j - 1)] * zj;
            }
            for (int j = 1; j <= spec.p; ++j)
                v += nu.beta[static_cast<std::size_t>(j - 1)] *
                     (t < j ? log_h0 : log_h[static_cast<std::size_t>(t - j)]);
            v = std::clamp(v, -kLogVarClamp, kLogVarClamp);
            log_h[static_cast<std::size_t>(t)] = v;
            const double ht = std::exp(v);
            h[static_cast<std::size_t>(t)] = ht;
            const double zt = innovation_sample(dist, rng);
            z[static_cast<std::size_t>(t)] = zt;
            eps[static_cast<std::size_t>(t)] = std::sqrt(ht) * zt;
        }
    } else if (spec.family == Family::Figarch) {
        const double phi = spec.q == 1 ? nu.phi : 0.0;
        const double beta = spec.p == 1 ? nu.beta[0] : 0.0;
        const auto lambda = figarch_weights(phi, beta, nu.d, spec.figarch_truncation);
        const auto K = lambda.size();
        std::vector<double> tail(K + 1, 0.0);
        for (std::size_t k = K; k-- > 0;) tail[k] = tail[k + 1] + lambda[k];
        for (int t = 0; t < T; ++t) {
            double v = nu.omega;
            const std::size_t avail = std::min(static_cast<std::size_t>(t), K);
            for (std::size_t k = 0; k < avail; ++k) {
                const double e = eps[static_cast<std::size_t>(t) - 1 - k];
                v += lambda[k] * e * e;
            }
            v += tail[avail] * h_start;
            h[static_cast<std::size_t>(t)] = v;
            eps[static_cast<std::size_t>(t)] = std::sqrt(v) * innovation_sample(dist, rng);
        }
    } else {
        for (int t = 0; t < T; ++t) {
            double v = nu.omega;
            for (int j = 1; j <= spec.q; ++j) {
                const double e2 = t < j ? h_start
                                        : eps[static_cast<std::size_t>(t - j)] *
                                              eps[static_cast<std::size_t>(t - j)];
                v += nu.alpha[static_cast<std::size_t>(j - 1)] * e2;
            }
            for (int j = 1; j <= spec.o; ++j) {
                // pre-sample indicator term at its expectation h/2
                if (t < j) {
                    v += nu.gamma[static_cast<std::size_t>(j - 1)] * 0.5 * h_start;
                } else {
                    const double e = eps[static_cast<std::size_t>(t - j)];
                    if (e > 0.0) v += nu.gamma[static_cast<std::size_t>(j - 1)] * e * e;
                }
            }
            for (int j = 1; j <= spec.p; ++j)
                v += nu.beta[static_cast<std::size_t>(j - 1)] *
                     (t < j ? h_start : h[static_cast<std::size_t>(t - j)]);
            h[static_cast<std::size_t>(t)] = v;
            eps[static_cast<std::size_t>(t)] = std::sqrt(v) * innovation_sample(dist, rng);
        }
    }

    std::vector<Date> dates(static_cast<std::size_t>(T));
    Date day{2000, 1, 1};
    for (int t = 0; t < T; ++t) {
        dates[static_cast<std::size_t>(t)] = day;
        day = day.plus_days(1);
    }
    return ReturnSeries(std::move(dates), std::move(eps));
}

std::vector<double> forecast_variance(const ModelSpec& spec, const ConstrainedParams& nu,
                                      const std::vector<double>& history, double h_init,
                                      int horizon) {
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    const auto h = variance_recursion(spec, nu, history, h_init);
    const std::size_t T = history.size();
    std::vector<double> out(static_cast<std::size_t>(horizon));

    if (spec.is_egarch_family()) {
        InnovationDist dist = spec.innovation;
        dist.shape = nu.dist_shape;
        const double mean_abs = innovation_mean_abs(dist);
        std::vector<double> z(T);
        for (std::size_t t = 0; t < T; ++t) z[t] = history[t] / std::sqrt(h[t]);
        const double log_h0 = std::log(h_init);
        std::vector<double> log_h_fut(static_cast<std::size_t>(horizon));
        for (int k = 0; k < horizon; ++k) {
            double v = nu.omega;
            for (int j = 1; j <= spec.q; ++j) {
                const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(T) + k - j;
                if (idx < static_cast<std::ptrdiff_t>(T) && idx >= 0) {
                    const double zj = z[static_cast<std::size_t>(idx)];
                    v += nu.alpha[static_cast<std::size_t>(j - 1)] * zj +
                         nu.psi[static_cast<std::size_t>(j - 1)] * (std::abs(zj) - mean_abs);
                }
                // future g-terms enter at their zero mean
            }
            for (int j = 1; j <= spec.o; ++j) {
                const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(T) + k - j;
                if (idx < static_cast<std::ptrdiff_t>(T) && idx >= 0) {
                    const double zj = z[static_cast<std::size_t>(idx)];
                    if (zj > 0.0) v += nu.gamma[static_cast<std::size_t>(j - 1)] * zj;
                }
            }
            for (int j = 1; j <= spec.p; ++j) {
                const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(T) + k - j;
                double lh;
                if (idx >= static_cast<std::ptrdiff_t>(T))
                    lh = log_h_fut[static_cast<std::size_t>(idx - static_cast<std::ptrdiff_t>(T))];
                else if (idx >= 0)
                    lh = std::log(h[static_cast<std::size_t>(idx)]);
                else
                    lh = log_h0;
                v += nu.beta[static_cast<std::size_t>(j - 1)] * lh;
            }
            v = std::clamp(v, -kLogVarClamp, kLogVarClamp);
            log_h_fut[static_cast<std::size_t>(k)] = v;
            out[static_cast<std::size_t>(k)] = std::exp(v);
        }
        return out;
    }

    if (spec.family == Family::Figarch) {
        const double phi = spec.q == 1 ? nu.phi : 0.0;
        const double beta = spec.p == 1 ? nu.beta[0] : 0.0;
        const auto lambda = figarch_weights(phi, beta, nu.d, spec.figarch_truncation);
        const auto K = lambda.size();
        for (int k = 0; k < horizon; ++k) {
            double v = nu.omega;
            for (std::size_t j = 1; j <= K; ++j) {
                const std::ptrdiff_t idx =
                    static_cast<std::ptrdiff_t>(T) + k - static_cast<std::ptrdiff_t>(j);
                double e2;
                if (idx >= static_cast<std::ptrdiff_t>(T))
                    e2 = out[static_cast<std::size_t>(idx - static_cast<std::ptrdiff_t>(T))];
                else if (idx >= 0)
                    e2 = history[static_cast<std::size_t>(idx)] * history[static_cast<std::size_t>(idx)];
                else
                    e2 = h_init;
                v += lambda[j - 1] * e2;
            }
            out[static_cast<std::size_t>(k)] = v;
        }
        return out;
    }

    for (int k = 0; k < horizon; ++k) {
        double v = nu.omega;
        for (int j = 1; j <= spec.q; ++j) {
            const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(T) + k - j;
            double e2;
            if (idx >= static_cast<std::ptrdiff_t>(T))
                e2 = out[static_cast<std::size_t>(idx - static_cast<std::ptrdiff_t>(T))];
            else if (idx >= 0)
                e2 = history[static_cast<std::size_t>(idx)] * history[static_cast<std::size_t>(idx)];
            else
                e2 = h_init;
            v += nu.alpha[static_cast<std::size_t>(j - 1)] * e2;
        }
        for (int j = 1; j <= spec.o; ++j) {
            const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(T) + k - j;
            if (idx >= static_cast<std::ptrdiff_t>(T)) {
                v += nu.gamma[static_cast<std::size_t>(j - 1)] * 0.5 *
                     out[static_cast<std::size_t>(idx - static_cast<std::ptrdiff_t>(T))];
            } else if (idx >= 0) {
                const double e = history[static_cast<std::size_t>(idx)];
                if (e > 0.0) v += nu.gamma[static_cast<std::size_t>(j - 1)] * e * e;
            } else {
                v += nu.gamma[static_cast<std::size_t>(j - 1)] * 0.5 * h_init;
            }
        }
        for (int j = 1; j <= spec.p; ++j) {
            const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(T) + k - j;
            double hv;
            if (idx >= static_cast<std::ptrdiff_t>(T))
                hv = out[static_cast<std::size_t>(idx - static_cast<std::ptrdiff_t>(T))];
            else if (idx >= 0)
                hv = h[static_cast<std::size_t>(idx)];
            else
                hv = h_init;
            v += nu.beta[static_cast<std::size_t>(j - 1)] * hv;
        }
        out[static_cast<std::size_t>(k)] = v;
    }
    return out;
}

std::vector<double> forecast_variance(const ModelSpec& spec, const ConstrainedParams& nu,
                                      const ReturnSeries& history, int horizon) {
    return forecast_variance(spec, nu, history.returns(), backcast_variance(history), horizon);
}

}  // namespace garchvi
