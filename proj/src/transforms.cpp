#include "garchvi/transforms.hpp"

#include <cmath>

#include "garchvi/errors.hpp"

namespace garchvi {

namespace {

constexpr double kClamp = 1e-12;
constexpr double kShapePedestal = 1e-4;

void check_dim(const TransformSpec& tspec, Eigen::Index n) {
    if (n != tspec.dim())
        throw DimensionMismatch("theta has length " + std::to_string(n) + ", expected " +
                                std::to_string(tspec.dim()));
}

}  // namespace

double logistic(double x) {
    const double f = 1.0 / (1.0 + std::exp(-x));
    return std::clamp(f, kClamp, 1.0 - kClamp);
}

double logit(double u) {
    if (!(u > 0.0 && u < 1.0)) throw BoundaryValue("logit argument " + std::to_string(u));
    return std::log(u / (1.0 - u));
}

std::vector<double> dist_shape_inverse(DistKind kind, const std::vector<double>& theta_shape,
                                       bool ged_pedestal) {
    switch (kind) {
        case DistKind::Normal:
            return {};
        case DistKind::StudentT:
            return {2.0 + theta_shape.at(0) * theta_shape.at(0) + kShapePedestal};
        case DistKind::Ged:
            if (ged_pedestal)
                return {2.0 + theta_shape.at(0) * theta_shape.at(0) + kShapePedestal};
            return {std::exp(theta_shape.at(0))};
        case DistKind::SkewT:
            return {2.0 + theta_shape.at(0) * theta_shape.at(0) + kShapePedestal,
                    2.0 * logistic(theta_shape.at(1)) - 1.0};
    }
    return {};
}

std::vector<double> dist_shape_forward(DistKind kind, const std::vector<double>& shape,
                                       bool ged_pedestal) {
    auto sqrt_excess = [](double v, double floor_at) {
        const double excess = v - floor_at - kShapePedestal;
        if (excess < 0.0) throw BoundaryValue("shape parameter below its pedestal");
        return std::sqrt(excess);
    };
    switch (kind) {
        case DistKind::Normal:
            return {};
        case DistKind::StudentT:
            return {sqrt_excess(shape.at(0), 2.0)};
        case DistKind::Ged:
            if (ged_pedestal) return {sqrt_excess(shape.at(0), 2.0)};
            if (!(shape.at(0) > 0.0)) throw BoundaryValue("ged lambda must be > 0");
            return {std::log(shape.at(0))};
        case DistKind::SkewT:
            return {sqrt_excess(shape.at(0), 2.0), logit(0.5 * (shape.at(1) + 1.0))};
    }
    return {};
}

ConstrainedParams inverse_transform(const TransformSpec& tspec, const Eigen::VectorXd& theta) {
    check_dim(tspec, theta.size());
    const ModelSpec& spec = tspec.spec;
    ConstrainedParams nu;
    Eigen::Index i = 0;

    switch (spec.family) {
        case Family::Arch:
        case Family::Garch:
        case Family::GjrGarch: {
            // Sequential budget cascade: s tracks the remaining room in the
            // stationarity constraint sum(alpha + gamma/2 + beta) < 1. The
            // printed pseudocode's budget updates are transcribed as
            // s -= alpha_i / 0.5*gamma_i / beta_i, which reproduces the
            // closed forms at (1,1,1) and (1,0,1) and keeps the constraint
            // satisfied for any orders.
            nu.omega = std::exp(theta[i++]);
            double s = 1.0;
            nu.alpha.resize(static_cast<std::size_t>(spec.q));
            for (int j = 0; j < spec.q; ++j) {
                nu.alpha[static_cast<std::size_t>(j)] = logistic(theta[i++]) * s;
                s -= nu.alpha[static_cast<std::size_t>(j)];
            }
            nu.gamma.resize(static_cast<std::size_t>(spec.o));
            for (int j = 0; j < spec.o; ++j) {
                double g = logistic(theta[i++]);
                if (j < spec.q) {
                    // paired with alpha_j: gamma in (-alpha_j, 2s)
                    const double a = nu.alpha[static_cast<std::size_t>(j)];
                    g = (2.0 * s + a) * g - a;
                } else {
                    g = 2.0 * s * g;
                }
                nu.gamma[static_cast<std::size_t>(j)] = g;
                s -= 0.5 * g;
            }
            nu.beta.resize(static_cast<std::size_t>(spec.p));
            for (int j = 0; j < spec.p; ++j) {
                nu.beta[static_cast<std::size_t>(j)] = logistic(theta[i++]) * s;
                s -= nu.beta[static_cast<std::size_t>(j)];
            }
            break;
        }
        case Family::Egarch:
        case Family::GjrEgarch: {
            nu.omega = theta[i++];
            nu.alpha.resize(static_cast<std::size_t>(spec.q));
            for (int j = 0; j < spec.q; ++j) nu.alpha[static_cast<std::size_t>(j)] = theta[i++];
            nu.gamma.resize(static_cast<std::size_t>(spec.o));
            for (int j = 0; j < spec.o; ++j) nu.gamma[static_cast<std::size_t>(j)] = theta[i++];
            nu.psi.resize(static_cast<std::size_t>(spec.q));
            for (int j = 0; j < spec.q; ++j) nu.psi[static_cast<std::size_t>(j)] = theta[i++];
            nu.beta.resize(static_cast<std::size_t>(spec.p));
            for (int j = 0; j < spec.p; ++j) nu.beta[static_cast<std::size_t>(j)] = theta[i++];
            break;
        }
        case Family::Figarch: {
            nu.omega = std::exp(theta[i++]);
            // beta depends on phi and d, so read those slots first.
            const Eigen::Index beta_at = i;
            i += spec.p;
            const Eigen::Index phi_at = i;
            i += spec.q;
            nu.d = logistic(theta[i++]);
            nu.phi = spec.q == 1 ? logistic(theta[phi_at]) * 0.5 * (1.0 - nu.d) : 0.0;
            nu.beta.resize(static_cast<std::size_t>(spec.p));
            if (spec.p == 1) nu.beta[0] = logistic(theta[beta_at]) * (nu.phi + nu.d);
            break;
        }
    }

    std::vector<double> theta_shape;
    for (; i < theta.size(); ++i) theta_shape.push_back(theta[i]);
    nu.dist_shape = dist_shape_inverse(spec.innovation.kind, theta_shape, tspec.ged_pedestal);
    return nu;
}

Eigen::VectorXd inverse_transform_vec(const TransformSpec& tspec, const Eigen::VectorXd& theta) {
    return pack_params(tspec, inverse_transform(tspec, theta));
}

Eigen::VectorXd forward_transform(const TransformSpec& tspec, const ConstrainedParams& nu) {
    validate_constraints(tspec.spec, nu);
    const ModelSpec& spec = tspec.spec;
    Eigen::VectorXd theta(tspec.dim());
    Eigen::Index i = 0;

    switch (spec.family) {
        case Family::Arch:
        case Family::Garch:
        case Family::GjrGarch: {
            if (!(nu.omega > 0.0)) throw BoundaryValue("omega must be > 0");
            theta[i++] = std::log(nu.omega);
            double s = 1.0;
            for (int j = 0; j < spec.q; ++j) {
                const double a = nu.alpha[static_cast<std::size_t>(j)];
                theta[i++] = logit(a / s);
                s -= a;
            }
            for (int j = 0; j < spec.o; ++j) {
                const double g = nu.gamma[static_cast<std::size_t>(j)];
                if (j < spec.q) {
                    const double a = nu.alpha[static_cast<std::size_t>(j)];
                    theta[i++] = logit((g + a) / (2.0 * s + a));
                } else {
                    theta[i++] = logit(g / (2.0 * s));
                }
                s -= 0.5 * g;
            }
            for (int j = 0; j < spec.p; ++j) {
                const double b = nu.beta[static_cast<std::size_t>(j)];
                theta[i++] = logit(b / s);
                s -= b;
            }
            break;
        }
        case Family::Egarch:
        case Family::GjrEgarch: {
            theta[i++] = nu.omega;
            for (int j = 0; j < spec.q; ++j) theta[i++] = nu.alpha[static_cast<std::size_t>(j)];
            for (int j = 0; j < spec.o; ++j) theta[i++] = nu.gamma[static_cast<std::size_t>(j)];
            for (int j = 0; j < spec.q; ++j) theta[i++] = nu.psi[static_cast<std::size_t>(j)];
            for (int j = 0; j < spec.p; ++j) theta[i++] = nu.beta[static_cast<std::size_t>(j)];
            break;
        }
        case Family::Figarch: {
            if (!(nu.omega > 0.0)) throw BoundaryValue("omega must be > 0");
            theta[i++] = std::log(nu.omega);
            if (spec.p == 1) {
                const double denom = nu.phi + nu.d;
                if (!(denom > 0.0)) throw BoundaryValue("phi + d must be > 0 to place beta");
                theta[i++] = logit(nu.beta[0] / denom);
            }
            if (spec.q == 1) {
                const double denom = 0.5 * (1.0 - nu.d);
                if (!(denom > 0.0)) throw BoundaryValue("d = 1 leaves no room for phi");
                theta[i++] = logit(nu.phi / denom);
            }
            theta[i++] = logit(nu.d);
            break;
        }
    }

    const auto shape_theta =
        dist_shape_forward(spec.innovation.kind, nu.dist_shape, tspec.ged_pedestal);
    for (double v : shape_theta) theta[i++] = v;
    return theta;
}

Eigen::VectorXd pack_params(const TransformSpec& tspec, const ConstrainedParams& nu) {
    const ModelSpec& spec = tspec.spec;
    Eigen::VectorXd out(tspec.dim());
    Eigen::Index i = 0;
    out[i++] = nu.omega;
    if (spec.family != Family::Figarch)
        for (int j = 0; j < spec.q; ++j) out[i++] = nu.alpha[static_cast<std::size_t>(j)];
    for (int j = 0; j < spec.o; ++j) out[i++] = nu.gamma[static_cast<std::size_t>(j)];
    if (spec.is_egarch_family())
        for (int j = 0; j < spec.q; ++j) out[i++] = nu.psi[static_cast<std::size_t>(j)];
    for (int j = 0; j < spec.p; ++j) out[i++] = nu.beta[static_cast<std::size_t>(j)];
    if (spec.family == Family::Figarch) {
        if (spec.q == 1) out[i++] = nu.phi;
        out[i++] = nu.d;
    }
    for (double v : nu.dist_shape) out[i++] = v;
    return out;
}

ConstrainedParams unpack_params(const TransformSpec& tspec, const Eigen::VectorXd& values) {
    check_dim(tspec, values.size());
    const ModelSpec& spec = tspec.spec;
    ConstrainedParams nu;
    Eigen::Index i = 0;
    nu.omega = values[i++];
    if (spec.family != Family::Figarch) {
        nu.alpha.resize(static_cast<std::size_t>(spec.q));
        for (int j = 0; j < spec.q; ++j) nu.alpha[static_cast<std::size_t>(j)] = values[i++];
    }
    nu.gamma.resize(static_cast<std::size_t>(spec.o));
    for (int j = 0; j < spec.o; ++j) nu.gamma[static_cast<std::size_t>(j)] = values[i++];
    if (spec.is_egarch_family()) {
        nu.psi.resize(static_cast<std::size_t>(spec.q));
        for (int j = 0; j < spec.q; ++j) nu.psi[static_cast<std::size_t>(j)] = values[i++];
    }
    nu.beta.resize(static_cast<std::size_t>(spec.p));
    for (int j = 0; j < spec.p; ++j) nu.beta[static_cast<std::size_t>(j)] = values[i++];
    if (spec.family == Family::Figarch) {
        if (spec.q == 1) nu.phi = values[i++];
        nu.d = values[i++];
    }
    nu.dist_shape.clear();
    for (; i < values.size(); ++i) nu.dist_shape.push_back(values[i]);
    return nu;
}

}  // namespace garchvi
