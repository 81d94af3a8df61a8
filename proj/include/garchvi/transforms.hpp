#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "garchvi/models.hpp"

namespace garchvi {

/// Logistic 1/(1+exp(-x)), clamped to [1e-12, 1-1e-12] so inverse-transformed
/// parameters never sit exactly on a constraint boundary.
double logistic(double x);

/// Log-odds; argument must lie strictly inside (0,1) or BoundaryValue is thrown.
double logit(double u);

/// Index bookkeeping for the map between a model's constrained parameters and
/// the unconstrained vector theta. The canonical ordering is omega,
/// alpha_1..q, gamma_1..o, psi_1..q (EGARCH), beta_1..p, [phi], [d], then
/// distribution shapes; every serialized parameter vector uses it.
struct TransformSpec {
    ModelSpec spec;
    /// Strict-paper mode for the GED shape: lambda = 2 + theta^2 + eps
    /// instead of the default exp(theta).
    bool ged_pedestal = false;

    explicit TransformSpec(ModelSpec model_spec, bool ged_pedestal_mode = false)
        : spec(std::move(model_spec)), ged_pedestal(ged_pedestal_mode) {
        spec.validate();
    }

    int dim() const { return parameter_count(spec); }
    std::vector<std::string> names() const { return parameter_names(spec); }
};

/// Maps unconstrained theta into the family's constraint set. The result
/// satisfies the full constraint set for every finite theta. Throws
/// DimensionMismatch when theta has the wrong length.
ConstrainedParams inverse_transform(const TransformSpec& tspec, const Eigen::VectorXd& theta);

/// Same map, returning the constrained values in canonical order.
Eigen::VectorXd inverse_transform_vec(const TransformSpec& tspec, const Eigen::VectorXd& theta);

/// Analytic inverse of inverse_transform. Requires nu strictly inside the
/// constraint set; throws BoundaryValue when any constraint binds exactly.
Eigen::VectorXd forward_transform(const TransformSpec& tspec, const ConstrainedParams& nu);

/// Shape-parameter halves of the transform pair. StudentT / SkewT use
/// nu = 2 + theta^2 + 1e-4; the skew maps to (-1,1) via 2f(theta)-1; GED uses
/// lambda = exp(theta) unless ged_pedestal.
std::vector<double> dist_shape_inverse(DistKind kind, const std::vector<double>& theta_shape,
                                       bool ged_pedestal = false);
std::vector<double> dist_shape_forward(DistKind kind, const std::vector<double>& shape,
                                       bool ged_pedestal = false);

/// ConstrainedParams <-> canonical vector.
Eigen::VectorXd pack_params(const TransformSpec& tspec, const ConstrainedParams& nu);
ConstrainedParams unpack_params(const TransformSpec& tspec, const Eigen::VectorXd& values);

}  // namespace garchvi
