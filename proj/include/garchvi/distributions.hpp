#pragma once

#include <functional>
#include <string>
#include <vector>

#include "garchvi/rng.hpp"

namespace garchvi {

enum class DistKind { Normal, StudentT, Ged, SkewT };

std::string to_string(DistKind kind);
DistKind dist_from_string(const std::string& name);

/// Innovation distribution for the standardized shocks z_t. Every member is
/// scaled to zero mean and unit variance, so E[eps_t^2 | F_{t-1}] = h_t holds
/// for all of them.
///
/// Shape layout: Normal {}, StudentT {nu}, Ged {lambda}, SkewT {nu, skew}.
struct InnovationDist {
    DistKind kind = DistKind::Normal;
    std::vector<double> shape;

    static InnovationDist normal() { return {DistKind::Normal, {}}; }
    static InnovationDist student_t(double nu) { return {DistKind::StudentT, {nu}}; }
    static InnovationDist ged(double lambda) { return {DistKind::Ged, {lambda}}; }
    static InnovationDist skew_t(double nu, double skew) { return {DistKind::SkewT, {nu, skew}}; }

    int shape_count() const;

    /// Throws ShapeViolation unless: StudentT nu>2; Ged lambda>0;
    /// SkewT nu>2 and skew in (-1,1).
    void validate() const;
};

/// Log-density of the standardized innovation at z.
double innovation_logpdf(const InnovationDist& dist, double z);

/// E|z| under the distribution; the centering constant of the EGARCH
/// magnitude term. Closed form for Normal/StudentT/Ged, quadrature for SkewT.
double innovation_mean_abs(const InnovationDist& dist);

/// One standardized draw.
double innovation_sample(const InnovationDist& dist, Rng& rng);

namespace detail {
/// Gauss-Legendre integral of f over the real line. `breakpoints` mark the
/// kinks of f; each smooth piece is integrated separately, the unbounded
/// pieces through a tan substitution. Internal helper; tests carry their own
/// independent quadrature.
double integrate_real_line(const std::function<double(double)>& f,
                           std::vector<double> breakpoints = {0.0});
}  // namespace detail

}  // namespace garchvi
