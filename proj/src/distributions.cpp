#include "garchvi/distributions.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "garchvi/errors.hpp"

namespace garchvi {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kPi = 3.1415926535897932384626433832795;

struct SkewTConsts {
    double a, b, log_c;
};

// Hansen's skewed-t normalization: c = Gamma((nu+1)/2) / (sqrt(pi(nu-2)) Gamma(nu/2)),
// a = 4 skew c (nu-2)/(nu-1), b^2 = 1 + 3 skew^2 - a^2.
SkewTConsts skew_t_consts(double nu, double skew) {
    const double log_c = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                         0.5 * std::log(kPi * (nu - 2.0));
    const double c = std::exp(log_c);
    const double a = 4.0 * skew * c * (nu - 2.0) / (nu - 1.0);
    const double b = std::sqrt(1.0 + 3.0 * skew * skew - a * a);
    return {a, b, log_c};
}

// Scale of the unit-variance GED: a^2 = 2^(-2/lambda) Gamma(1/lambda) / Gamma(3/lambda).
double ged_scale(double lambda) {
    return std::sqrt(std::exp((-2.0 / lambda) * std::log(2.0) + std::lgamma(1.0 / lambda) -
                              std::lgamma(3.0 / lambda)));
}

}  // namespace

std::string to_string(DistKind kind) {
    switch (kind) {
        case DistKind::Normal: return "normal";
        case DistKind::StudentT: return "student-t";
        case DistKind::Ged: return "ged";
        case DistKind::SkewT: return "skew-t";
    }
    return "?";
}

DistKind dist_from_string(const std::string& name) {
    if (name == "normal" || name == "gaussian") return DistKind::Normal;
    if (name == "student-t" || name == "studentt" || name == "t") return DistKind::StudentT;
    if (name == "ged") return DistKind::Ged;
    if (name == "skew-t" || name == "skewt") return DistKind::SkewT;
    throw ConfigError("unknown innovation distribution '" + name + "'");
}

int InnovationDist::shape_count() const {
    switch (kind) {
        case DistKind::Normal: return 0;
        case DistKind::StudentT: return 1;
        case DistKind::Ged: return 1;
        case DistKind::SkewT: return 2;
    }
    return 0;
}

void InnovationDist::validate() const {
    if (static_cast<int>(shape.size()) != shape_count())
        throw ShapeViolation(to_string(kind) + " expects " + std::to_string(shape_count()) +
                             " shape parameter(s)");
    switch (kind) {
        case DistKind::Normal: break;
        case DistKind::StudentT:
            if (!(shape[0] > 2.0)) throw ShapeViolation("student-t requires nu > 2");
            break;
        case DistKind::Ged:
            if (!(shape[0] > 0.0)) throw ShapeViolation("ged requires lambda > 0");
            break;
        case DistKind::SkewT:
            if (!(shape[0] > 2.0)) throw ShapeViolation("skew-t requires nu > 2");
            if (!(shape[1] > -1.0 && shape[1] < 1.0))
                throw ShapeViolation("skew-t requires skew in (-1,1)");
            break;
    }
}

double innovation_logpdf(const InnovationDist& dist, double z) {
    dist.validate();
    switch (dist.kind) {
        case DistKind::Normal:
            return -0.5 * kLog2Pi - 0.5 * z * z;
        case DistKind::StudentT: {
            const double nu = dist.shape[0];
            const double c = std::sqrt(nu / (nu - 2.0));  // unit-variance rescaling
            const double x = c * z;
            return std::log(c) + std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                   0.5 * std::log(nu * kPi) - 0.5 * (nu + 1.0) * std::log1p(x * x / nu);
        }
        case DistKind::Ged: {
            const double lambda = dist.shape[0];
            const double a = ged_scale(lambda);
            const double log_norm = std::log(lambda) - (1.0 + 1.0 / lambda) * std::log(2.0) -
                                    std::lgamma(1.0 / lambda) - std::log(a);
            return log_norm - 0.5 * std::pow(std::abs(z / a), lambda);
        }
        case DistKind::SkewT: {
            const double nu = dist.shape[0];
            const double skew = dist.shape[1];
            const auto k = skew_t_consts(nu, skew);
            const double denom = (z < -k.a / k.b) ? (1.0 - skew) : (1.0 + skew);
            const double t = (k.b * z + k.a) / denom;
            return std::log(k.b) + k.log_c - 0.5 * (nu + 1.0) * std::log1p(t * t / (nu - 2.0));
        }
    }
    throw ShapeViolation("unreachable");
}

double innovation_mean_abs(const InnovationDist& dist) {
    dist.validate();
    switch (dist.kind) {
        case DistKind::Normal:
            return 0.79788456080286535587989211986876;  // sqrt(2/pi)
        case DistKind::StudentT: {
            // E|X| of a standard t, scaled to unit variance.
            const double nu = dist.shape[0];
            const double mean_abs_t =
                2.0 * std::sqrt(nu) *
                std::exp(std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu)) /
                (std::sqrt(kPi) * (nu - 1.0));
            return mean_abs_t * std::sqrt((nu - 2.0) / nu);
        }
        case DistKind::Ged: {
            const double lambda = dist.shape[0];
            const double a = ged_scale(lambda);
            return a * std::exp((1.0 / lambda) * std::log(2.0) + std::lgamma(2.0 / lambda) -
                                std::lgamma(1.0 / lambda));
        }
        case DistKind::SkewT: {
            const auto k = skew_t_consts(dist.shape[0], dist.shape[1]);
            return detail::integrate_real_line(
                [&dist](double z) { return std::abs(z) * std::exp(innovation_logpdf(dist, z)); },
                {-k.a / k.b, 0.0});
        }
    }
    throw ShapeViolation("unreachable");
}

double innovation_sample(const InnovationDist& dist, Rng& rng) {
    dist.validate();
    switch (dist.kind) {
        case DistKind::Normal:
            return rng.normal();
        case DistKind::StudentT: {
            const double nu = dist.shape[0];
            const double z0 = rng.normal();
            const double chi2 = 2.0 * rng.gamma(0.5 * nu);
            return z0 * std::sqrt(nu / chi2) * std::sqrt((nu - 2.0) / nu);
        }
        case DistKind::Ged: {
            const double lambda = dist.shape[0];
            const double a = ged_scale(lambda);
            const double g = rng.gamma(1.0 / lambda);
            const double mag = a * std::pow(2.0 * g, 1.0 / lambda);
            return rng.uniform() < 0.5 ? -mag : mag;
        }
        case DistKind::SkewT: {
            // Piecewise-folded t representation of Hansen's skewed t.
            const double nu = dist.shape[0];
            const double skew = dist.shape[1];
            const auto k = skew_t_consts(nu, skew);
            const double z0 = rng.normal();
            const double chi2 = 2.0 * rng.gamma(0.5 * nu);
            const double abs_t = std::abs(z0 * std::sqrt(nu / chi2)) * std::sqrt((nu - 2.0) / nu);
            const double u = rng.uniform();
            const double y = (u < 0.5 * (1.0 + skew)) ? (1.0 + skew) * abs_t : -(1.0 - skew) * abs_t;
            return (y - k.a) / k.b;
        }
    }
    throw ShapeViolation("unreachable");
}

namespace detail {

double integrate_real_line(const std::function<double(double)>& f,
                           std::vector<double> breakpoints) {
    // 64-point Gauss-Legendre nodes on [-1, 1].
    static const std::array<double, 32> x = {
        0.0243502926634244325089558,  0.0729931217877990394495429, 0.1214628192961205544703765,
        0.1696444204239928180373136,  0.2174236437400070841496487, 0.2646871622087674163739642,
        0.3113228719902109561575127,  0.3572201583376681159504426, 0.4022701579639916036957668,
        0.4463660172534640879849477,  0.4894031457070529574785263, 0.5312794640198945456580139,
        0.5718956462026340342838781,  0.6111553551723932502488530, 0.6489654712546573398577612,
        0.6852363130542332425635584,  0.7198818501716108268489402, 0.7528199072605318966118638,
        0.7839723589433414076102205,  0.8132653151227975597419233, 0.8406292962525803627516915,
        0.8659993981540928197607834,  0.8893154459951141058534040, 0.9105221370785028057563807,
        0.9295691721319395758214902,  0.9464113748584028160624815, 0.9610087996520537189186141,
        0.9733268277899109637418535,  0.9833362538846259569312993, 0.9910133714767443207393824,
        0.9963401167719552793469245,  0.9993050417357721394569056};
    static const std::array<double, 32> w = {
        0.0486909570091397203833654, 0.0485754674415034269347991, 0.0483447622348029571697695,
        0.0479993885964583077281262, 0.0475401657148303086622822, 0.0469681828162100173253263,
        0.0462847965813144172959532, 0.0454916279274181444797710, 0.0445905581637565630601347,
        0.0435837245293234533768279, 0.0424735151236535890073398, 0.0412625632426235286101563,
        0.0399537411327203413866569, 0.0385501531786156291289625, 0.0370551285402400460404151,
        0.0354722132568823838106931, 0.0338051618371416093915655, 0.0320579283548515535854675,
        0.0302346570724024788679741, 0.0283396726142594832275113, 0.0263774697150546586716918,
        0.0243527025687108733381776, 0.0222701738083832541592983, 0.0201348231535302093723403,
        0.0179517157756973430850453, 0.0157260304760247193219660, 0.0134630478967186425980608,
        0.0111681394601311288185905, 0.0088467598263639477230309, 0.0065044579689783628561174,
        0.0041470332605624676352875, 0.0017832807216964329472961};

    // Gauss-Legendre over [lo, hi], split into panels.
    const auto finite_piece = [&](const std::function<double(double)>& g, double lo, double hi,
                                  int n_panels) {
        double acc = 0.0;
        for (int p = 0; p < n_panels; ++p) {
            const double a = lo + (hi - lo) * p / n_panels;
            const double b = lo + (hi - lo) * (p + 1) / n_panels;
            const double mid = 0.5 * (a + b);
            const double hw = 0.5 * (b - a);
            double panel = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i)
                for (double s : {-x[i], x[i]}) {
                    const double v = g(mid + hw * s);
                    if (std::isfinite(v)) panel += w[i] * v;
                }
            acc += panel * hw;
        }
        return acc;
    };

    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());
    if (breakpoints.empty()) breakpoints.push_back(0.0);

    const double half_pi = 0.5 * kPi;
    double total = 0.0;
    // left unbounded piece: z = b0 - tan(v), v in (0, pi/2)
    const double b0 = breakpoints.front();
    total += finite_piece(
        [&](double v) {
            const double c = std::cos(v);
            return f(b0 - std::tan(v)) / (c * c);
        },
        0.0, half_pi, 8);
    // finite pieces between breakpoints
    for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k)
        total += finite_piece(f, breakpoints[k], breakpoints[k + 1], 4);
    // right unbounded piece: z = bk + tan(v)
    const double bk = breakpoints.back();
    total += finite_piece(
        [&](double v) {
            const double c = std::cos(v);
            return f(bk + std::tan(v)) / (c * c);
        },
        0.0, half_pi, 8);
    return total;
}

}  // namespace detail

}  // namespace garchvi
