#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "garchvi/baselines.hpp"
#include "garchvi/errors.hpp"
#include "garchvi/eval.hpp"
#include "garchvi/models.hpp"
#include "garchvi/serialize.hpp"
#include "garchvi/timeseries.hpp"
#include "garchvi/transforms.hpp"
#include "garchvi/vi.hpp"

namespace py = pybind11;
using namespace garchvi;

namespace {

ReturnSeries series_from_python(const std::vector<std::string>& dates,
                                const std::vector<double>& returns) {
    std::vector<Date> parsed;
    parsed.reserve(dates.size());
    for (const auto& d : dates) parsed.push_back(Date::parse(d));
    return ReturnSeries(std::move(parsed), returns);
}

std::vector<std::string> dates_to_python(const ReturnSeries& series) {
    std::vector<std::string> out;
    out.reserve(series.size());
    for (const auto& d : series.dates()) out.push_back(d.to_string());
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "GARCH-family volatility models with QML, Metropolis-Hastings, and "
              "fixed-form Gaussian variational inference";

    py::register_exception<Error>(m, "GarchviError", PyExc_RuntimeError);

    py::enum_<Family>(m, "Family")
        .value("ARCH", Family::Arch)
        .value("GARCH", Family::Garch)
        .value("GJR_GARCH", Family::GjrGarch)
        .value("EGARCH", Family::Egarch)
        .value("GJR_EGARCH", Family::GjrEgarch)
        .value("FIGARCH", Family::Figarch);

    py::enum_<DistKind>(m, "DistKind")
        .value("NORMAL", DistKind::Normal)
        .value("STUDENT_T", DistKind::StudentT)
        .value("GED", DistKind::Ged)
        .value("SKEW_T", DistKind::SkewT);

    py::enum_<OptimizerKind>(m, "OptimizerKind")
        .value("BBVI", OptimizerKind::Bbvi)
        .value("QBVI", OptimizerKind::Qbvi)
        .value("MGVB", OptimizerKind::Mgvb)
        .value("EMGVB", OptimizerKind::Emgvb);

    py::enum_<Segment>(m, "Segment")
        .value("TRAIN", Segment::Train)
        .value("TEST", Segment::Test)
        .value("FULL", Segment::Full);

    py::enum_<MetricsMode>(m, "MetricsMode")
        .value("MEAN_OF_METRICS", MetricsMode::MeanOfMetrics)
        .value("METRICS_AT_MEAN", MetricsMode::MetricsAtMean);

    py::class_<InnovationDist>(m, "InnovationDist")
        .def_static("normal", &InnovationDist::normal)
        .def_static("student_t", &InnovationDist::student_t, py::arg("nu"))
        .def_static("ged", &InnovationDist::ged, py::arg("lam"))
        .def_static("skew_t", &InnovationDist::skew_t, py::arg("nu"), py::arg("skew"))
        .def_readwrite("kind", &InnovationDist::kind)
        .def_readwrite("shape", &InnovationDist::shape);

    py::class_<ReturnSeries>(m, "ReturnSeries")
        .def(py::init(&series_from_python), py::arg("dates"), py::arg("returns"))
        .def_property_readonly("dates", &dates_to_python)
        .def_property_readonly("returns",
                               [](const ReturnSeries& s) { return s.returns(); })
        .def("__len__", &ReturnSeries::size);

    m.def("load_returns",
          [](const std::string& path, const std::string& date_col, const std::string& value_col) {
              return load_returns(path, {date_col, value_col});
          },
          py::arg("path"), py::arg("date_column") = "date", py::arg("return_column") = "return");
    m.def("write_returns",
          [](const std::string& path, const ReturnSeries& series, const std::string& date_col,
             const std::string& value_col) { write_returns(path, series, {date_col, value_col}); },
          py::arg("path"), py::arg("series"), py::arg("date_column") = "date",
          py::arg("return_column") = "return");
    m.def("split_train_test", &split_train_test, py::arg("series"), py::arg("train_fraction"));
    m.def("backcast_variance",
          py::overload_cast<const ReturnSeries&, int>(&backcast_variance), py::arg("series"),
          py::arg("n_lags") = 1);
    m.def("prices_to_returns", &prices_to_returns, py::arg("prices"));

    py::class_<ModelSpec>(m, "ModelSpec")
        .def(py::init<>())
        .def_readwrite("family", &ModelSpec::family)
        .def_readwrite("p", &ModelSpec::p)
        .def_readwrite("o", &ModelSpec::o)
        .def_readwrite("q", &ModelSpec::q)
        .def_readwrite("innovation", &ModelSpec::innovation)
        .def_readwrite("figarch_truncation", &ModelSpec::figarch_truncation)
        .def("__repr__", [](const ModelSpec& s) { return "<ModelSpec " + model_name(s) + ">"; });

    m.def("parse_model", &parse_model, py::arg("text"),
          py::arg("innovation") = InnovationDist::normal(), py::arg("figarch_truncation") = 1000);
    m.def("model_name", &model_name);
    m.def("parameter_count", &parameter_count);
    m.def("parameter_names", &parameter_names);

    py::class_<ConstrainedParams>(m, "ConstrainedParams")
        .def(py::init<>())
        .def_readwrite("omega", &ConstrainedParams::omega)
        .def_readwrite("alpha", &ConstrainedParams::alpha)
        .def_readwrite("gamma", &ConstrainedParams::gamma)
        .def_readwrite("psi", &ConstrainedParams::psi)
        .def_readwrite("beta", &ConstrainedParams::beta)
        .def_readwrite("phi", &ConstrainedParams::phi)
        .def_readwrite("d", &ConstrainedParams::d)
        .def_readwrite("dist_shape", &ConstrainedParams::dist_shape);

    m.def("validate_constraints", &validate_constraints);
    m.def("figarch_weights", &figarch_weights, py::arg("phi"), py::arg("beta"), py::arg("d"),
          py::arg("K"));
    m.def("variance_recursion", &variance_recursion, py::arg("spec"), py::arg("nu"),
          py::arg("returns"), py::arg("h_init"));

    py::class_<VariancePath>(m, "VariancePath")
        .def_readonly("h", &VariancePath::h)
        .def_readonly("loglik_per_obs", &VariancePath::loglik_per_obs);
    m.def("variance_path", &variance_path, py::arg("spec"), py::arg("nu"), py::arg("series"),
          py::arg("h_init"));

    m.def("qml_objective",
          py::overload_cast<const ModelSpec&, const ConstrainedParams&, const ReturnSeries&>(
              &qml_objective));
    m.def("qml_objective_at",
          py::overload_cast<const ModelSpec&, const ConstrainedParams&,
                            const std::vector<double>&, double>(&qml_objective),
          py::arg("spec"), py::arg("nu"), py::arg("returns"), py::arg("h_init"));
    m.def("log_likelihood",
          py::overload_cast<const ModelSpec&, const ConstrainedParams&, const ReturnSeries&>(
              &log_likelihood));
    m.def("log_likelihood_at",
          py::overload_cast<const ModelSpec&, const ConstrainedParams&,
                            const std::vector<double>&, double>(&log_likelihood),
          py::arg("spec"), py::arg("nu"), py::arg("returns"), py::arg("h_init"));
    m.def("innovation_logpdf", &innovation_logpdf);
    m.def("innovation_mean_abs", &innovation_mean_abs);
    m.def("simulate", &simulate, py::arg("spec"), py::arg("nu"), py::arg("T"), py::arg("seed"));
    m.def("forecast_variance",
          py::overload_cast<const ModelSpec&, const ConstrainedParams&, const ReturnSeries&, int>(
              &forecast_variance),
          py::arg("spec"), py::arg("nu"), py::arg("history"), py::arg("horizon"));

    py::class_<TransformSpec>(m, "TransformSpec")
        .def(py::init<ModelSpec, bool>(), py::arg("spec"), py::arg("ged_pedestal") = false)
        .def_readonly("spec", &TransformSpec::spec)
        .def_readonly("ged_pedestal", &TransformSpec::ged_pedestal)
        .def_property_readonly("dim", &TransformSpec::dim)
        .def_property_readonly("names", &TransformSpec::names);

    m.def("logistic", &logistic);
    m.def("inverse_transform", &inverse_transform, py::arg("tspec"), py::arg("theta"));
    m.def("inverse_transform_vec", &inverse_transform_vec, py::arg("tspec"), py::arg("theta"));
    m.def("forward_transform", &forward_transform, py::arg("tspec"), py::arg("nu"));
    m.def("dist_shape_inverse", &dist_shape_inverse, py::arg("kind"), py::arg("theta_shape"),
          py::arg("ged_pedestal") = false);
    m.def("pack_params", &pack_params);
    m.def("unpack_params", &unpack_params);

    py::class_<VariationalParams>(m, "VariationalParams")
        .def_static("diag", &VariationalParams::diag, py::arg("mu"), py::arg("var"))
        .def_static("full", &VariationalParams::full, py::arg("mu"), py::arg("cov"))
        .def_readonly("mu", &VariationalParams::mu)
        .def_readonly("diagonal", &VariationalParams::diagonal)
        .def_readonly("var", &VariationalParams::var)
        .def_readonly("cov", &VariationalParams::cov)
        .def_property_readonly("marginal_var", &VariationalParams::marginal_var);

    py::class_<Prior>(m, "Prior").def(py::init<double>(), py::arg("tau") = 1.0)
        .def_readwrite("tau", &Prior::tau);

    py::class_<OptimizerConfig>(m, "OptimizerConfig")
        .def(py::init<>())
        .def_readwrite("optimizer", &OptimizerConfig::optimizer)
        .def_readwrite("learning_rate", &OptimizerConfig::learning_rate)
        .def_readwrite("n_samples", &OptimizerConfig::n_samples)
        .def_readwrite("momentum", &OptimizerConfig::momentum)
        .def_readwrite("max_iters", &OptimizerConfig::max_iters)
        .def_readwrite("seed", &OptimizerConfig::seed)
        .def_readwrite("mu0", &OptimizerConfig::mu0)
        .def_readwrite("cov0_scale", &OptimizerConfig::cov0_scale)
        .def_readwrite("n_posterior_draws", &OptimizerConfig::n_posterior_draws);

    py::class_<FitResult>(m, "FitResult")
        .def_readonly("zeta_star", &FitResult::zeta_star)
        .def_readonly("lb_trace", &FitResult::lb_trace)
        .def_readonly("posterior_samples", &FitResult::posterior_samples)
        .def_readonly("elapsed_seconds", &FitResult::elapsed_seconds)
        .def_readonly("rejected_samples", &FitResult::rejected_samples)
        .def_readonly("aborted_iterations", &FitResult::aborted_iterations)
        .def_readonly("step_rejections", &FitResult::step_rejections)
        .def_readonly("spd_checks_passed", &FitResult::spd_checks_passed)
        .def_readonly("quality_warning", &FitResult::quality_warning);

    m.def("fit_vi",
          py::overload_cast<const ModelSpec&, const ReturnSeries&, const Prior&,
                            const OptimizerConfig&>(&fit_vi),
          py::arg("spec"), py::arg("train"), py::arg("prior"), py::arg("config"));
    m.def("fit_vi_target",
          py::overload_cast<const LogLikFn&, int, const Prior&, const OptimizerConfig&>(&fit_vi),
          py::arg("loglik"), py::arg("dim"), py::arg("prior"), py::arg("config"));

    py::class_<QmlConfig>(m, "QmlConfig")
        .def(py::init<>())
        .def_readwrite("max_iters", &QmlConfig::max_iters)
        .def_readwrite("tol", &QmlConfig::tol)
        .def_readwrite("eps", &QmlConfig::eps);

    py::class_<QmlResult>(m, "QmlResult")
        .def_readonly("nu_star", &QmlResult::nu_star)
        .def_readonly("theta_star", &QmlResult::theta_star)
        .def_readonly("objective", &QmlResult::objective)
        .def_readonly("converged", &QmlResult::converged)
        .def_readonly("iterations", &QmlResult::iterations);

    m.def("fit_qml",
          py::overload_cast<const ModelSpec&, const ReturnSeries&, const QmlConfig&>(&fit_qml),
          py::arg("spec"), py::arg("train"), py::arg("config") = QmlConfig{});
    m.def("numerical_gradient", &numerical_gradient, py::arg("f"), py::arg("x"),
          py::arg("eps") = 1e-6);

    py::class_<MhConfig>(m, "MhConfig")
        .def(py::init<>())
        .def_readwrite("n_total", &MhConfig::n_total)
        .def_readwrite("n_keep", &MhConfig::n_keep)
        .def_readwrite("proposal_scale", &MhConfig::proposal_scale)
        .def_readwrite("adapt_window", &MhConfig::adapt_window)
        .def_readwrite("target_acceptance", &MhConfig::target_acceptance)
        .def_readwrite("seed", &MhConfig::seed);

    py::class_<Chain>(m, "Chain")
        .def_readonly("draws", &Chain::draws)
        .def_readonly("log_posts", &Chain::log_posts)
        .def_readonly("acceptance_rate", &Chain::acceptance_rate);

    m.def("fit_mh",
          py::overload_cast<const ModelSpec&, const ReturnSeries&, const Prior&,
                            const MhConfig&>(&fit_mh),
          py::arg("spec"), py::arg("train"), py::arg("prior"), py::arg("config"));

    py::class_<MetricSet>(m, "MetricSet")
        .def_readonly("nll", &MetricSet::nll)
        .def_readonly("rmse", &MetricSet::rmse)
        .def_readonly("mad", &MetricSet::mad)
        .def_readonly("qlik", &MetricSet::qlik);

    py::class_<MetricSummary>(m, "MetricSummary")
        .def_readonly("mean", &MetricSummary::mean)
        .def_readonly("sd", &MetricSummary::sd);

    m.def("compute_metrics", &compute_metrics, py::arg("spec"), py::arg("nu"), py::arg("series"),
          py::arg("h_init"));
    m.def("compute_metrics_segment", &compute_metrics_segment, py::arg("spec"), py::arg("nu"),
          py::arg("full_series"), py::arg("train_length"), py::arg("segment"), py::arg("h_init"));
    m.def("posterior_mean_constrained", &posterior_mean_constrained, py::arg("theta_samples"),
          py::arg("tspec"));
    m.def("posterior_sd_constrained", &posterior_sd_constrained, py::arg("theta_samples"),
          py::arg("tspec"));
    m.def("deviation_vs_qml", &deviation_vs_qml, py::arg("metric"), py::arg("metric_qml"));
    m.def("metrics_from_samples", &metrics_from_samples, py::arg("spec"),
          py::arg("theta_samples"), py::arg("tspec"), py::arg("full_series"),
          py::arg("train_length"), py::arg("segment"), py::arg("h_init"), py::arg("mode"));

    py::class_<ForecastBand>(m, "ForecastBand")
        .def_property_readonly("dates",
                               [](const ForecastBand& b) {
                                   std::vector<std::string> out;
                                   for (const auto& d : b.dates) out.push_back(d.to_string());
                                   return out;
                               })
        .def_readonly("point", &ForecastBand::point)
        .def_readonly("lower", &ForecastBand::lower)
        .def_readonly("upper", &ForecastBand::upper);

    m.def("forecast_bands", &forecast_bands, py::arg("spec"), py::arg("theta_samples"),
          py::arg("tspec"), py::arg("history"), py::arg("horizon"), py::arg("level"));
    m.def("moving_average", &moving_average, py::arg("values"), py::arg("window"));

    m.attr("__version__") = "0.1.0";
}
