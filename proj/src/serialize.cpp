#include "garchvi/serialize.hpp"

#include <fstream>

#include "garchvi/errors.hpp"

namespace garchvi {

using nlohmann::json;

namespace {

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
    Eigen::VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
        out.push_back(std::move(row));
    }
    return out;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (rows == 0) return Eigen::MatrixXd(0, 0);
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index c = 0; c < cols; ++c)
            m(i, c) = j[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)].get<double>();
    return m;
}

json zeta_to_json(const VariationalParams& zeta) {
    json out;
    out["mu"] = vector_to_json(zeta.mu);
    if (zeta.diagonal) {
        out["cov"] = {{"type", "diag"}, {"values", vector_to_json(zeta.var)}};
    } else {
        json lower = json::array();
        for (Eigen::Index i = 0; i < zeta.cov.rows(); ++i)
            for (Eigen::Index c = 0; c <= i; ++c) lower.push_back(zeta.cov(i, c));
        out["cov"] = {{"type", "full"}, {"lower", lower}};
    }
    return out;
}

VariationalParams zeta_from_json(const json& j) {
    const Eigen::VectorXd mu = vector_from_json(j.at("mu"));
    const auto& cov = j.at("cov");
    if (cov.at("type") == "diag")
        return VariationalParams::diag(mu, vector_from_json(cov.at("values")));
    const auto d = mu.size();
    Eigen::MatrixXd full(d, d);
    std::size_t k = 0;
    const auto& lower = cov.at("lower");
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index c = 0; c <= i; ++c) {
            const double v = lower.at(k++).get<double>();
            full(i, c) = v;
            full(c, i) = v;
        }
    return VariationalParams::full(mu, full);
}

}  // namespace

json model_to_json(const ModelSpec& spec) {
    json out;
    out["family"] = to_string(spec.family);
    out["p"] = spec.p;
    out["o"] = spec.o;
    out["q"] = spec.q;
    out["dist"] = to_string(spec.innovation.kind);
    out["dist_shape"] = spec.innovation.shape;
    if (spec.family == Family::Figarch) out["figarch_truncation"] = spec.figarch_truncation;
    return out;
}

ModelSpec model_from_json(const json& j) {
    ModelSpec spec;
    const std::string family = j.at("family");
    if (family == "arch") spec.family = Family::Arch;
    else if (family == "garch") spec.family = Family::Garch;
    else if (family == "gjr-garch") spec.family = Family::GjrGarch;
    else if (family == "egarch") spec.family = Family::Egarch;
    else if (family == "gjr-egarch") spec.family = Family::GjrEgarch;
    else if (family == "figarch") spec.family = Family::Figarch;
    else throw ConfigError("unknown family in result file: " + family);
    spec.p = j.at("p");
    spec.o = j.at("o");
    spec.q = j.at("q");
    spec.innovation.kind = dist_from_string(j.at("dist"));
    spec.innovation.shape = j.at("dist_shape").get<std::vector<double>>();
    if (j.contains("figarch_truncation")) spec.figarch_truncation = j["figarch_truncation"];
    spec.validate();
    return spec;
}

json metric_set_to_json(const MetricSet& m) {
    return {{"nll", m.nll}, {"rmse", m.rmse}, {"mad", m.mad}, {"qlik", m.qlik}};
}

MetricSet metric_set_from_json(const json& j) {
    return {j.at("nll"), j.at("rmse"), j.at("mad"), j.at("qlik")};
}

json result_to_json(const SavedResult& r) {
    json out;
    out["format_version"] = r.format_version;
    out["series_id"] = r.series_id;
    out["estimator"] = r.estimator;
    out["model"] = model_to_json(r.spec);
    out["ged_pedestal"] = r.ged_pedestal;
    out["seed"] = r.seed;
    out["parameter_ordering"] = r.parameter_ordering;
    out["split_fraction"] = r.split_fraction;
    out["train_length"] = r.train_length;
    out["h_init"] = r.h_init;
    out["posterior_samples"] = matrix_to_json(r.posterior_samples);
    out["point_constrained"] = vector_to_json(r.point_constrained);
    out["sd_constrained"] = vector_to_json(r.sd_constrained);
    if (r.zeta_star) out["zeta_star"] = zeta_to_json(*r.zeta_star);
    if (!r.lb_trace.empty()) out["lb_trace"] = r.lb_trace;
    if (r.acceptance_rate) out["acceptance_rate"] = *r.acceptance_rate;
    if (r.qml_objective_value) out["qml_objective"] = *r.qml_objective_value;
    if (r.converged) out["converged"] = *r.converged;
    if (!r.config_echo.is_null()) out["config"] = r.config_echo;
    out["metrics"] = {
        {"train",
         {{"at_mean", metric_set_to_json(r.train_at_mean)},
          {"draws_mean", metric_set_to_json(r.train_draws_mean)},
          {"draws_sd", metric_set_to_json(r.train_draws_sd)}}},
        {"test",
         {{"at_mean", metric_set_to_json(r.test_at_mean)},
          {"draws_mean", metric_set_to_json(r.test_draws_mean)},
          {"draws_sd", metric_set_to_json(r.test_draws_sd)}}}};
    return out;
}

SavedResult result_from_json(const json& j) {
    SavedResult r;
    r.format_version = j.at("format_version");
    if (r.format_version != 1)
        throw ConfigError("unsupported result format version " +
                          std::to_string(r.format_version));
    r.series_id = j.at("series_id");
    r.estimator = j.at("estimator");
    r.spec = model_from_json(j.at("model"));
    r.ged_pedestal = j.value("ged_pedestal", false);
    r.seed = j.at("seed");
    r.parameter_ordering = j.at("parameter_ordering").get<std::vector<std::string>>();
    r.split_fraction = j.at("split_fraction");
    r.train_length = j.at("train_length");
    r.h_init = j.at("h_init");
    r.posterior_samples = matrix_from_json(j.at("posterior_samples"));
    r.point_constrained = vector_from_json(j.at("point_constrained"));
    r.sd_constrained = vector_from_json(j.at("sd_constrained"));
    if (j.contains("zeta_star")) r.zeta_star = zeta_from_json(j["zeta_star"]);
    if (j.contains("lb_trace")) r.lb_trace = j["lb_trace"].get<std::vector<double>>();
    if (j.contains("acceptance_rate")) r.acceptance_rate = j["acceptance_rate"].get<double>();
    if (j.contains("qml_objective")) r.qml_objective_value = j["qml_objective"].get<double>();
    if (j.contains("converged")) r.converged = j["converged"].get<bool>();
    if (j.contains("config")) r.config_echo = j["config"];
    const auto& metrics = j.at("metrics");
    r.train_at_mean = metric_set_from_json(metrics.at("train").at("at_mean"));
    r.train_draws_mean = metric_set_from_json(metrics.at("train").at("draws_mean"));
    r.train_draws_sd = metric_set_from_json(metrics.at("train").at("draws_sd"));
    r.test_at_mean = metric_set_from_json(metrics.at("test").at("at_mean"));
    r.test_draws_mean = metric_set_from_json(metrics.at("test").at("draws_mean"));
    r.test_draws_sd = metric_set_from_json(metrics.at("test").at("draws_sd"));
    return r;
}

void save_result(const std::string& path, const SavedResult& result) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    out << result_to_json(result).dump(1) << '\n';
}

SavedResult load_result(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileNotFound(path);
    json j;
    in >> j;
    return result_from_json(j);
}

void write_band_csv(const std::string& path, const ForecastBand& band) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    out << "date,step,point,lower,upper\n";
    out.precision(17);
    for (std::size_t k = 0; k < band.point.size(); ++k)
        out << band.dates[k].to_string() << ',' << (k + 1) << ',' << band.point[k] << ','
            << band.lower[k] << ',' << band.upper[k] << '\n';
}

}  // namespace garchvi
