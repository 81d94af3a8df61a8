#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "garchvi/eval.hpp"
#include "garchvi/models.hpp"
#include "garchvi/vi.hpp"

namespace garchvi {

nlohmann::json model_to_json(const ModelSpec& spec);
ModelSpec model_from_json(const nlohmann::json& j);

nlohmann::json metric_set_to_json(const MetricSet& m);
MetricSet metric_set_from_json(const nlohmann::json& j);

/// One fitted cell (series x model x estimator) in the documented result
/// layout, format_version 1. Posterior samples live in the unconstrained
/// space; constrained-space values follow the canonical parameter ordering
/// echoed in `parameter_ordering`. Wall-clock times are kept out of this
/// payload so reruns with the same seed are byte-identical.
struct SavedResult {
    int format_version = 1;
    std::string series_id;
    std::string estimator;  // qml | mh | bbvi | qbvi | mgvb | emgvb
    ModelSpec spec;
    bool ged_pedestal = false;
    std::uint64_t seed = 0;
    std::vector<std::string> parameter_ordering;
    double split_fraction = 0.0;
    std::size_t train_length = 0;
    double h_init = 0.0;

    Eigen::MatrixXd posterior_samples;  // n x d; a single row for QML
    Eigen::VectorXd point_constrained;  // canonical order
    Eigen::VectorXd sd_constrained;     // empty when fewer than two draws

    // estimator-specific blocks
    std::optional<VariationalParams> zeta_star;
    std::vector<double> lb_trace;
    std::optional<double> acceptance_rate;
    std::optional<double> qml_objective_value;
    std::optional<bool> converged;
    nlohmann::json config_echo;

    // metrics; "at_mean" evaluates the transformed posterior mean,
    // "draws" aggregates per-draw metrics as mean +- sd
    MetricSet train_at_mean, test_at_mean;
    MetricSet train_draws_mean, train_draws_sd, test_draws_mean, test_draws_sd;
};

nlohmann::json result_to_json(const SavedResult& result);
SavedResult result_from_json(const nlohmann::json& j);

void save_result(const std::string& path, const SavedResult& result);
SavedResult load_result(const std::string& path);

/// Band CSV: date,step,point,lower,upper.
void write_band_csv(const std::string& path, const ForecastBand& band);

}  // namespace garchvi
