// Batch front door: fit GARCH-family models with QML / MH / four VI
// optimizers over one or more return series, compare estimators against the
// QML baseline, forecast variance bands, simulate fixtures, and convert
// price files to percent log returns.
//
// Exit codes: 0 success, 1 invocation error, 2 partial failure (some cells
// failed but the batch completed).

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

#include "garchvi/baselines.hpp"
#include "garchvi/errors.hpp"
#include "garchvi/eval.hpp"
#include "garchvi/serialize.hpp"
#include "garchvi/vi.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace garchvi;

namespace {

constexpr int kSchemaVersion = 1;

struct RunConfig {
    std::vector<std::string> data;
    std::vector<std::string> models = {"garch(1,1)"};
    std::vector<std::string> estimators = {"qml", "mgvb"};
    double split = 0.75;
    double tau = 1.0;
    std::string dist = "normal";
    std::vector<double> dist_shape;
    std::string out = "results";
    int jobs = 1;
    std::uint64_t seed = 0;
    int figarch_truncation = 1000;
    bool ged_pedestal = false;
    bool emit_traces = false;

    OptimizerConfig vi;
    MhConfig mh;
    QmlConfig qml;
};

std::vector<std::string> split_list(const std::string& text) {
    // comma-split, but keep commas inside parentheses: "garch(1,1),arch(1)"
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char c : text) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileNotFound(path);
    json j;
    in >> j;
    if (j.value("schema_version", 0) != kSchemaVersion)
        throw ConfigError("config schema_version must be " + std::to_string(kSchemaVersion));
    if (j.contains("data")) cfg.data = j["data"].get<std::vector<std::string>>();
    if (j.contains("models")) cfg.models = j["models"].get<std::vector<std::string>>();
    if (j.contains("estimators"))
        cfg.estimators = j["estimators"].get<std::vector<std::string>>();
    cfg.split = j.value("split", cfg.split);
    cfg.tau = j.value("tau", cfg.tau);
    cfg.dist = j.value("dist", cfg.dist);
    if (j.contains("dist_shape")) cfg.dist_shape = j["dist_shape"].get<std::vector<double>>();
    cfg.out = j.value("out", cfg.out);
    cfg.jobs = j.value("jobs", cfg.jobs);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.figarch_truncation = j.value("figarch_truncation", cfg.figarch_truncation);
    cfg.ged_pedestal = j.value("ged_pedestal", cfg.ged_pedestal);
    cfg.emit_traces = j.value("emit_traces", cfg.emit_traces);
    if (j.contains("vi")) {
        const auto& v = j["vi"];
        cfg.vi.learning_rate = v.value("learning_rate", cfg.vi.learning_rate);
        cfg.vi.n_samples = v.value("n_samples", cfg.vi.n_samples);
        cfg.vi.momentum = v.value("momentum", cfg.vi.momentum);
        cfg.vi.max_iters = v.value("max_iters", cfg.vi.max_iters);
        cfg.vi.cov0_scale = v.value("cov0_scale", cfg.vi.cov0_scale);
        cfg.vi.n_posterior_draws = v.value("n_posterior_draws", cfg.vi.n_posterior_draws);
    }
    if (j.contains("mh")) {
        const auto& v = j["mh"];
        cfg.mh.n_total = v.value("n_total", cfg.mh.n_total);
        cfg.mh.n_keep = v.value("n_keep", cfg.mh.n_keep);
        cfg.mh.proposal_scale = v.value("proposal_scale", cfg.mh.proposal_scale);
        cfg.mh.adapt_window = v.value("adapt_window", cfg.mh.adapt_window);
        cfg.mh.target_acceptance = v.value("target_acceptance", cfg.mh.target_acceptance);
    }
    if (j.contains("qml")) {
        const auto& v = j["qml"];
        cfg.qml.max_iters = v.value("max_iters", cfg.qml.max_iters);
        cfg.qml.tol = v.value("tol", cfg.qml.tol);
        cfg.qml.eps = v.value("eps", cfg.qml.eps);
    }
}

std::string sanitize(const std::string& name) {
    std::string out;
    for (char c : name) {
        if (std::isalnum(static_cast<unsigned char>(c)))
            out.push_back(static_cast<char>(std::tolower(c)));
        else if (c == ',' || c == '(' || c == ')' || c == '-' || c == '_' || c == '.')
            out.push_back('_');
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out;
}

struct Cell {
    std::string series_path;
    std::string series_id;
    std::string model;
    std::string estimator;
    std::uint64_t seed = 0;

    std::string status = "pending";
    std::string error_code;
    std::string error_message;
    std::string result_path;
    double wall_seconds = 0.0;
};

InnovationDist make_dist(const RunConfig& cfg) {
    InnovationDist dist;
    dist.kind = dist_from_string(cfg.dist);
    if (!cfg.dist_shape.empty()) {
        dist.shape = cfg.dist_shape;
    } else {
        switch (dist.kind) {
            case DistKind::Normal: break;
            case DistKind::StudentT: dist.shape = {8.0}; break;
            case DistKind::Ged: dist.shape = {1.5}; break;
            case DistKind::SkewT: dist.shape = {8.0, 0.0}; break;
        }
    }
    dist.validate();
    return dist;
}

void fill_metrics(SavedResult& result, const ModelSpec& spec, const TransformSpec& tspec,
                  const ReturnSeries& full, std::size_t train_length, double h_init) {
    result.train_at_mean =
        metrics_from_samples(spec, result.posterior_samples, tspec, full, train_length,
                             Segment::Train, h_init, MetricsMode::MetricsAtMean)
            .mean;
    result.test_at_mean =
        metrics_from_samples(spec, result.posterior_samples, tspec, full, train_length,
                             Segment::Test, h_init, MetricsMode::MetricsAtMean)
            .mean;
    const auto train_draws =
        metrics_from_samples(spec, result.posterior_samples, tspec, full, train_length,
                             Segment::Train, h_init, MetricsMode::MeanOfMetrics);
    const auto test_draws =
        metrics_from_samples(spec, result.posterior_samples, tspec, full, train_length,
                             Segment::Test, h_init, MetricsMode::MeanOfMetrics);
    result.train_draws_mean = train_draws.mean;
    result.train_draws_sd = train_draws.sd;
    result.test_draws_mean = test_draws.mean;
    result.test_draws_sd = test_draws.sd;
}

void run_cell(const RunConfig& cfg, Cell& cell) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const auto series = load_returns(cell.series_path);
        const auto train = split_train_test(series, cfg.split).first;
        const ModelSpec spec = parse_model(cell.model, make_dist(cfg), cfg.figarch_truncation);
        const TransformSpec tspec(spec, cfg.ged_pedestal);
        const double h_init = backcast_variance(train);

        SavedResult result;
        result.series_id = cell.series_id;
        result.estimator = cell.estimator;
        result.spec = spec;
        result.ged_pedestal = cfg.ged_pedestal;
        result.seed = cell.seed;
        result.parameter_ordering = tspec.names();
        result.split_fraction = cfg.split;
        result.train_length = train.size();
        result.h_init = h_init;

        if (cell.estimator == "qml") {
            const auto qml = fit_qml(spec, train, cfg.qml);
            result.posterior_samples = qml.theta_star.transpose();
            result.point_constrained = pack_params(tspec, qml.nu_star);
            result.sd_constrained = Eigen::VectorXd();
            result.qml_objective_value = qml.objective;
            result.converged = qml.converged;
            result.config_echo = {{"max_iters", cfg.qml.max_iters},
                                  {"tol", cfg.qml.tol},
                                  {"eps", cfg.qml.eps},
                                  {"iterations", qml.iterations}};
        } else if (cell.estimator == "mh") {
            MhConfig mcfg = cfg.mh;
            mcfg.seed = cell.seed;
            const auto chain =
                fit_mh(make_garch_loglik(tspec, train), tspec.dim(), Prior{cfg.tau}, mcfg);
            result.posterior_samples = chain.draws;
            result.point_constrained =
                pack_params(tspec, posterior_mean_constrained(chain.draws, tspec));
            result.sd_constrained = posterior_sd_constrained(chain.draws, tspec);
            result.acceptance_rate = chain.acceptance_rate;
            result.config_echo = {{"n_total", mcfg.n_total},
                                  {"n_keep", mcfg.n_keep},
                                  {"adapt_window", mcfg.adapt_window},
                                  {"tau", cfg.tau}};
        } else {
            OptimizerConfig vcfg = cfg.vi;
            vcfg.optimizer = optimizer_from_string(cell.estimator);
            vcfg.seed = cell.seed;
            const auto fit =
                fit_vi(make_garch_loglik(tspec, train), tspec.dim(), Prior{cfg.tau}, vcfg);
            result.posterior_samples = fit.posterior_samples;
            result.point_constrained =
                pack_params(tspec, posterior_mean_constrained(fit.posterior_samples, tspec));
            result.sd_constrained = posterior_sd_constrained(fit.posterior_samples, tspec);
            result.zeta_star = fit.zeta_star;
            result.lb_trace = fit.lb_trace;
            result.config_echo = {{"learning_rate", vcfg.learning_rate},
                                  {"n_samples", vcfg.n_samples},
                                  {"momentum", vcfg.momentum},
                                  {"max_iters", vcfg.max_iters},
                                  {"cov0_scale", vcfg.cov0_scale},
                                  {"n_posterior_draws", vcfg.n_posterior_draws},
                                  {"tau", cfg.tau},
                                  {"rejected_samples", fit.rejected_samples},
                                  {"step_rejections", fit.step_rejections},
                                  {"quality_warning", fit.quality_warning}};
            if (cfg.emit_traces) {
                const fs::path trace_path =
                    fs::path(cfg.out) /
                    (cell.series_id + "__" + sanitize(cell.model) + "__" + cell.estimator +
                     "__lb.csv");
                std::ofstream trace(trace_path);
                trace << "iteration,lb\n";
                trace.precision(17);
                for (std::size_t i = 0; i < fit.lb_trace.size(); ++i)
                    trace << (i + 1) << ',' << fit.lb_trace[i] << '\n';
            }
        }

        fill_metrics(result, spec, tspec, series, train.size(), h_init);

        const fs::path out_path =
            fs::path(cfg.out) /
            (cell.series_id + "__" + sanitize(cell.model) + "__" + cell.estimator + ".json");
        save_result(out_path.string(), result);
        cell.result_path = out_path.string();
        cell.status = "ok";
    } catch (const FileNotFound& e) {
        cell.status = "failed";
        cell.error_code = "file_not_found";
        cell.error_message = e.what();
    } catch (const ConfigError& e) {
        cell.status = "failed";
        cell.error_code = "config_error";
        cell.error_message = e.what();
    } catch (const Error& e) {
        cell.status = "failed";
        cell.error_code = "numeric_error";
        cell.error_message = e.what();
    } catch (const std::exception& e) {
        cell.status = "failed";
        cell.error_code = "internal_error";
        cell.error_message = e.what();
    }
    cell.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_fit(const RunConfig& cfg) {
    if (cfg.data.empty()) {
        std::cerr << "fit: no data files given\n";
        return 1;
    }
    fs::create_directories(cfg.out);

    std::vector<Cell> cells;
    for (const auto& path : cfg.data) {
        const std::string id = sanitize(fs::path(path).stem().string());
        for (const auto& model : cfg.models)
            for (const auto& estimator : cfg.estimators) {
                Cell cell;
                cell.series_path = path;
                cell.series_id = id;
                cell.model = model;
                cell.estimator = estimator;
                cell.seed = derive_seed(cfg.seed, id + "|" + model + "|" + estimator);
                cells.push_back(std::move(cell));
            }
    }

    std::atomic<std::size_t> next{0};
    std::mutex io_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            run_cell(cfg, cells[i]);
            std::lock_guard<std::mutex> lock(io_mutex);
            std::cout << cells[i].series_id << " " << cells[i].model << " "
                      << cells[i].estimator << ": " << cells[i].status << " ("
                      << cells[i].wall_seconds << "s)\n";
        }
    };
    const int jobs = std::max(1, cfg.jobs);
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    json manifest;
    manifest["format_version"] = kSchemaVersion;
    manifest["master_seed"] = cfg.seed;
    manifest["tool_version"] = "0.1.0";
    manifest["split"] = cfg.split;
    manifest["tau"] = cfg.tau;
    json cell_list = json::array();
    int failed = 0;
    for (const auto& cell : cells) {
        json c;
        c["series"] = cell.series_id;
        c["model"] = cell.model;
        c["estimator"] = cell.estimator;
        c["seed"] = cell.seed;
        c["status"] = cell.status;
        c["wall_seconds"] = cell.wall_seconds;
        if (cell.status == "ok") {
            c["result"] = cell.result_path;
        } else {
            ++failed;
            c["error_code"] = cell.error_code;
            c["error_message"] = cell.error_message;
        }
        cell_list.push_back(std::move(c));
    }
    manifest["cells"] = std::move(cell_list);
    manifest["n_cells"] = cells.size();
    manifest["n_failed"] = failed;
    std::ofstream out(fs::path(cfg.out) / "manifest.json");
    out << manifest.dump(1) << '\n';

    return failed > 0 ? 2 : 0;
}

int cmd_compare(const std::string& results_dir, const std::string& out_dir,
                const std::string& mode) {
    std::vector<SavedResult> results;
    for (const auto& entry : fs::directory_iterator(results_dir)) {
        if (entry.path().extension() != ".json") continue;
        const auto stem = entry.path().filename().string();
        if (stem == "manifest.json" || stem == "comparison.json") continue;
        try {
            results.push_back(load_result(entry.path().string()));
        } catch (const Error& e) {
            std::cerr << "skipping " << entry.path() << ": " << e.what() << "\n";
        }
    }
    if (results.empty()) {
        std::cerr << "compare: no result files in " << results_dir << "\n";
        return 1;
    }

    const auto metric_value = [&mode](const SavedResult& r, const std::string& split,
                                      const std::string& metric) {
        const MetricSet& m = (mode == "draws")
                                 ? (split == "train" ? r.train_draws_mean : r.test_draws_mean)
                                 : (split == "train" ? r.train_at_mean : r.test_at_mean);
        if (metric == "rmse") return m.rmse;
        if (metric == "mad") return m.mad;
        if (metric == "qlik") return m.qlik;
        return m.nll;
    };

    // index QML baselines by (series, model)
    std::map<std::pair<std::string, std::string>, const SavedResult*> baselines;
    for (const auto& r : results)
        if (r.estimator == "qml") baselines[{r.series_id, model_name(r.spec)}] = &r;
    if (baselines.empty()) throw MissingBaseline("no QML results in " + results_dir);

    const std::vector<std::string> splits = {"train", "test"};
    const std::vector<std::string> metrics = {"rmse", "mad", "qlik", "nll"};
    std::map<std::string,
             std::map<std::string, std::map<std::string, std::map<std::string, std::vector<double>>>>>
        deviations;
    int skipped = 0;
    for (const auto& r : results) {
        if (r.estimator == "qml") continue;
        const auto found = baselines.find({r.series_id, model_name(r.spec)});
        if (found == baselines.end()) {
            ++skipped;
            continue;
        }
        for (const auto& split : splits)
            for (const auto& metric : metrics) {
                const double dev = deviation_vs_qml(metric_value(r, split, metric),
                                                    metric_value(*found->second, split, metric));
                deviations[model_name(r.spec)][r.estimator][split][metric].push_back(dev);
            }
    }
    if (skipped > 0)
        std::cerr << "compare: " << skipped << " non-QML results had no QML baseline\n";

    fs::create_directories(out_dir);
    std::ofstream csv(fs::path(out_dir) / "comparison.csv");
    csv << "model,estimator,split,metric,mean_pct,std_pct,n_series\n";
    csv.precision(17);
    json table;
    bool single_series_flagged = false;
    for (const auto& [model, by_est] : deviations)
        for (const auto& [estimator, by_split] : by_est)
            for (const auto& split : splits)
                for (const auto& metric : metrics) {
                    const auto& values = by_split.at(split).at(metric);
                    double mean = 0.0;
                    for (double v : values) mean += v;
                    mean /= static_cast<double>(values.size());
                    double sd = 0.0;
                    if (values.size() > 1) {
                        for (double v : values) sd += (v - mean) * (v - mean);
                        sd = std::sqrt(sd / static_cast<double>(values.size() - 1));
                    } else {
                        single_series_flagged = true;
                    }
                    csv << model << ',' << estimator << ',' << split << ',' << metric << ','
                        << mean << ',' << sd << ',' << values.size() << '\n';
                    table[model][estimator][split][metric] = {
                        {"mean", mean}, {"std", sd}, {"n_series", values.size()}};
                }
    json out;
    out["format_version"] = kSchemaVersion;
    out["mode"] = mode == "draws" ? "mean_of_metrics" : "metrics_at_mean";
    out["single_series"] = single_series_flagged;
    out["deviation"] = "100 * (metric / metric_qml - 1), percent";
    out["table"] = std::move(table);
    std::ofstream jout(fs::path(out_dir) / "comparison.json");
    jout << out.dump(1) << '\n';
    return 0;
}

int cmd_forecast(const std::string& result_path, const std::string& data_path, int horizon,
                 double level, const std::string& out_path) {
    const auto result = load_result(result_path);
    const auto history = load_returns(data_path);
    const TransformSpec tspec(result.spec, result.ged_pedestal);
    const auto band =
        forecast_bands(result.spec, result.posterior_samples, tspec, history, horizon, level);
    write_band_csv(out_path, band);
    std::cout << "wrote " << out_path << " (" << horizon << " steps, level " << level << ")\n";
    return 0;
}

int cmd_simulate(const std::string& model, const std::vector<double>& params, int T,
                 std::uint64_t seed, const std::string& out_path, const RunConfig& cfg) {
    const ModelSpec spec = parse_model(model, make_dist(cfg), cfg.figarch_truncation);
    const TransformSpec tspec(spec, cfg.ged_pedestal);
    if (static_cast<int>(params.size()) != tspec.dim())
        throw ConfigError("expected " + std::to_string(tspec.dim()) +
                          " parameters in canonical order for " + model_name(spec));
    Eigen::VectorXd packed(tspec.dim());
    for (Eigen::Index i = 0; i < packed.size(); ++i)
        packed[i] = params[static_cast<std::size_t>(i)];
    const auto nu = unpack_params(tspec, packed);
    const auto series = simulate(spec, nu, T, seed);
    write_returns(out_path, series);
    std::cout << "wrote " << out_path << " (" << T << " observations)\n";
    return 0;
}

int cmd_convert_prices(const std::string& data_path, const std::string& out_path,
                       const std::string& date_col, const std::string& price_col) {
    const auto prices = load_returns(data_path, {date_col, price_col});
    const auto returns = prices_to_returns(prices);
    write_returns(out_path, returns);
    std::cout << "wrote " << out_path << " (" << returns.size() << " returns)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian estimation of GARCH-family volatility models: QML, "
                 "Metropolis-Hastings, and fixed-form Gaussian VI (BBVI, QBVI, MGVB, EMGVB)"};
    app.require_subcommand(1);

    RunConfig flags;  // values provided on the command line
    std::string config_path;
    std::string data_flag, models_flag, estimators_flag;

    auto* fit = app.add_subcommand("fit", "fit estimators over series x model cells");
    fit->add_option("--config", config_path, "JSON config file (flags take precedence)");
    fit->add_option("--data", data_flag, "comma-separated return CSV files");
    fit->add_option("--models", models_flag, "comma-separated model list");
    fit->add_option("--estimators", estimators_flag,
                    "comma-separated estimators: qml,mh,bbvi,qbvi,mgvb,emgvb");
    fit->add_option("--split", flags.split, "train fraction (chronological)");
    fit->add_option("--tau", flags.tau, "prior variance tau");
    fit->add_option("--iters", flags.vi.max_iters, "VI iterations");
    fit->add_option("--samples", flags.vi.n_samples, "VI Monte Carlo draws per iteration");
    fit->add_option("--lr", flags.vi.learning_rate, "VI learning rate");
    fit->add_option("--momentum", flags.vi.momentum, "VI gradient momentum");
    fit->add_option("--seed", flags.seed, "master seed");
    fit->add_option("--out", flags.out, "output directory");
    fit->add_option("--jobs", flags.jobs, "parallel worker count over cells");
    fit->add_option("--dist", flags.dist, "innovation distribution: normal|student-t|ged|skew-t");
    fit->add_option("--dist-shape", flags.dist_shape, "innovation shape parameters");
    fit->add_flag("--emit-traces", flags.emit_traces, "write per-cell lower-bound CSV traces");

    auto* compare = app.add_subcommand("compare", "deviation-vs-QML table from fit results");
    std::string results_dir, compare_out, compare_mode = "at_mean";
    compare->add_option("--results", results_dir, "directory of fit result JSONs")->required();
    compare->add_option("--out", compare_out, "output directory (default: the results dir)");
    compare->add_option("--mode", compare_mode, "at_mean (default) or draws")
        ->check(CLI::IsMember({"at_mean", "draws"}));

    auto* forecast = app.add_subcommand("forecast", "variance forecast bands from a fit result");
    std::string result_path, forecast_data, forecast_out = "band.csv";
    int horizon = 20;
    double level = 0.95;
    forecast->add_option("--result", result_path, "fit result JSON")->required();
    forecast->add_option("--data", forecast_data, "history CSV to forecast from")->required();
    forecast->add_option("--horizon", horizon, "forecast steps")->check(CLI::PositiveNumber);
    forecast->add_option("--level", level, "band coverage in (0,1)");
    forecast->add_option("--out", forecast_out, "output CSV path");

    auto* simulate_cmd = app.add_subcommand("simulate", "simulate a return series fixture");
    std::string sim_model = "garch(1,1)", sim_out = "sim.csv", params_flag;
    int sim_T = 1000;
    std::uint64_t sim_seed = 0;
    simulate_cmd->add_option("--model", sim_model, "model family and orders");
    simulate_cmd->add_option("--params", params_flag, "comma-separated canonical parameters")
        ->required();
    simulate_cmd->add_option("--T", sim_T, "observations")->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--seed", sim_seed, "simulation seed");
    simulate_cmd->add_option("--out", sim_out, "output CSV path");
    simulate_cmd->add_option("--dist", flags.dist,
                             "innovation distribution: normal|student-t|ged|skew-t");
    simulate_cmd->add_option("--dist-shape", flags.dist_shape, "innovation shape parameters");

    auto* convert = app.add_subcommand("convert-prices", "prices CSV to percent log returns");
    std::string conv_data, conv_out = "returns.csv", date_col = "date", price_col = "price";
    convert->add_option("--data", conv_data, "price CSV")->required();
    convert->add_option("--out", conv_out, "output CSV path");
    convert->add_option("--date-col", date_col, "date column name");
    convert->add_option("--price-col", price_col, "price column name");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;  // invocation error
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) apply_config_file(cfg, config_path);
        // command-line flags win over config-file values
        if (fit->count("--split")) cfg.split = flags.split;
        if (fit->count("--tau")) cfg.tau = flags.tau;
        if (fit->count("--iters")) cfg.vi.max_iters = flags.vi.max_iters;
        if (fit->count("--samples")) cfg.vi.n_samples = flags.vi.n_samples;
        if (fit->count("--lr")) cfg.vi.learning_rate = flags.vi.learning_rate;
        if (fit->count("--momentum")) cfg.vi.momentum = flags.vi.momentum;
        if (fit->count("--seed")) cfg.seed = flags.seed;
        if (fit->count("--out")) cfg.out = flags.out;
        if (fit->count("--jobs")) cfg.jobs = flags.jobs;
        if (fit->count("--emit-traces")) cfg.emit_traces = flags.emit_traces;
        for (auto* sub : {fit, simulate_cmd}) {
            if (sub->count("--dist")) cfg.dist = flags.dist;
            if (sub->count("--dist-shape")) cfg.dist_shape = flags.dist_shape;
        }
        if (!data_flag.empty()) cfg.data = split_list(data_flag);
        if (!models_flag.empty()) cfg.models = split_list(models_flag);
        if (!estimators_flag.empty()) cfg.estimators = split_list(estimators_flag);
        for (auto& estimator : cfg.estimators)
            for (auto& c : estimator) c = static_cast<char>(std::tolower(c));

        if (app.got_subcommand(fit)) return cmd_fit(cfg);
        if (app.got_subcommand(compare))
            return cmd_compare(results_dir, compare_out.empty() ? results_dir : compare_out,
                               compare_mode);
        if (app.got_subcommand(forecast))
            return cmd_forecast(result_path, forecast_data, horizon, level, forecast_out);
        if (app.got_subcommand(simulate_cmd)) {
            std::vector<double> params;
            for (const auto& cell : split_list(params_flag)) params.push_back(std::stod(cell));
            return cmd_simulate(sim_model, params, sim_T, sim_seed, sim_out, cfg);
        }
        if (app.got_subcommand(convert))
            return cmd_convert_prices(conv_data, conv_out, date_col, price_col);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
