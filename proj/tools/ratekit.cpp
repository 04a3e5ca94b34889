// ratekit: train, evaluate and explain shadow-rating models on tabular data.
//
// Subcommands: synth, evaluate, train, explain. Every run is a pure function
// of (config file, input files, seed): reruns write byte-identical artifacts
// except for the timestamp confined to run.json.

#include <cmath>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ratekit/artifacts.hpp"
#include "ratekit/crossval.hpp"
#include "ratekit/report.hpp"
#include "ratekit/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ratekit;

namespace {

constexpr std::string_view kVersion = "0.1.0";

struct RunContext {
    json config;          // resolved: overrides applied
    std::string command;
    std::uint64_t seed = 0;
    fs::path out;
    std::string fingerprint; // hash of the resolved config minus "out"
};

json require_field(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key))
        throw ConfigError("config: missing field \"" + key + "\" in " + where);
    return j.at(key);
}

RunContext make_context(const std::string& command, const std::string& config_path,
                        std::optional<std::uint64_t> seed_flag,
                        const std::string& out_flag, int jobs) {
    RunContext ctx;
    ctx.command = command;
    ctx.config = read_json_file(config_path);
    if (!ctx.config.is_object()) throw ConfigError("config: top level must be a JSON object");

    if (seed_flag) ctx.config["seed"] = *seed_flag;
    if (!ctx.config.contains("seed"))
        throw ConfigError("config: missing field \"seed\" (wall-clock seeding is not supported)");
    ctx.seed = ctx.config.at("seed").get<std::uint64_t>();

    if (!out_flag.empty()) ctx.config["out"] = out_flag;
    if (!ctx.config.contains("out"))
        throw ConfigError("config: missing field \"out\" (or pass --out)");
    ctx.out = ctx.config.at("out").get<std::string>();

    std::error_code ec;
    fs::create_directories(ctx.out, ec);
    if (ec || !fs::is_directory(ctx.out))
        throw ConfigError("config: output directory is not writable: " + ctx.out.string());

#ifdef _OPENMP
    if (jobs > 0) omp_set_num_threads(jobs);
    if (jobs == 1) kernels::set_parallel_enabled(false);
#else
    (void)jobs;
#endif

    json fingerprinted = ctx.config;
    fingerprinted.erase("out");
    ctx.fingerprint = fingerprint_of(fingerprinted);
    return ctx;
}

std::string timestamp_utc() {
    char buf[32];
    const std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

void write_run_manifest(const RunContext& ctx) {
    const json manifest = {
        {"command", ctx.command},
        {"config_hash", ctx.fingerprint},
        {"seed", ctx.seed},
        {"versions", {{"ratekit", std::string(kVersion)}}},
        {"timestamp", timestamp_utc()},
    };
    write_json_file(manifest, (ctx.out / "run.json").string());
}

SynthSpec synth_spec_from(const RunContext& ctx) {
    json spec_json = require_field(require_field(ctx.config, "data", "config"), "synth", "data");
    if (!spec_json.contains("seed")) spec_json["seed"] = ctx.seed;
    return SynthSpec::from_json(spec_json);
}

Dataset load_data(const RunContext& ctx) {
    const json data_cfg = require_field(ctx.config, "data", "config");
    if (data_cfg.contains("csv")) {
        const auto schema = FeatureSchema::from_json(require_field(data_cfg, "schema", "data"));
        return load_csv(data_cfg.at("csv").get<std::string>(), schema);
    }
    if (data_cfg.contains("synth")) return generate_synthetic(synth_spec_from(ctx));
    throw ConfigError("config: data source must specify \"csv\" or \"synth\"");
}

CrossValConfig crossval_config_from(const RunContext& ctx) {
    CrossValConfig cfg;
    cfg.k = ctx.config.value("k", cfg.k);
    cfg.seed = ctx.seed;
    cfg.train = ctx.config.contains("train") ? TrainConfig::from_json(ctx.config.at("train"))
                                             : TrainConfig{};
    cfg.train.seed = ctx.seed;
    cfg.inner_val_fraction = ctx.config.value("inner_val_fraction", cfg.inner_val_fraction);
    cfg.logistic_l2 = ctx.config.value("logistic_l2", cfg.logistic_l2);
    return cfg;
}

int cmd_synth(const RunContext& ctx) {
    const SynthSpec spec = synth_spec_from(ctx);
    const Dataset data = generate_synthetic(spec);
    write_csv(data, (ctx.out / "data.csv").string());

    const json manifest = {
        {"spec", spec.to_json()},
        {"seed", spec.seed},
        {"n_rows", data.n_rows},
        {"schema", data.schema.to_json()},
    };
    write_json_file(manifest, (ctx.out / "synth_manifest.json").string());
    write_run_manifest(ctx);
    std::cout << "wrote " << data.n_rows << " rows to " << (ctx.out / "data.csv").string() << "\n";
    return 0;
}

int cmd_evaluate(const RunContext& ctx) {
    const Dataset data = load_data(ctx);
    const auto model_names =
        require_field(ctx.config, "models", "config").get<std::vector<std::string>>();
    if (model_names.empty()) throw ConfigError("config: \"models\" must name at least one model");
    const CrossValConfig cv = crossval_config_from(ctx);

    json models_json = json::array();
    for (const auto& name : model_names) {
        const ModelKind kind = parse_model_kind(name);
        const EvalReport report = cross_validate(data, kind, cv, ctx.fingerprint);
        models_json.push_back(report.to_json());
        write_text_file(confusion_csv(report.pooled),
                        (ctx.out / ("confusion_" + name + ".csv")).string());
        write_text_file(confusion_svg(report.pooled, "Confusion matrix: " + name),
                        (ctx.out / ("confusion_" + name + ".svg")).string());
        std::cout << name << ": qwk " << report.qwk_mean << " +- " << report.qwk_std << "\n";
    }

    const json report = {
        {"config_fingerprint", ctx.fingerprint},
        {"k", cv.k},
        {"seed", ctx.seed},
        {"models", models_json},
    };
    write_json_file(report, (ctx.out / "report.json").string());
    write_run_manifest(ctx);
    return 0;
}

int cmd_train(const RunContext& ctx) {
    const Dataset data = load_data(ctx);
    const ModelKind kind =
        parse_model_kind(require_field(ctx.config, "model", "config").get<std::string>());
    const CrossValConfig cv = crossval_config_from(ctx);

    const FittedPipeline pipeline = fit_pipeline(data, text_handling_for(kind), "full");
    ModelArtifact artifact;
    artifact.kind = kind;
    artifact.fingerprint = ctx.fingerprint;

    switch (kind) {
    case ModelKind::linear: {
        const FeatureMatrix x = transform(pipeline, data);
        const std::vector<double> y(data.labels.begin(), data.labels.end());
        artifact.linear = fit_linear(x.dense, y);
        break;
    }
    case ModelKind::logistic: {
        const FeatureMatrix x = transform(pipeline, data);
        artifact.logistic = fit_ovr_logistic(x.dense, data.labels, cv.logistic_l2);
        break;
    }
    case ModelKind::ann:
    case ModelKind::ann_emb: {
        const int k_inner = std::max(
            2, static_cast<int>(std::llround(1.0 / std::max(cv.inner_val_fraction, 1e-9))));
        const FoldPlan inner = stratified_folds(data.labels, k_inner, ctx.seed ^ 0x1a2b3c4dull);
        const Dataset fit_data = data.subset(inner.train_indices(0));
        const Dataset val_data = data.subset(inner.folds[0]);
        const FeatureMatrix x_fit = transform(pipeline, fit_data);
        const FeatureMatrix x_val = transform(pipeline, val_data);

        Rng init_rng = Rng(ctx.seed).split(0x1417);
        std::optional<std::pair<int, int>> text;
        if (pipeline.tokenizer)
            text = {{pipeline.tokenizer->vocab_size(), pipeline.tokenizer->max_len}};
        Network net = build_network(pipeline.n_dense(), text, cv.train.net, init_rng);
        const TrainReport report =
            train_model(net, x_fit, fit_data.labels, x_val, val_data.labels, cv.train);
        write_json_file(report.to_json(), (ctx.out / "train_report.json").string());
        artifact.net = std::move(net);
        break;
    }
    }

    save_pipeline(pipeline, ctx.fingerprint, (ctx.out / "pipeline.json").string());
    save_model(artifact, (ctx.out / "model.json").string());
    write_run_manifest(ctx);
    std::cout << "wrote model.json and pipeline.json (fingerprint " << ctx.fingerprint << ")\n";
    return 0;
}

int cmd_explain(const RunContext& ctx) {
    const json explain_cfg = require_field(ctx.config, "explain", "config");
    const auto model_path = require_field(explain_cfg, "model", "explain").get<std::string>();
    const auto pipeline_path = require_field(explain_cfg, "pipeline", "explain").get<std::string>();
    const auto rows = require_field(explain_cfg, "rows", "explain").get<std::vector<std::size_t>>();
    const int background_size = explain_cfg.value("background_size", 16);
    const int n_samples = explain_cfg.value("n_samples", 2048);
    const bool svg = explain_cfg.value("svg", false);

    std::string pipeline_fingerprint;
    const FittedPipeline pipeline = load_pipeline(pipeline_path, &pipeline_fingerprint);
    const ModelArtifact artifact = load_model(model_path);
    if (pipeline_fingerprint != artifact.fingerprint)
        throw DataError("artifact fingerprint mismatch: pipeline " + pipeline_fingerprint +
                        " vs model " + artifact.fingerprint +
                        " (artifacts come from different runs)");

    const Dataset data = load_data(ctx);
    const FeatureMatrix features = transform(pipeline, data);
    for (const std::size_t row : rows)
        if (row >= features.n_rows())
            throw DataError("explain: row index " + std::to_string(row) +
                            " out of range (dataset has " + std::to_string(features.n_rows()) +
                            " rows)");

    const Predictor predictor =
        artifact.net ? make_predictor(*artifact.net)
                     : (artifact.linear ? make_predictor(*artifact.linear)
                                        : make_predictor(*artifact.logistic));
    const Batch background =
        sample_background(features, data.labels, background_size, ctx.seed);

    const bool exact = pipeline.groups.size() <= 12;
    std::vector<ShapExplanation> explanations(rows.size());
    // Rows are independent; exact/kernel evaluation parallelizes internally
    // over coalitions, so this loop stays serial to avoid nested regions.
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::vector<std::size_t> index{rows[i]};
        const Batch x = gather(features, index);
        explanations[i] =
            exact ? shap_exact(predictor, x, background, pipeline.groups)
                  : shap_kernel(predictor, x, background, pipeline.groups, n_samples,
                                mix64(ctx.seed) ^ rows[i]);
    }

    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto fp = force_plot_data(explanations[i]);
        json j = fp.to_json();
        // Attributions are on post-imputation values; flag the cells that
        // were actually missing in the source row.
        json imputed = json::array();
        for (std::size_t c = 0; c < data.numeric.size(); ++c)
            if (std::isnan(data.numeric[c][rows[i]])) imputed.push_back(data.numeric_names[c]);
        j["imputed_features"] = imputed;
        write_json_file(j, (ctx.out / ("force_row" + std::to_string(rows[i]) + ".json")).string());
    }
    const ImportanceTable table = importance(explanations);
    write_text_file(importance_csv(table), (ctx.out / "importance.csv").string());
    const SummaryData summary = summary_plot_data(explanations);
    write_text_file(summary_csv(summary), (ctx.out / "summary.csv").string());
    if (svg) {
        write_text_file(importance_svg(table, "Mean |SHAP| per feature"),
                        (ctx.out / "importance.svg").string());
        write_text_file(summary_svg(summary, "SHAP summary"),
                        (ctx.out / "summary.svg").string());
    }
    write_run_manifest(ctx);
    std::cout << "explained " << rows.size() << " rows ("
              << (exact ? "exact enumeration" : "kernel sampling") << ")\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"shadow-rating toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_flag;
    std::optional<std::uint64_t> seed_flag;
    int jobs = 0;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--seed", seed_flag, "override the config seed");
        sub->add_option("--out", out_flag, "override the output directory");
        sub->add_option("--jobs", jobs, "cap worker parallelism (default: all cores)");
    };

    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    auto* evaluate = app.add_subcommand("evaluate", "cross-validated model comparison");
    auto* train = app.add_subcommand("train", "fit a final model and write artifacts");
    auto* explain = app.add_subcommand("explain", "SHAP attributions for a trained model");
    for (auto* sub : {synth, evaluate, train, explain}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    try {
        const std::string command = app.get_subcommands().front()->get_name();
        const RunContext ctx = make_context(command, config_path, seed_flag, out_flag, jobs);
        if (command == "synth") return cmd_synth(ctx);
        if (command == "evaluate") return cmd_evaluate(ctx);
        if (command == "train") return cmd_train(ctx);
        if (command == "explain") return cmd_explain(ctx);
        throw ConfigError("unknown command: " + command);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
