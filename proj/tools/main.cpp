// stringvec command-line interface: profile | vectorize | analyze | join | bench.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "stringvec/hash.hpp"
#include "stringvec/pipeline.hpp"

namespace sv = stringvec;
using nlohmann::json;

namespace {

sv::PipelineConfig load_config(const std::string& path) {
    if (path.empty()) return {};
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j = json::parse(in);
    return sv::config_from_json(j);
}

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path);
    out << j.dump(2) << "\n";
}

void write_text(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path);
    out << text;
}

struct CacheHolder {
    std::optional<sv::EmbeddingCache> cache;

    sv::EmbeddingCache* open(const std::string& path) {
        if (path.empty()) return nullptr;
        cache.emplace(sv::EmbeddingCache::open(path));
        return &*cache;
    }
};

int run_profile(const std::string& input, char delimiter, int sample, int n_min, int n_max,
                std::int64_t threshold, std::uint64_t seed, const std::string& out_path) {
    sv::Table table = sv::load_csv(input, delimiter);
    json profiles = json::array();
    for (const auto& col : table.columns) {
        sv::NgramProfile p = sv::profile_column(col.values, sample, n_min, n_max,
                                                sv::mix_seed_str(seed, col.header), threshold,
                                                col.header);
        profiles.push_back({{"column", p.column},
                            {"sample_size", p.sample_size},
                            {"n_min", p.n_min},
                            {"n_max", p.n_max},
                            {"unique_ngrams", p.unique_ngrams},
                            {"regime", sv::regime_name(p.regime)}});
    }
    emit(profiles, out_path);
    return 0;
}

int run_vectorize(const std::string& input, char delimiter, const std::string& target,
                  const sv::PipelineConfig& config, const std::string& out_path) {
    sv::Table table = sv::load_csv(input, delimiter);
    if (!target.empty()) table = table.drop_column(target);

    CacheHolder holder;
    sv::EmbeddingCache* cache = holder.open(config.cache_path);
    auto backend = sv::make_backend(config.backend);
    sv::FeatureMatrix features = sv::vectorize_table(table, table, config, backend.get(), cache);

    // Plot-data style CSV: provenance header row then numeric rows.
    std::string csv;
    for (std::size_t j = 0; j < features.col_names.size(); ++j) {
        if (j) csv.push_back(',');
        csv += features.col_names[j];
    }
    csv.push_back('\n');
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        for (Eigen::Index j = 0; j < features.cols(); ++j) {
            if (j) csv.push_back(',');
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.17g", features.values(i, j));
            csv += buf;
        }
        csv.push_back('\n');
    }
    write_text(csv, out_path);
    return 0;
}

int run_analyze(const std::string& input, char delimiter, const std::string& target,
                const std::string& group_by, bool drop_group, const std::string& method,
                int train_size, sv::PipelineConfig config, const std::string& out_path) {
    sv::AnalyticsDataset ds;
    ds.table = sv::load_csv(input, delimiter);
    ds.name = ds.table.name;
    ds.target = target;
    ds.group_by = group_by;
    ds.drop_group = drop_group;

    CacheHolder holder;
    sv::EmbeddingCache* cache = holder.open(config.cache_path);
    auto backend = sv::make_backend(config.backend);
    sv::EvalReport report = sv::analyze_dataset(ds, method, train_size, config, backend.get(), cache);
    std::fprintf(stderr, "%s: auc %.4f +- %.4f over %zu folds (n=%d)\n", method.c_str(),
                 report.mean, report.stderr_, report.fold_aucs.size(), report.train_size);
    emit(sv::eval_report_to_json(report), out_path);
    return 0;
}

int run_join(const std::string& left_path, const std::string& right_path, char delimiter,
             const std::string& left_key, const std::string& right_key,
             const std::string& encoder, double tau, bool sweep, const std::string& gold_path,
             sv::PipelineConfig config, const std::string& out_path,
             const std::string& curve_path) {
    sv::Table left = sv::load_csv(left_path, delimiter);
    sv::Table right = sv::load_csv(right_path, delimiter);

    sv::JoinSpec spec;
    spec.left_key = left_key;
    spec.right_key = right_key;
    spec.tau = tau;
    spec.tfidf_range = config.tfidf_range;
    spec.minhash = config.minhash;
    spec.backend = config.backend;
    if (encoder == "tfidf") spec.encoder = sv::JoinEncoderKind::Tfidf;
    else if (encoder == "minhash") spec.encoder = sv::JoinEncoderKind::MinHash;
    else if (encoder == "embedding") spec.encoder = sv::JoinEncoderKind::Embedding;
    else throw std::runtime_error("unknown join encoder: " + encoder);

    CacheHolder holder;
    sv::EmbeddingCache* cache = holder.open(config.cache_path);
    auto backend = sv::make_backend(config.backend);

    std::vector<int> gold;
    if (!gold_path.empty()) gold = sv::load_gold_csv(gold_path, right.n_rows);

    json out;
    out["encoder"] = encoder;

    auto matches_json = [](const std::vector<sv::JoinMatch>& matches) {
        json arr = json::array();
        for (std::size_t i = 0; i < matches.size(); ++i) {
            json m = {{"right", i}, {"similarity", matches[i].similarity}};
            if (matches[i].left == sv::kNoMatch) m["left"] = nullptr;
            else m["left"] = matches[i].left;
            arr.push_back(std::move(m));
        }
        return arr;
    };

    if (sweep) {
        if (gold.empty()) throw std::runtime_error("--sweep requires --gold");
        sv::SweepResult result = sv::sweep_thresholds(right, left, spec, sv::default_taus(), gold,
                                                      backend.get(), cache);
        out["best_tau"] = result.best_tau;
        out["best_f1"] = result.best_f1;
        json curve = json::array();
        std::string curve_csv = "tau,precision,recall,f1\n";
        for (const auto& point : result.curve) {
            curve.push_back({{"tau", point.tau},
                             {"precision", point.metrics.precision},
                             {"recall", point.metrics.recall},
                             {"f1", point.metrics.f1}});
            char buf[128];
            std::snprintf(buf, sizeof(buf), "%g,%.17g,%.17g,%.17g\n", point.tau,
                          point.metrics.precision, point.metrics.recall, point.metrics.f1);
            curve_csv += buf;
        }
        out["curve"] = std::move(curve);
        if (!curve_path.empty()) write_text(curve_csv, curve_path);
    } else {
        sv::JoinResult result = sv::join(right, left, spec, backend.get(), cache);
        out["tau"] = tau;
        out["predicted"] = result.predicted;
        out["matches"] = matches_json(result.matches);
        if (!gold.empty()) {
            sv::JoinMetrics metrics = sv::evaluate_join(result, gold);
            out["metrics"] = {{"precision", metrics.precision},
                              {"recall", metrics.recall},
                              {"f1", metrics.f1},
                              {"predicted", metrics.predicted},
                              {"correct", metrics.correct},
                              {"gold_matches", metrics.gold_matches}};
        }
    }
    emit(out, out_path);
    return 0;
}

int run_bench(const std::string& bench_path, const std::string& out_path) {
    std::ifstream in(bench_path);
    if (!in) throw std::runtime_error("cannot open bench config: " + bench_path);
    json spec = json::parse(in);

    sv::PipelineConfig config;
    if (spec.contains("pipeline")) config = sv::config_from_json(spec.at("pipeline"));

    std::vector<std::string> methods = spec.value("methods", std::vector<std::string>{"minhash", "tfidf", "embedding"});

    CacheHolder holder;
    sv::EmbeddingCache* cache = holder.open(config.cache_path);
    auto backend = sv::make_backend(config.backend);

    json out;
    const std::string mode = spec.value("mode", "analytics");

    if (mode == "analytics" || mode == "both") {
        std::vector<sv::AnalyticsDataset> datasets;
        for (const auto& d : spec.value("datasets", json::array())) {
            sv::AnalyticsDataset ds;
            ds.table = sv::load_csv(d.at("path").get<std::string>());
            ds.name = d.value("name", ds.table.name);
            ds.target = d.at("target").get<std::string>();
            ds.group_by = d.value("group_by", std::string{});
            ds.drop_group = d.value("drop_group", false);
            datasets.push_back(std::move(ds));
        }
        sv::AnalyticsOptions options;
        if (spec.contains("settings"))
            options.settings = spec.at("settings").get<std::vector<std::string>>();
        options.baseline = spec.value("baseline", options.baseline);
        options.per_column_gain = spec.value("per_column_gain", false);
        sv::BenchmarkReport report = sv::run_analytics_benchmark(datasets, methods, config,
                                                                 backend.get(), cache, options);
        out["analytics"] = sv::report_to_json(report);
    }
    if (mode == "join" || mode == "both") {
        std::vector<sv::JoinBenchPair> pairs;
        for (const auto& p : spec.value("join_pairs", json::array())) {
            sv::JoinBenchPair pair;
            pair.name = p.at("name").get<std::string>();
            pair.right = sv::load_csv(p.at("right").get<std::string>());
            pair.left = sv::load_csv(p.at("left").get<std::string>());
            pair.right_key = p.at("right_key").get<std::string>();
            pair.left_key = p.at("left_key").get<std::string>();
            pair.gold = sv::load_gold_csv(p.at("gold").get<std::string>(), pair.right.n_rows);
            pairs.push_back(std::move(pair));
        }
        sv::BenchmarkReport report = sv::run_join_benchmark(pairs, methods, config,
                                                            backend.get(), cache);
        out["join"] = sv::report_to_json(report);
    }
    emit(out, out_path);
    return 0;
}

} // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"stringvec: vectorize string columns in tables for analytics and fuzzy joins"};
    app.require_subcommand(1);

    std::string config_path, input, out_path, target, group_by, method = "auto";
    std::string left_path, right_path, left_key, right_key, encoder = "tfidf", gold_path, curve_path;
    std::string delimiter = ",";
    bool drop_group = false, sweep = false;
    int train_size = 0, sample = 1000, n_min = 2, n_max = 4, folds = 0;
    std::int64_t threshold = 3000;
    std::uint64_t seed = 0;
    double tau = 0.5;

    auto* profile = app.add_subcommand("profile", "Profile per-column n-gram diversity");
    profile->add_option("--input", input, "input CSV")->required();
    profile->add_option("--delimiter", delimiter, "field delimiter");
    profile->add_option("--sample", sample, "rows sampled per column");
    profile->add_option("--nmin", n_min, "shortest n-gram");
    profile->add_option("--nmax", n_max, "longest n-gram");
    profile->add_option("--threshold", threshold, "dirty/diverse regime threshold");
    profile->add_option("--seed", seed, "sampling seed");
    profile->add_option("--out", out_path, "output path (stdout by default)");

    auto* vectorize = app.add_subcommand("vectorize", "Route and vectorize every column");
    vectorize->add_option("--input", input, "input CSV")->required();
    vectorize->add_option("--delimiter", delimiter, "field delimiter");
    vectorize->add_option("--target", target, "target column to exclude");
    vectorize->add_option("--config", config_path, "pipeline config JSON");
    vectorize->add_option("--out", out_path, "output CSV path");

    auto* analyze = app.add_subcommand("analyze", "Cross-validated attribute prediction");
    analyze->add_option("--input", input, "input CSV")->required();
    analyze->add_option("--delimiter", delimiter, "field delimiter");
    analyze->add_option("--target", target, "target column")->required();
    analyze->add_option("--group-by", group_by, "grouped CV key column");
    analyze->add_flag("--drop-group", drop_group, "exclude the group column from features");
    analyze->add_option("--encoder", method, "auto|minhash|tfidf|embedding|voting|stacking");
    analyze->add_option("--train-size", train_size, "subsample size (0 = all rows)");
    analyze->add_option("--folds", folds, "cross-validation folds (0 = config value)");
    analyze->add_option("--config", config_path, "pipeline config JSON");
    analyze->add_option("--seed", seed, "root seed override");
    analyze->add_option("--out", out_path, "output path");

    auto* join_cmd = app.add_subcommand("join", "Many-to-one fuzzy join");
    join_cmd->add_option("--left", left_path, "reference table CSV")->required();
    join_cmd->add_option("--right", right_path, "base table CSV")->required();
    join_cmd->add_option("--left-key", left_key, "left join key column")->required();
    join_cmd->add_option("--right-key", right_key, "right join key column")->required();
    join_cmd->add_option("--encoder", encoder, "tfidf|minhash|embedding");
    join_cmd->add_option("--tau", tau, "similarity threshold");
    join_cmd->add_flag("--sweep", sweep, "sweep thresholds 0.3..0.9 (needs --gold)");
    join_cmd->add_option("--gold", gold_path, "gold matches CSV (right_id,left_id)");
    join_cmd->add_option("--config", config_path, "pipeline config JSON");
    join_cmd->add_option("--out", out_path, "output path");
    join_cmd->add_option("--curve-out", curve_path, "threshold curve CSV path");

    auto* bench = app.add_subcommand("bench", "Run the benchmark grid from a config file");
    bench->add_option("--config", config_path, "bench config JSON")->required();
    bench->add_option("--out", out_path, "report path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        char delim = delimiter.empty() ? ',' : delimiter[0];
        if (profile->parsed())
            return run_profile(input, delim, sample, n_min, n_max, threshold, seed, out_path);
        if (vectorize->parsed())
            return run_vectorize(input, delim, target, load_config(config_path), out_path);
        if (analyze->parsed()) {
            sv::PipelineConfig config = load_config(config_path);
            if (seed != 0) config.seed = seed;
            if (folds > 0) config.folds = folds;
            return run_analyze(input, delim, target, group_by, drop_group, method, train_size,
                               config, out_path);
        }
        if (join_cmd->parsed())
            return run_join(left_path, right_path, delim, left_key, right_key, encoder, tau, sweep,
                            gold_path, load_config(config_path), out_path, curve_path);
        if (bench->parsed()) return run_bench(config_path, out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

int main(int argc, char** argv) { return cli_main(argc, argv); }
