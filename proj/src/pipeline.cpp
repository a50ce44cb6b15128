#include "stringvec/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "stringvec/hash.hpp"
#include "stringvec/linear.hpp"
#include "stringvec/metrics.hpp"

namespace stringvec {

using nlohmann::json;

const char* text_policy_name(TextPolicy p) noexcept {
    switch (p) {
        case TextPolicy::Auto: return "auto";
        case TextPolicy::ForceMinHash: return "minhash";
        case TextPolicy::ForceTfidf: return "tfidf";
        case TextPolicy::ForceEmbedding: return "embedding";
    }
    return "unknown";
}

TextPolicy text_policy_from_string(const std::string& s) {
    if (s == "auto") return TextPolicy::Auto;
    if (s == "minhash") return TextPolicy::ForceMinHash;
    if (s == "tfidf") return TextPolicy::ForceTfidf;
    if (s == "embedding") return TextPolicy::ForceEmbedding;
    throw std::invalid_argument("unknown text policy: " + s);
}

namespace {

const char* backend_kind_name(BackendKind k) {
    switch (k) {
        case BackendKind::Http: return "http";
        case BackendKind::File: return "file";
        case BackendKind::Mock: return "mock";
    }
    return "unknown";
}

BackendKind backend_kind_from_string(const std::string& s) {
    if (s == "http") return BackendKind::Http;
    if (s == "file") return BackendKind::File;
    if (s == "mock") return BackendKind::Mock;
    throw std::invalid_argument("unknown backend kind: " + s);
}

} // namespace

json config_to_json(const PipelineConfig& c) {
    json overrides = json::object();
    for (const auto& [col, policy] : c.column_policy_override)
        overrides[col] = text_policy_name(policy);
    return {
        {"schema_version", 1},
        {"regime_threshold", c.regime_threshold},
        {"pca_dim", c.pca_dim},
        {"minhash", {{"dim", c.minhash.dim}, {"n_min", c.minhash.n_min},
                     {"n_max", c.minhash.n_max}, {"seed", c.minhash.seed}}},
        {"tfidf", {{"n_min", c.tfidf_range.first}, {"n_max", c.tfidf_range.second}}},
        {"text_policy", text_policy_name(c.text_policy)},
        {"backend", {{"kind", backend_kind_name(c.backend.kind)},
                     {"model_id", c.backend.model_id},
                     {"endpoint", c.backend.endpoint},
                     {"path", c.backend.path},
                     {"batch_size", c.backend.batch_size},
                     {"max_retries", c.backend.max_retries},
                     {"dim", c.backend.dim},
                     {"seed", c.backend.seed},
                     {"retry_backoff_ms", c.backend.retry_backoff_ms},
                     {"max_inflight", c.backend.max_inflight}}},
        {"learner", {{"n_trees", c.learner.n_trees},
                     {"learning_rate", c.learner.learning_rate},
                     {"max_depth", c.learner.max_depth},
                     {"min_samples_leaf", c.learner.min_samples_leaf},
                     {"subsample", c.learner.subsample},
                     {"seed", c.learner.seed}}},
        {"folds", c.folds},
        {"seed", c.seed},
        {"train_sizes", c.train_sizes},
        {"profile_sample", c.profile_sample},
        {"profile_ngram_range", {{"n_min", c.profile_ngram_range.first},
                                 {"n_max", c.profile_ngram_range.second}}},
        {"cache_path", c.cache_path},
        {"column_policy_override", overrides},
    };
}

PipelineConfig config_from_json(const json& j) {
    PipelineConfig c;
    if (j.value("schema_version", 1) != 1) throw std::runtime_error("unsupported config schema_version");
    c.regime_threshold = j.value("regime_threshold", c.regime_threshold);
    c.pca_dim = j.value("pca_dim", c.pca_dim);
    if (j.contains("minhash")) {
        const auto& m = j.at("minhash");
        c.minhash.dim = m.value("dim", c.minhash.dim);
        c.minhash.n_min = m.value("n_min", c.minhash.n_min);
        c.minhash.n_max = m.value("n_max", c.minhash.n_max);
        c.minhash.seed = m.value("seed", c.minhash.seed);
    }
    if (j.contains("tfidf")) {
        const auto& t = j.at("tfidf");
        c.tfidf_range.first = t.value("n_min", c.tfidf_range.first);
        c.tfidf_range.second = t.value("n_max", c.tfidf_range.second);
    }
    if (j.contains("text_policy")) c.text_policy = text_policy_from_string(j.at("text_policy"));
    if (j.contains("backend")) {
        const auto& b = j.at("backend");
        if (b.contains("kind")) c.backend.kind = backend_kind_from_string(b.at("kind"));
        c.backend.model_id = b.value("model_id", c.backend.model_id);
        c.backend.endpoint = b.value("endpoint", c.backend.endpoint);
        c.backend.path = b.value("path", c.backend.path);
        c.backend.batch_size = b.value("batch_size", c.backend.batch_size);
        c.backend.max_retries = b.value("max_retries", c.backend.max_retries);
        c.backend.dim = b.value("dim", c.backend.dim);
        c.backend.seed = b.value("seed", c.backend.seed);
        c.backend.retry_backoff_ms = b.value("retry_backoff_ms", c.backend.retry_backoff_ms);
        c.backend.max_inflight = b.value("max_inflight", c.backend.max_inflight);
    }
    if (j.contains("learner")) {
        const auto& l = j.at("learner");
        c.learner.n_trees = l.value("n_trees", c.learner.n_trees);
        c.learner.learning_rate = l.value("learning_rate", c.learner.learning_rate);
        c.learner.max_depth = l.value("max_depth", c.learner.max_depth);
        c.learner.min_samples_leaf = l.value("min_samples_leaf", c.learner.min_samples_leaf);
        c.learner.subsample = l.value("subsample", c.learner.subsample);
        c.learner.seed = l.value("seed", c.learner.seed);
    }
    c.folds = j.value("folds", c.folds);
    c.seed = j.value("seed", c.seed);
    c.train_sizes = j.value("train_sizes", c.train_sizes);
    c.profile_sample = j.value("profile_sample", c.profile_sample);
    if (j.contains("profile_ngram_range")) {
        const auto& p = j.at("profile_ngram_range");
        c.profile_ngram_range.first = p.value("n_min", c.profile_ngram_range.first);
        c.profile_ngram_range.second = p.value("n_max", c.profile_ngram_range.second);
    }
    c.cache_path = j.value("cache_path", c.cache_path);
    if (j.contains("column_policy_override")) {
        for (const auto& [col, policy] : j.at("column_policy_override").items())
            c.column_policy_override[col] = text_policy_from_string(policy.get<std::string>());
    }
    return c;
}

std::string config_digest(const PipelineConfig& config) {
    return sha256_hex(config_to_json(config).dump());
}

// ---------------------------------------------------------------------------
// Vectorizer
// ---------------------------------------------------------------------------

namespace {

Matrix column_to_numeric(const std::vector<std::string>& values) {
    Matrix out(static_cast<Eigen::Index>(values.size()), 1);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < values.size(); ++i) {
        auto v = parse_number(values[i]);
        out(static_cast<Eigen::Index>(i), 0) = v ? *v : nan;
    }
    return out;
}

std::vector<std::string> numbered_names(const std::string& header, const char* stem, int k) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j)
        names.push_back(header + ":" + stem + std::to_string(j));
    return names;
}

} // namespace

FittedVectorizer FittedVectorizer::fit(const Table& train, const PipelineConfig& config,
                                       EmbeddingBackend* backend, EmbeddingCache* cache) {
    FittedVectorizer v;
    v.backend_ = backend;
    v.cache_ = cache;

    auto kinds = infer_column_kinds(train);

    for (std::size_t ci = 0; ci < train.columns.size(); ++ci) {
        const Column& col = train.columns[ci];
        ColState state;
        state.header = col.header;
        state.kind = kinds[ci].second;
        ColumnRoute route{col.header, state.kind, "", -1};

        switch (state.kind) {
            case ColumnKind::Numeric: {
                Matrix raw = column_to_numeric(col.values);
                state.imputer = MeanImputer::fit(raw);
                state.scaler = Scaler::fit(state.imputer.transform(raw));
                state.encoder = "standardize";
                break;
            }
            case ColumnKind::Datetime: {
                Matrix raw = datetime_encode(col.values).values;
                state.imputer = MeanImputer::fit(raw);
                state.scaler = Scaler::fit(state.imputer.transform(raw));
                state.encoder = "datetime";
                break;
            }
            case ColumnKind::LowCardCategorical: {
                state.onehot = OneHotEncoder::fit(col.values);
                state.encoder = "onehot";
                break;
            }
            case ColumnKind::MidCardCategorical: {
                state.minhash = config.minhash;
                state.encoder = "minhash";
                break;
            }
            case ColumnKind::Text: {
                TextPolicy policy = config.text_policy;
                if (auto it = config.column_policy_override.find(col.header);
                    it != config.column_policy_override.end())
                    policy = it->second;

                if (policy == TextPolicy::Auto) {
                    NgramProfile profile = profile_column(
                        col.values, config.profile_sample, config.profile_ngram_range.first,
                        config.profile_ngram_range.second,
                        mix_seed_str(config.seed, col.header), config.regime_threshold,
                        col.header);
                    route.unique_ngrams = profile.unique_ngrams;
                    policy = profile.regime == Regime::Dirty ? TextPolicy::ForceMinHash
                                                             : TextPolicy::ForceEmbedding;
                }

                if (policy == TextPolicy::ForceMinHash) {
                    state.minhash = config.minhash;
                    state.encoder = "minhash";
                } else if (policy == TextPolicy::ForceTfidf) {
                    auto [model, feats] = tfidf_fit_transform(col.values, config.tfidf_range.first,
                                                              config.tfidf_range.second);
                    state.tfidf = std::move(model);
                    state.pca = pca_fit(feats.values, config.pca_dim);
                    state.encoder = "tfidf+pca";
                } else {
                    if (!backend)
                        throw std::invalid_argument(
                            "vectorizer: text column \"" + col.header +
                            "\" routed to embeddings but no backend was provided");
                    FeatureMatrix embedded = embed_batch(col.values, *backend, cache);
                    state.pca = pca_fit(embedded.values, config.pca_dim);
                    state.encoder = "embedding+pca";
                }
                break;
            }
        }

        route.encoder = state.encoder;
        v.routes_.push_back(std::move(route));
        v.columns_.push_back(std::move(state));
    }
    return v;
}

FeatureMatrix FittedVectorizer::transform(const Table& table) const {
    std::vector<FeatureMatrix> blocks;
    blocks.reserve(columns_.size());

    for (const auto& state : columns_) {
        const Column* col = table.find(state.header);
        if (!col) throw std::invalid_argument("transform: missing column " + state.header);

        FeatureMatrix block;
        if (state.encoder == "standardize") {
            block.values = state.scaler.transform(state.imputer.transform(column_to_numeric(col->values)));
            block.col_names = {state.header};
        } else if (state.encoder == "datetime") {
            FeatureMatrix parts = datetime_encode(col->values);
            block.values = state.scaler.transform(state.imputer.transform(std::move(parts.values)));
            block.col_names.reserve(parts.col_names.size());
            for (const auto& n : parts.col_names) block.col_names.push_back(state.header + ":" + n);
        } else if (state.encoder == "onehot") {
            block = state.onehot.transform(col->values);
            for (auto& n : block.col_names) n = state.header + n;  // header=value
        } else if (state.encoder == "minhash") {
            block.values = minhash_encode(col->values, state.minhash).values;
            block.col_names = numbered_names(state.header, "mh", state.minhash.dim);
        } else if (state.encoder == "tfidf+pca") {
            SparseFeatures tf = tfidf_transform(state.tfidf, col->values);
            block.values = pca_transform(state.pca, tf.values);
            block.col_names = numbered_names(state.header, "pc", state.pca.k());
        } else if (state.encoder == "embedding+pca") {
            if (!backend_)
                throw std::invalid_argument("transform: embedding route without a backend");
            FeatureMatrix embedded = embed_batch(col->values, *backend_, cache_);
            block.values = pca_transform(state.pca, embedded.values);
            block.col_names = numbered_names(state.header, "pc", state.pca.k());
        } else {
            throw std::logic_error("transform: unknown encoder state " + state.encoder);
        }
        blocks.push_back(std::move(block));
    }

    FeatureMatrix out = hcat(std::move(blocks));
    check_finite(out);
    return out;
}

FeatureMatrix vectorize_table(const Table& train, const Table& apply,
                              const PipelineConfig& config, EmbeddingBackend* backend,
                              EmbeddingCache* cache) {
    return FittedVectorizer::fit(train, config, backend, cache).transform(apply);
}

double roc_auc_gain(double method_auc, double baseline_auc) {
    if (baseline_auc <= 0.0) throw std::invalid_argument("roc_auc_gain: baseline must be > 0");
    return 100.0 * (method_auc - baseline_auc) / baseline_auc;
}

// ---------------------------------------------------------------------------
// Benchmarks
// ---------------------------------------------------------------------------

namespace {

std::vector<int> seeded_subsample(std::size_t n, int take, std::uint64_t seed) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    if (static_cast<std::size_t>(take) >= n) return idx;
    SplitMix64 rng(seed);
    for (int i = 0; i < take; ++i) {
        auto j = static_cast<std::size_t>(i) + static_cast<std::size_t>(rng.bounded(n - static_cast<std::size_t>(i)));
        std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
    }
    idx.resize(static_cast<std::size_t>(take));
    std::sort(idx.begin(), idx.end());
    return idx;
}

std::vector<int> subset_labels(const std::vector<int>& labels, const std::vector<int>& rows) {
    std::vector<int> out;
    out.reserve(rows.size());
    for (int r : rows) out.push_back(labels[static_cast<std::size_t>(r)]);
    return out;
}

bool is_ensemble_method(const std::string& method) {
    return method == "voting" || method == "stacking";
}

PipelineConfig config_for_method(const PipelineConfig& base, const std::string& method) {
    PipelineConfig c = base;
    if (!is_ensemble_method(method)) c.text_policy = text_policy_from_string(method);
    return c;
}

// GBDT over the routed feature matrix: the standard pipeline.
std::vector<double> score_standard(const Table& features, const std::vector<int>& labels,
                                   const std::vector<int>& train_rows,
                                   const std::vector<int>& test_rows,
                                   const PipelineConfig& config, EmbeddingBackend* backend,
                                   EmbeddingCache* cache) {
    Table train_table = features.select_rows(train_rows);
    Table test_table = features.select_rows(test_rows);

    FittedVectorizer vec = FittedVectorizer::fit(train_table, config, backend, cache);
    FeatureMatrix x_train = vec.transform(train_table);
    FeatureMatrix x_test = vec.transform(test_table);

    GbdtModel model = gbdt_fit(x_train.values, subset_labels(labels, train_rows), config.learner);
    Vector p = gbdt_predict_proba(model, x_test.values);
    return {p.data(), p.data() + p.size()};
}

// GBDT on non-text features ensembled with a logistic regression on raw
// text embeddings, combined by soft voting or stacking.
struct EnsembleParts {
    Table non_text;
    std::vector<std::string> text_headers;
};

EnsembleParts split_text_columns(const Table& features) {
    EnsembleParts parts;
    parts.non_text.name = features.name;
    parts.non_text.n_rows = features.n_rows;
    auto kinds = infer_column_kinds(features);
    for (std::size_t i = 0; i < features.columns.size(); ++i) {
        if (kinds[i].second == ColumnKind::Text)
            parts.text_headers.push_back(features.columns[i].header);
        else
            parts.non_text.columns.push_back(features.columns[i]);
    }
    return parts;
}

Matrix embed_text_block(const Table& features, const std::vector<std::string>& headers,
                        const std::vector<int>& rows, EmbeddingBackend& backend,
                        EmbeddingCache* cache) {
    std::vector<FeatureMatrix> blocks;
    Table view = features.select_rows(rows);
    for (const auto& h : headers) {
        const Column* col = view.find(h);
        blocks.push_back(embed_batch(col->values, backend, cache));
    }
    return hcat(std::move(blocks)).values;
}

constexpr double kEnsembleLogRegL2 = 1e-2;

std::vector<double> score_ensemble(const Table& features, const std::vector<int>& labels,
                                   const std::vector<int>& train_rows,
                                   const std::vector<int>& test_rows, const std::string& method,
                                   const PipelineConfig& config, EmbeddingBackend* backend,
                                   EmbeddingCache* cache) {
    if (!backend) throw std::invalid_argument("ensemble methods need an embedding backend");

    EnsembleParts parts = split_text_columns(features);
    std::vector<int> y_train = subset_labels(labels, train_rows);

    const bool has_numeric = !parts.non_text.columns.empty();
    const bool has_text = !parts.text_headers.empty();

    auto fit_gbdt_probs = [&](const std::vector<int>& fit_rows, const std::vector<int>& apply_rows,
                              const std::vector<int>& fit_labels) -> Vector {
        Table fit_table = parts.non_text.select_rows(fit_rows);
        Table apply_table = parts.non_text.select_rows(apply_rows);
        FittedVectorizer vec = FittedVectorizer::fit(fit_table, config, backend, cache);
        GbdtModel model = gbdt_fit(vec.transform(fit_table).values, fit_labels, config.learner);
        return gbdt_predict_proba(model, vec.transform(apply_table).values);
    };
    auto fit_logreg_probs = [&](const std::vector<int>& fit_rows, const std::vector<int>& apply_rows,
                                const std::vector<int>& fit_labels) -> Vector {
        Matrix x_fit = embed_text_block(features, parts.text_headers, fit_rows, *backend, cache);
        Matrix x_apply = embed_text_block(features, parts.text_headers, apply_rows, *backend, cache);
        LogisticRegression model = logreg_fit(x_fit, fit_labels, kEnsembleLogRegL2, {200, 1e-6});
        return logreg_predict_proba(model, x_apply);
    };

    // Degenerate schemas collapse to the surviving base model.
    if (!has_text) {
        Vector p = fit_gbdt_probs(train_rows, test_rows, y_train);
        return {p.data(), p.data() + p.size()};
    }
    if (!has_numeric) {
        Vector p = fit_logreg_probs(train_rows, test_rows, y_train);
        return {p.data(), p.data() + p.size()};
    }

    if (method == "voting") {
        Vector p = voting_ensemble({fit_gbdt_probs(train_rows, test_rows, y_train),
                                    fit_logreg_probs(train_rows, test_rows, y_train)});
        return {p.data(), p.data() + p.size()};
    }

    // Stacking: out-of-fold base predictions on the train rows feed the meta
    // learner; bases refit on the full train fold score the test rows.
    const int inner_folds = 5;
    std::vector<int> inner = stratified_folds(y_train, inner_folds,
                                              mix_seed({config.seed, 0x57ac4ULL}));
    Matrix oof(static_cast<Eigen::Index>(train_rows.size()), 2);
    for (int f = 0; f < inner_folds; ++f) {
        std::vector<int> fit_rows, apply_rows, fit_labels;
        std::vector<Eigen::Index> apply_pos;
        for (std::size_t i = 0; i < train_rows.size(); ++i) {
            if (inner[i] == f) {
                apply_rows.push_back(train_rows[i]);
                apply_pos.push_back(static_cast<Eigen::Index>(i));
            } else {
                fit_rows.push_back(train_rows[i]);
                fit_labels.push_back(y_train[i]);
            }
        }
        Vector g = fit_gbdt_probs(fit_rows, apply_rows, fit_labels);
        Vector l = fit_logreg_probs(fit_rows, apply_rows, fit_labels);
        for (std::size_t i = 0; i < apply_pos.size(); ++i) {
            oof(apply_pos[i], 0) = g[static_cast<Eigen::Index>(i)];
            oof(apply_pos[i], 1) = l[static_cast<Eigen::Index>(i)];
        }
    }

    Matrix base_test(static_cast<Eigen::Index>(test_rows.size()), 2);
    base_test.col(0) = fit_gbdt_probs(train_rows, test_rows, y_train);
    base_test.col(1) = fit_logreg_probs(train_rows, test_rows, y_train);

    Vector p = stacking_ensemble(oof, y_train, base_test, kEnsembleLogRegL2);
    return {p.data(), p.data() + p.size()};
}

std::vector<double> score_method(const Table& features, const std::vector<int>& labels,
                                 const std::vector<int>& train_rows,
                                 const std::vector<int>& test_rows, const std::string& method,
                                 const PipelineConfig& config, EmbeddingBackend* backend,
                                 EmbeddingCache* cache) {
    if (is_ensemble_method(method))
        return score_ensemble(features, labels, train_rows, test_rows, method, config, backend, cache);
    return score_standard(features, labels, train_rows, test_rows,
                          config_for_method(config, method), backend, cache);
}

Table text_only_view(const Table& features) {
    Table out;
    out.name = features.name;
    out.n_rows = features.n_rows;
    auto kinds = infer_column_kinds(features);
    for (std::size_t i = 0; i < features.columns.size(); ++i)
        if (kinds[i].second == ColumnKind::Text) out.columns.push_back(features.columns[i]);
    return out;
}

struct PreparedDataset {
    SupervisedDataset data;
    int train_size = 0;
    std::uint64_t fold_seed = 0;
};

PreparedDataset prepare_dataset(const AnalyticsDataset& ds, int train_size,
                                const PipelineConfig& config) {
    int take = train_size;
    if (static_cast<std::size_t>(take) > ds.table.n_rows) {
        std::fprintf(stderr, "warning: dataset %s has %zu rows < train_size %d; clamping\n",
                     ds.name.c_str(), ds.table.n_rows, train_size);
        take = static_cast<int>(ds.table.n_rows);
    }
    std::uint64_t sub_seed = mix_seed_str(mix_seed({config.seed, static_cast<std::uint64_t>(take), 0x5ab5ULL}), ds.name);
    Table sub = ds.table.select_rows(seeded_subsample(ds.table.n_rows, take, sub_seed));

    PreparedDataset out;
    std::uint64_t bal_seed = mix_seed_str(mix_seed({config.seed, static_cast<std::uint64_t>(take), 0xba1ULL}), ds.name);
    out.data = binarize_and_balance(sub, ds.target, bal_seed, ds.group_by, ds.drop_group);
    out.train_size = take;
    out.fold_seed = mix_seed_str(mix_seed({config.seed, static_cast<std::uint64_t>(take), 0xf01dULL}), ds.name);
    return out;
}

EvalReport evaluate_cell(const Table& features, const SupervisedDataset& data,
                         const std::string& method, int folds, std::uint64_t fold_seed,
                         const PipelineConfig& config, EmbeddingBackend* backend,
                         EmbeddingCache* cache) {
    const std::vector<std::string>* groups = data.group_keys.empty() ? nullptr : &data.group_keys;
    return cross_validate(
        data.labels,
        [&](const std::vector<int>& train_rows, const std::vector<int>& test_rows) {
            return score_method(features, data.labels, train_rows, test_rows, method, config,
                                backend, cache);
        },
        folds, fold_seed, groups, method);
}

void append_rank_entries(BenchmarkReport& report, const std::vector<std::string>& methods,
                         const std::vector<int>& train_sizes) {
    // cells -> (method, size) -> ranks within each (setting, size, dataset) task.
    std::map<std::pair<std::string, int>, std::vector<double>> rank_pool;

    std::map<std::tuple<std::string, int, std::string>, std::map<std::string, double>> tasks;
    for (const auto& cell : report.cells)
        tasks[{cell.setting, cell.train_size, cell.dataset}][cell.method] = cell.mean;

    for (const auto& [task_key, method_scores] : tasks) {
        std::vector<std::string> present;
        std::vector<double> scores;
        for (const auto& m : methods) {
            auto it = method_scores.find(m);
            if (it != method_scores.end()) {
                present.push_back(m);
                scores.push_back(-it->second);  // rank 1 = best score
            }
        }
        if (present.size() < 2) continue;
        auto ranks = fractional_ranks(scores);
        for (std::size_t i = 0; i < present.size(); ++i)
            rank_pool[{present[i], std::get<1>(task_key)}].push_back(ranks[i]);
    }

    for (int size : train_sizes) {
        for (const auto& m : methods) {
            auto it = rank_pool.find({m, size});
            if (it == rank_pool.end()) continue;
            double mean = std::accumulate(it->second.begin(), it->second.end(), 0.0) /
                          static_cast<double>(it->second.size());
            report.mean_ranks.push_back({m, size, mean});
        }
    }
    for (const auto& m : methods) {
        std::vector<double> all;
        for (const auto& [key, ranks] : rank_pool)
            if (key.first == m) all.insert(all.end(), ranks.begin(), ranks.end());
        if (all.empty()) continue;
        report.mean_ranks.push_back(
            {m, -1, std::accumulate(all.begin(), all.end(), 0.0) / static_cast<double>(all.size())});
    }
}

void append_gain_entries(BenchmarkReport& report, const std::vector<std::string>& methods,
                         const std::string& baseline) {
    if (std::find(methods.begin(), methods.end(), baseline) == methods.end()) return;

    // (setting, size, dataset) -> method -> mean score
    std::map<std::tuple<std::string, int, std::string>, std::map<std::string, double>> tasks;
    for (const auto& cell : report.cells)
        tasks[{cell.setting, cell.train_size, cell.dataset}][cell.method] = cell.mean;

    std::map<std::tuple<std::string, std::string, int>, std::pair<double, int>> sums;
    for (const auto& [task_key, method_scores] : tasks) {
        auto base = method_scores.find(baseline);
        if (base == method_scores.end() || base->second <= 0.0) continue;
        for (const auto& [m, score] : method_scores) {
            auto& acc = sums[{m, std::get<0>(task_key), std::get<1>(task_key)}];
            acc.first += roc_auc_gain(score, base->second);
            acc.second += 1;
        }
    }
    for (const auto& m : methods) {
        for (const auto& [key, acc] : sums) {
            if (std::get<0>(key) != m) continue;
            report.gains.push_back({m, std::get<1>(key), baseline, std::get<2>(key),
                                    acc.first / static_cast<double>(acc.second)});
        }
    }
}

} // namespace

BenchmarkReport run_analytics_benchmark(const std::vector<AnalyticsDataset>& datasets,
                                        const std::vector<std::string>& methods,
                                        const PipelineConfig& config, EmbeddingBackend* backend,
                                        EmbeddingCache* cache, const AnalyticsOptions& options) {
    BenchmarkReport report;
    report.config_digest = config_digest(config);

    std::unique_ptr<EmbeddingBackend> owned;
    if (!backend) {
        owned = make_backend(config.backend);
        backend = owned.get();
    }

    for (const auto& ds : datasets) {
        for (int size : config.train_sizes) {
            PreparedDataset prepared = prepare_dataset(ds, size, config);
            Table text_view = text_only_view(prepared.data.features);

            for (const auto& setting : options.settings) {
                const bool text_only = setting == "text_only";
                const Table& features = text_only ? text_view : prepared.data.features;
                if (features.columns.empty()) continue;

                for (const auto& method : methods) {
                    if (is_ensemble_method(method) && text_only) continue;
                    EvalReport eval = evaluate_cell(features, prepared.data, method, config.folds,
                                                    prepared.fold_seed, config, backend, cache);
                    BenchCell cell;
                    cell.dataset = ds.name;
                    cell.setting = setting;
                    cell.method = method;
                    cell.metric = "auc";
                    cell.train_size = prepared.train_size;
                    cell.mean = eval.mean;
                    cell.stderr_ = eval.stderr_;
                    cell.fold_scores = eval.fold_aucs;
                    report.cells.push_back(std::move(cell));
                }
            }

            if (options.per_column_gain) {
                // Replace one text column's encoding with embeddings while the
                // rest stay MinHash; gain relative to the all-MinHash pipeline.
                PipelineConfig base_config = config;
                base_config.text_policy = TextPolicy::ForceMinHash;
                base_config.column_policy_override.clear();
                EvalReport base_eval =
                    evaluate_cell(prepared.data.features, prepared.data, "minhash", config.folds,
                                  prepared.fold_seed, base_config, backend, cache);

                auto kinds = infer_column_kinds(prepared.data.features);
                for (const auto& [header, kind] : kinds) {
                    if (kind != ColumnKind::Text) continue;
                    PipelineConfig variant = base_config;
                    variant.column_policy_override[header] = TextPolicy::ForceEmbedding;
                    EvalReport eval =
                        evaluate_cell(prepared.data.features, prepared.data, "minhash",
                                      config.folds, prepared.fold_seed, variant, backend, cache);
                    const Column* col = prepared.data.features.find(header);
                    NgramProfile profile = profile_column(
                        col->values, config.profile_sample, config.profile_ngram_range.first,
                        config.profile_ngram_range.second, mix_seed_str(config.seed, header),
                        config.regime_threshold, header);
                    report.column_gains.push_back({ds.name, header, regime_name(profile.regime),
                                                   profile.unique_ngrams,
                                                   roc_auc_gain(eval.mean, base_eval.mean)});
                }
            }
        }
    }

    append_rank_entries(report, methods, config.train_sizes);
    append_gain_entries(report, methods, options.baseline);
    return report;
}

BenchmarkReport run_join_benchmark(const std::vector<JoinBenchPair>& pairs,
                                   const std::vector<std::string>& methods,
                                   const PipelineConfig& config, EmbeddingBackend* backend,
                                   EmbeddingCache* cache) {
    BenchmarkReport report;
    report.config_digest = config_digest(config);

    std::unique_ptr<EmbeddingBackend> owned;
    if (!backend) {
        owned = make_backend(config.backend);
        backend = owned.get();
    }

    for (const auto& pair : pairs) {
        for (const auto& method : methods) {
            JoinSpec spec;
            spec.right_key = pair.right_key;
            spec.left_key = pair.left_key;
            spec.tfidf_range = config.tfidf_range;
            spec.minhash = config.minhash;
            spec.backend = config.backend;
            if (method == "tfidf") spec.encoder = JoinEncoderKind::Tfidf;
            else if (method == "minhash") spec.encoder = JoinEncoderKind::MinHash;
            else if (method == "embedding") spec.encoder = JoinEncoderKind::Embedding;
            else throw std::invalid_argument("join benchmark: unknown method " + method);

            SweepResult sweep = sweep_thresholds(pair.right, pair.left, spec, default_taus(),
                                                 pair.gold, backend, cache);
            BenchCell cell;
            cell.dataset = pair.name;
            cell.setting = "join";
            cell.method = method;
            cell.metric = "best_f1";
            cell.train_size = 0;
            cell.mean = sweep.best_f1;
            cell.stderr_ = 0.0;
            report.cells.push_back(std::move(cell));
        }
    }

    append_rank_entries(report, methods, {0});
    append_gain_entries(report, methods, "tfidf");
    return report;
}

EvalReport analyze_dataset(const AnalyticsDataset& dataset, const std::string& method,
                           int train_size, const PipelineConfig& config,
                           EmbeddingBackend* backend, EmbeddingCache* cache) {
    std::unique_ptr<EmbeddingBackend> owned;
    if (!backend) {
        owned = make_backend(config.backend);
        backend = owned.get();
    }
    int size = train_size > 0 ? train_size : static_cast<int>(dataset.table.n_rows);
    PreparedDataset prepared = prepare_dataset(dataset, size, config);
    EvalReport report = evaluate_cell(prepared.data.features, prepared.data, method, config.folds,
                                      prepared.fold_seed, config, backend, cache);
    report.train_size = prepared.train_size;
    return report;
}

json report_to_json(const BenchmarkReport& report) {
    json cells = json::array();
    for (const auto& c : report.cells) {
        cells.push_back({{"dataset", c.dataset}, {"setting", c.setting}, {"method", c.method},
                         {"metric", c.metric}, {"train_size", c.train_size}, {"mean", c.mean},
                         {"stderr", c.stderr_}, {"fold_scores", c.fold_scores}});
    }
    json gains = json::array();
    for (const auto& g : report.gains) {
        gains.push_back({{"method", g.method}, {"setting", g.setting}, {"baseline", g.baseline},
                         {"train_size", g.train_size}, {"gain_pct", g.gain_pct}});
    }
    json ranks = json::array();
    for (const auto& r : report.mean_ranks) {
        ranks.push_back({{"method", r.method}, {"train_size", r.train_size},
                         {"mean_rank", r.mean_rank}});
    }
    json column_gains = json::array();
    for (const auto& c : report.column_gains) {
        column_gains.push_back({{"dataset", c.dataset}, {"column", c.column},
                                {"regime", c.regime}, {"unique_ngrams", c.unique_ngrams},
                                {"gain_pct", c.gain_pct}});
    }
    return {{"schema_version", 1},
            {"config_digest", report.config_digest},
            {"rank_pooling", report.rank_pooling},
            {"cells", std::move(cells)},
            {"gains", std::move(gains)},
            {"mean_ranks", std::move(ranks)},
            {"column_gains", std::move(column_gains)}};
}

} // namespace stringvec
