#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "stringvec/cv.hpp"
#include "stringvec/embedding.hpp"
#include "stringvec/encoders.hpp"
#include "stringvec/gbdt.hpp"
#include "stringvec/join.hpp"
#include "stringvec/ngram.hpp"
#include "stringvec/pca.hpp"
#include "stringvec/table.hpp"

namespace stringvec {

enum class TextPolicy { Auto, ForceMinHash, ForceTfidf, ForceEmbedding };

const char* text_policy_name(TextPolicy p) noexcept;
TextPolicy text_policy_from_string(const std::string& s);

/// Default pipeline configuration: regime threshold 3000 unique
/// n-grams per 1000 sampled rows, PCA to 30 components, 30-dimensional
/// MinHash over 2-4 character grams, TF-IDF over 2-3 grams, 7 CV folds.
struct PipelineConfig {
    std::int64_t regime_threshold = 3000;
    int pca_dim = 30;
    MinHashParams minhash{};
    std::pair<int, int> tfidf_range{2, 3};
    TextPolicy text_policy = TextPolicy::Auto;
    BackendConfig backend{};
    GbdtParams learner{};
    int folds = 7;
    std::uint64_t seed = 0;
    std::vector<int> train_sizes{1000};
    int profile_sample = 1000;
    std::pair<int, int> profile_ngram_range{2, 4};
    std::string cache_path;  // empty = in-memory only

    /// Per-column routing overrides for text columns (column-gain protocol).
    std::map<std::string, TextPolicy> column_policy_override;
};

nlohmann::json config_to_json(const PipelineConfig& config);
PipelineConfig config_from_json(const nlohmann::json& j);
std::string config_digest(const PipelineConfig& config);

/// How one column was routed, for reports and the Auto policy audit.
struct ColumnRoute {
    std::string header;
    ColumnKind kind = ColumnKind::Text;
    std::string encoder;              // standardize | datetime | onehot | minhash | tfidf+pca | embedding+pca
    std::int64_t unique_ngrams = -1;  // filled when the profiler ran
};

/// Column router fitted on training rows only: numeric columns are imputed
/// and standardized, datetimes expanded then standardized, low-cardinality
/// categoricals one-hot encoded, mid-cardinality columns MinHash sketched,
/// and text columns routed by policy (Auto profiles n-gram diversity and
/// sends dirty columns to MinHash, diverse ones to embeddings + PCA).
class FittedVectorizer {
public:
    static FittedVectorizer fit(const Table& train, const PipelineConfig& config,
                                EmbeddingBackend* backend = nullptr,
                                EmbeddingCache* cache = nullptr);

    FeatureMatrix transform(const Table& table) const;

    const std::vector<ColumnRoute>& routes() const { return routes_; }

private:
    struct ColState {
        std::string header;
        ColumnKind kind = ColumnKind::Text;
        std::string encoder;
        MeanImputer imputer;
        Scaler scaler;
        OneHotEncoder onehot;
        MinHashParams minhash;
        TfidfModel tfidf;
        PcaModel pca;
    };

    std::vector<ColState> columns_;
    std::vector<ColumnRoute> routes_;
    EmbeddingBackend* backend_ = nullptr;  // non-owning
    EmbeddingCache* cache_ = nullptr;      // non-owning
};

/// Fits on train, transforms apply.
FeatureMatrix vectorize_table(const Table& train, const Table& apply,
                              const PipelineConfig& config,
                              EmbeddingBackend* backend = nullptr,
                              EmbeddingCache* cache = nullptr);

/// Percent AUC gain of a method over a baseline: 100 (m - b) / b.
double roc_auc_gain(double method_auc, double baseline_auc);

// ---------------------------------------------------------------------------
// Benchmarks
// ---------------------------------------------------------------------------

struct AnalyticsDataset {
    std::string name;
    Table table;
    std::string target;
    std::string group_by;       // optional grouped CV key column
    bool drop_group = false;    // exclude the group column from features
};

struct JoinBenchPair {
    std::string name;
    Table right;
    Table left;
    std::string right_key;
    std::string left_key;
    std::vector<int> gold;  // per right row, kNoMatch for nulls
};

struct BenchCell {
    std::string dataset;
    std::string setting;  // text+numeric | text_only | join
    std::string method;
    std::string metric;   // auc | best_f1
    int train_size = 0;
    double mean = 0.0;
    double stderr_ = 0.0;
    std::vector<double> fold_scores;
};

struct GainEntry {
    std::string method;
    std::string setting;
    std::string baseline;
    int train_size = 0;
    double gain_pct = 0.0;
};

struct RankEntry {
    std::string method;
    int train_size = 0;  // -1 pools every size
    double mean_rank = 0.0;
};

struct ColumnGainEntry {
    std::string dataset;
    std::string column;
    std::string regime;
    std::int64_t unique_ngrams = 0;
    double gain_pct = 0.0;
};

struct BenchmarkReport {
    std::string config_digest;
    std::string rank_pooling = "ranks computed within (setting, train_size) cells, then averaged";
    std::vector<BenchCell> cells;
    std::vector<GainEntry> gains;
    std::vector<RankEntry> mean_ranks;
    std::vector<ColumnGainEntry> column_gains;
};

nlohmann::json report_to_json(const BenchmarkReport& report);

struct AnalyticsOptions {
    std::vector<std::string> settings{"text+numeric", "text_only"};
    std::string baseline = "minhash";
    bool per_column_gain = false;
};

/// Known methods: minhash | tfidf | embedding | auto (text-encoder policies,
/// GBDT on the assembled features) and voting | stacking (GBDT on non-text
/// features ensembled with a logistic regression on raw text embeddings).
/// Ensemble methods run in the text+numeric setting only.
BenchmarkReport run_analytics_benchmark(const std::vector<AnalyticsDataset>& datasets,
                                        const std::vector<std::string>& methods,
                                        const PipelineConfig& config,
                                        EmbeddingBackend* backend = nullptr,
                                        EmbeddingCache* cache = nullptr,
                                        const AnalyticsOptions& options = {});

/// Per pair and method: threshold sweep over {0.3..0.9}, best F1 recorded;
/// F1 gains against the tfidf baseline plus mean ranks across pairs.
BenchmarkReport run_join_benchmark(const std::vector<JoinBenchPair>& pairs,
                                   const std::vector<std::string>& methods,
                                   const PipelineConfig& config,
                                   EmbeddingBackend* backend = nullptr,
                                   EmbeddingCache* cache = nullptr);

/// One dataset, one method: subsample, balance, cross-validate.
EvalReport analyze_dataset(const AnalyticsDataset& dataset, const std::string& method,
                           int train_size, const PipelineConfig& config,
                           EmbeddingBackend* backend = nullptr,
                           EmbeddingCache* cache = nullptr);

} // namespace stringvec
