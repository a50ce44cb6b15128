#pragma once

#include <string>
#include <vector>

#include "stringvec/embedding.hpp"
#include "stringvec/encoders.hpp"
#include "stringvec/feature_matrix.hpp"
#include "stringvec/table.hpp"

namespace stringvec {

enum class JoinEncoderKind { Tfidf, MinHash, Embedding };

const char* join_encoder_name(JoinEncoderKind k) noexcept;

/// Many-to-one fuzzy join: each right row maps to its nearest left row by
/// cosine similarity on L2-normalized vectors, or to no-match below tau.
struct JoinSpec {
    std::string left_key;
    std::string right_key;
    JoinEncoderKind encoder = JoinEncoderKind::Tfidf;
    double tau = 0.5;  // minimum cosine similarity, in [0, 1]
    std::pair<int, int> tfidf_range{2, 3};
    MinHashParams minhash{};
    BackendConfig backend{};
};

inline constexpr int kNoMatch = -1;

struct JoinMatch {
    int left = kNoMatch;
    double similarity = 0.0;  // best cosine even when rejected by tau
};

struct JoinResult {
    std::vector<JoinMatch> matches;  // one per right row
    int predicted = 0;               // rows matched (left != kNoMatch)
};

struct JoinMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    int predicted = 0;
    int correct = 0;
    int gold_matches = 0;
};

struct ThresholdPoint {
    double tau = 0.0;
    JoinMetrics metrics;
};

struct SweepResult {
    std::vector<ThresholdPoint> curve;
    double best_tau = 0.0;
    double best_f1 = 0.0;
    std::vector<JoinMatch> nearest;  // tau-free 1-NN assignment
};

/// TF-IDF and MinHash encoders are fitted on the union of both key columns;
/// embeddings come from the backend. Ties in similarity break to the lowest
/// left index.
JoinResult join(const Table& right, const Table& left, const JoinSpec& spec,
                EmbeddingBackend* backend = nullptr, EmbeddingCache* cache = nullptr);

/// gold[i] is the expected left index for right row i, kNoMatch for nulls.
JoinMetrics evaluate_join(const JoinResult& result, const std::vector<int>& gold);

std::vector<double> default_taus();

/// Encodes once and applies every threshold to the cached similarities.
SweepResult sweep_thresholds(const Table& right, const Table& left, const JoinSpec& spec,
                             const std::vector<double>& taus, const std::vector<int>& gold,
                             EmbeddingBackend* backend = nullptr, EmbeddingCache* cache = nullptr);

/// Parses a gold CSV with columns right_id,left_id; an empty left_id means
/// no-match. Ids are 0-based row indices.
std::vector<int> load_gold_csv(const std::string& path, std::size_t n_right);

} // namespace stringvec
