#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stringvec/feature_matrix.hpp"

namespace stringvec {

// ---------------------------------------------------------------------------
// MinHash
// ---------------------------------------------------------------------------

struct MinHashParams {
    int dim = 30;
    int n_min = 2;
    int n_max = 4;
    std::uint64_t seed = 0;
};

/// MinHash sketch over character n-gram sets. Component j of row i is the
/// minimum of a seeded 64-bit hash h_j over the n-grams of values[i], mapped
/// to [0,1]. Empty n-gram sets produce the sentinel 1.0 in every component.
/// The fraction of equal components between two rows estimates the Jaccard
/// similarity of their n-gram sets.
FeatureMatrix minhash_encode(const std::vector<std::string>& values, const MinHashParams& params);

// ---------------------------------------------------------------------------
// TF-IDF over character n-grams
// ---------------------------------------------------------------------------

struct TfidfModel {
    int n_min = 2;
    int n_max = 3;
    std::int64_t hash_cap = std::int64_t{1} << 20;
    bool hashed = false;  // set when distinct terms exceeded hash_cap at fit

    std::vector<std::string> terms;                    // sorted; plain mode
    std::vector<std::int64_t> buckets;                 // sorted occupied buckets; hashed mode
    std::unordered_map<std::string, int> term_index;   // term -> column
    std::unordered_map<std::int64_t, int> bucket_index;
    Vector idf;

    int dim() const { return static_cast<int>(idf.size()); }
    std::vector<std::string> column_names() const;
};

/// Fits vocabulary and smoothed idf: idf(t) = ln((1+N)/(1+df(t))) + 1.
/// Corpora whose distinct n-gram count exceeds hash_cap fall back to
/// deterministic hash bucketing.
TfidfModel tfidf_fit(const std::vector<std::string>& values, int n_min = 2, int n_max = 3,
                     std::int64_t hash_cap = std::int64_t{1} << 20);

/// Rows are tf * idf, L2-normalized. Unseen terms are dropped; all-empty
/// rows come out as zero rows.
SparseFeatures tfidf_transform(const TfidfModel& model, const std::vector<std::string>& values);

std::pair<TfidfModel, SparseFeatures> tfidf_fit_transform(const std::vector<std::string>& values,
                                                          int n_min = 2, int n_max = 3,
                                                          std::int64_t hash_cap = std::int64_t{1} << 20);

// ---------------------------------------------------------------------------
// One-hot
// ---------------------------------------------------------------------------

struct OneHotEncoder {
    std::vector<std::string> categories;  // first-appearance order in train
    std::unordered_map<std::string, int> index;

    static OneHotEncoder fit(const std::vector<std::string>& train_values);
    /// Unseen values map to all-zero rows.
    FeatureMatrix transform(const std::vector<std::string>& values) const;
};

FeatureMatrix onehot_encode(const std::vector<std::string>& train_values,
                            const std::vector<std::string>& apply_values);

// ---------------------------------------------------------------------------
// Datetime expansion
// ---------------------------------------------------------------------------

/// Expands timestamps to [year, month, day, weekday, hour]; weekday 0 =
/// Monday, hour 0 for date-only cells. Unparseable cells become NaN rows for
/// downstream imputation.
FeatureMatrix datetime_encode(const std::vector<std::string>& values);

// ---------------------------------------------------------------------------
// Imputation and scaling
// ---------------------------------------------------------------------------

struct MeanImputer {
    Vector means;

    static MeanImputer fit(const Matrix& train);
    Matrix transform(Matrix x) const;
};

struct Scaler {
    Vector mean;
    Vector stddev;  // population standard deviation

    static Scaler fit(const Matrix& train);
    /// Zero-variance columns map to all zeros.
    Matrix transform(const Matrix& x) const;
};

FeatureMatrix standardize(const FeatureMatrix& train, const FeatureMatrix& apply);

// ---------------------------------------------------------------------------
// Serialization (versioned JSON envelopes)
// ---------------------------------------------------------------------------

nlohmann::json encoder_to_json(const MinHashParams& p);
nlohmann::json encoder_to_json(const TfidfModel& m);
nlohmann::json encoder_to_json(const OneHotEncoder& e);
nlohmann::json encoder_to_json(const Scaler& s);

MinHashParams minhash_from_json(const nlohmann::json& j);
TfidfModel tfidf_from_json(const nlohmann::json& j);
OneHotEncoder onehot_from_json(const nlohmann::json& j);
Scaler scaler_from_json(const nlohmann::json& j);

} // namespace stringvec
