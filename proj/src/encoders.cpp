#include "stringvec/encoders.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "stringvec/hash.hpp"
#include "stringvec/ngram.hpp"
#include "stringvec/table.hpp"

namespace stringvec {

namespace {

constexpr double kInvHashRange = 0x1.0p-64;  // maps a 64-bit hash into [0,1)

std::vector<std::string> indexed_names(const char* stem, int k) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) names.push_back(std::string(stem) + std::to_string(j));
    return names;
}

} // namespace

FeatureMatrix minhash_encode(const std::vector<std::string>& values, const MinHashParams& params) {
    if (params.dim < 1) throw std::invalid_argument("minhash_encode: dim must be >= 1");
    const int k = params.dim;
    FeatureMatrix out;
    out.values.setOnes(static_cast<Eigen::Index>(values.size()), k);
    out.col_names = indexed_names("mh", k);

    std::vector<std::uint64_t> mins(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < values.size(); ++i) {
        auto grams = char_ngrams(values[i], params.n_min, params.n_max);
        if (grams.empty()) continue;  // sentinel row of ones
        std::fill(mins.begin(), mins.end(), std::numeric_limits<std::uint64_t>::max());
        for (const auto& g : grams) {
            for (int j = 0; j < k; ++j) {
                std::uint64_t h = murmur64(g, params.seed + static_cast<std::uint64_t>(j));
                if (h < mins[static_cast<std::size_t>(j)]) mins[static_cast<std::size_t>(j)] = h;
            }
        }
        for (int j = 0; j < k; ++j)
            out.values(static_cast<Eigen::Index>(i), j) =
                static_cast<double>(mins[static_cast<std::size_t>(j)]) * kInvHashRange;
    }
    return out;
}

// ---------------------------------------------------------------------------
// TF-IDF
// ---------------------------------------------------------------------------

namespace {

constexpr std::uint64_t kBucketSeed = 0x7f4a7c15u;

std::int64_t term_bucket(const std::string& term, std::int64_t cap) {
    return static_cast<std::int64_t>(murmur64(term, kBucketSeed) % static_cast<std::uint64_t>(cap));
}

} // namespace

std::vector<std::string> TfidfModel::column_names() const {
    if (!hashed) return terms;
    std::vector<std::string> names;
    names.reserve(buckets.size());
    for (auto b : buckets) names.push_back("bucket" + std::to_string(b));
    return names;
}

TfidfModel tfidf_fit(const std::vector<std::string>& values, int n_min, int n_max,
                     std::int64_t hash_cap) {
    if (hash_cap < 1) throw std::invalid_argument("tfidf_fit: hash_cap must be >= 1");
    bool any_non_empty = std::any_of(values.begin(), values.end(),
                                     [](const std::string& s) { return !s.empty(); });
    if (values.empty() || !any_non_empty)
        throw std::invalid_argument("tfidf_fit: corpus has no non-empty strings");

    TfidfModel model;
    model.n_min = n_min;
    model.n_max = n_max;
    model.hash_cap = hash_cap;

    std::unordered_map<std::string, std::int64_t> df;
    for (const auto& v : values) {
        for (auto& g : char_ngrams(v, n_min, n_max)) ++df[std::move(g)];
    }
    const auto n_docs = static_cast<std::int64_t>(values.size());

    if (static_cast<std::int64_t>(df.size()) <= hash_cap) {
        model.terms.reserve(df.size());
        for (const auto& [term, _] : df) model.terms.push_back(term);
        std::sort(model.terms.begin(), model.terms.end());
        model.idf.resize(static_cast<Eigen::Index>(model.terms.size()));
        for (std::size_t i = 0; i < model.terms.size(); ++i) {
            model.term_index.emplace(model.terms[i], static_cast<int>(i));
            model.idf[static_cast<Eigen::Index>(i)] =
                std::log(static_cast<double>(1 + n_docs) /
                         static_cast<double>(1 + df[model.terms[i]])) + 1.0;
        }
        return model;
    }

    // Deterministic bucketing once the vocabulary exceeds the cap. Document
    // frequency is recounted per bucket (a document may hit a bucket through
    // several colliding terms).
    model.hashed = true;
    std::unordered_map<std::int64_t, std::int64_t> bucket_df;
    std::unordered_map<std::int64_t, bool> seen_in_doc;
    for (const auto& v : values) {
        seen_in_doc.clear();
        for (auto& g : char_ngrams(v, n_min, n_max)) {
            std::int64_t b = term_bucket(g, hash_cap);
            if (!seen_in_doc[b]) {
                seen_in_doc[b] = true;
                ++bucket_df[b];
            }
        }
    }
    model.buckets.reserve(bucket_df.size());
    for (const auto& [b, _] : bucket_df) model.buckets.push_back(b);
    std::sort(model.buckets.begin(), model.buckets.end());
    model.idf.resize(static_cast<Eigen::Index>(model.buckets.size()));
    for (std::size_t i = 0; i < model.buckets.size(); ++i) {
        model.bucket_index.emplace(model.buckets[i], static_cast<int>(i));
        model.idf[static_cast<Eigen::Index>(i)] =
            std::log(static_cast<double>(1 + n_docs) /
                     static_cast<double>(1 + bucket_df[model.buckets[i]])) + 1.0;
    }
    return model;
}

SparseFeatures tfidf_transform(const TfidfModel& model, const std::vector<std::string>& values) {
    SparseFeatures out;
    out.col_names = model.column_names();
    out.values.resize(static_cast<Eigen::Index>(values.size()), model.dim());

    std::vector<Eigen::Triplet<double>> triplets;
    std::vector<std::pair<int, double>> row;
    for (std::size_t i = 0; i < values.size(); ++i) {
        row.clear();
        for (const auto& [term, count] : char_ngram_counts(values[i], model.n_min, model.n_max)) {
            int col = -1;
            if (!model.hashed) {
                auto it = model.term_index.find(term);
                if (it != model.term_index.end()) col = it->second;
            } else {
                auto it = model.bucket_index.find(term_bucket(term, model.hash_cap));
                if (it != model.bucket_index.end()) col = it->second;
            }
            if (col >= 0) row.emplace_back(col, count * model.idf[col]);
        }
        if (row.empty()) continue;
        // Hashed mode can route two terms of one row into the same bucket.
        std::sort(row.begin(), row.end());
        std::vector<std::pair<int, double>> merged;
        for (const auto& [col, v] : row) {
            if (!merged.empty() && merged.back().first == col) merged.back().second += v;
            else merged.emplace_back(col, v);
        }
        double norm = 0.0;
        for (const auto& [_, v] : merged) norm += v * v;
        norm = std::sqrt(norm);
        for (const auto& [col, v] : merged)
            triplets.emplace_back(static_cast<int>(i), col, v / norm);
    }
    out.values.setFromTriplets(triplets.begin(), triplets.end());
    return out;
}

std::pair<TfidfModel, SparseFeatures> tfidf_fit_transform(const std::vector<std::string>& values,
                                                          int n_min, int n_max,
                                                          std::int64_t hash_cap) {
    TfidfModel model = tfidf_fit(values, n_min, n_max, hash_cap);
    SparseFeatures feats = tfidf_transform(model, values);
    return {std::move(model), std::move(feats)};
}

// ---------------------------------------------------------------------------
// One-hot
// ---------------------------------------------------------------------------

OneHotEncoder OneHotEncoder::fit(const std::vector<std::string>& train_values) {
    OneHotEncoder enc;
    for (const auto& v : train_values) {
        if (enc.index.emplace(v, static_cast<int>(enc.categories.size())).second)
            enc.categories.push_back(v);
    }
    return enc;
}

FeatureMatrix OneHotEncoder::transform(const std::vector<std::string>& values) const {
    FeatureMatrix out;
    out.values.setZero(static_cast<Eigen::Index>(values.size()),
                       static_cast<Eigen::Index>(categories.size()));
    out.col_names.reserve(categories.size());
    for (const auto& c : categories) out.col_names.push_back("=" + c);
    for (std::size_t i = 0; i < values.size(); ++i) {
        auto it = index.find(values[i]);
        if (it != index.end()) out.values(static_cast<Eigen::Index>(i), it->second) = 1.0;
    }
    return out;
}

FeatureMatrix onehot_encode(const std::vector<std::string>& train_values,
                            const std::vector<std::string>& apply_values) {
    return OneHotEncoder::fit(train_values).transform(apply_values);
}

// ---------------------------------------------------------------------------
// Datetime
// ---------------------------------------------------------------------------

FeatureMatrix datetime_encode(const std::vector<std::string>& values) {
    FeatureMatrix out;
    out.values.resize(static_cast<Eigen::Index>(values.size()), 5);
    out.col_names = {"year", "month", "day", "weekday", "hour"};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < values.size(); ++i) {
        auto r = static_cast<Eigen::Index>(i);
        if (auto parts = parse_datetime(values[i])) {
            out.values(r, 0) = parts->year;
            out.values(r, 1) = parts->month;
            out.values(r, 2) = parts->day;
            out.values(r, 3) = parts->weekday;
            out.values(r, 4) = parts->hour;
        } else {
            out.values.row(r).setConstant(nan);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Imputation and scaling
// ---------------------------------------------------------------------------

MeanImputer MeanImputer::fit(const Matrix& train) {
    MeanImputer imp;
    imp.means.setZero(train.cols());
    for (Eigen::Index j = 0; j < train.cols(); ++j) {
        double sum = 0.0;
        Eigen::Index count = 0;
        for (Eigen::Index i = 0; i < train.rows(); ++i) {
            if (std::isfinite(train(i, j))) {
                sum += train(i, j);
                ++count;
            }
        }
        imp.means[j] = count > 0 ? sum / static_cast<double>(count) : 0.0;
    }
    return imp;
}

Matrix MeanImputer::transform(Matrix x) const {
    if (x.cols() != means.size()) throw std::invalid_argument("MeanImputer: width mismatch");
    for (Eigen::Index j = 0; j < x.cols(); ++j)
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            if (!std::isfinite(x(i, j))) x(i, j) = means[j];
    return x;
}

Scaler Scaler::fit(const Matrix& train) {
    Scaler s;
    const auto n = static_cast<double>(train.rows());
    s.mean = train.colwise().mean();
    s.stddev.resize(train.cols());
    for (Eigen::Index j = 0; j < train.cols(); ++j) {
        double var = (train.col(j).array() - s.mean[j]).square().sum() / n;
        s.stddev[j] = std::sqrt(var);
    }
    return s;
}

Matrix Scaler::transform(const Matrix& x) const {
    if (x.cols() != mean.size()) throw std::invalid_argument("Scaler: width mismatch");
    Matrix out(x.rows(), x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        if (stddev[j] > 0.0)
            out.col(j) = (x.col(j).array() - mean[j]) / stddev[j];
        else
            out.col(j).setZero();
    }
    return out;
}

FeatureMatrix standardize(const FeatureMatrix& train, const FeatureMatrix& apply) {
    if (train.cols() != apply.cols()) throw std::invalid_argument("standardize: width mismatch");
    Scaler s = Scaler::fit(train.values);
    return {s.transform(apply.values), apply.col_names};
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

using nlohmann::json;

namespace {

json vector_to_json(const Vector& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Vector vector_from_json(const json& arr) {
    Vector v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
    return v;
}

void check_envelope(const json& j, const char* kind) {
    if (j.at("schema_version").get<int>() != 1) throw std::runtime_error("unsupported schema_version");
    if (j.at("kind").get<std::string>() != kind)
        throw std::runtime_error(std::string("expected encoder kind ") + kind);
}

} // namespace

json encoder_to_json(const MinHashParams& p) {
    return {{"schema_version", 1}, {"kind", "minhash"}, {"dim", p.dim},
            {"n_min", p.n_min},    {"n_max", p.n_max},  {"seed", p.seed}};
}

MinHashParams minhash_from_json(const json& j) {
    check_envelope(j, "minhash");
    MinHashParams p;
    p.dim = j.at("dim").get<int>();
    p.n_min = j.at("n_min").get<int>();
    p.n_max = j.at("n_max").get<int>();
    p.seed = j.at("seed").get<std::uint64_t>();
    return p;
}

json encoder_to_json(const TfidfModel& m) {
    json j = {{"schema_version", 1}, {"kind", "tfidf"},      {"n_min", m.n_min},
              {"n_max", m.n_max},    {"hash_cap", m.hash_cap}, {"hashed", m.hashed},
              {"idf", vector_to_json(m.idf)}};
    if (m.hashed) j["buckets"] = m.buckets;
    else j["terms"] = m.terms;
    return j;
}

TfidfModel tfidf_from_json(const json& j) {
    check_envelope(j, "tfidf");
    TfidfModel m;
    m.n_min = j.at("n_min").get<int>();
    m.n_max = j.at("n_max").get<int>();
    m.hash_cap = j.at("hash_cap").get<std::int64_t>();
    m.hashed = j.at("hashed").get<bool>();
    m.idf = vector_from_json(j.at("idf"));
    if (m.hashed) {
        m.buckets = j.at("buckets").get<std::vector<std::int64_t>>();
        for (std::size_t i = 0; i < m.buckets.size(); ++i)
            m.bucket_index.emplace(m.buckets[i], static_cast<int>(i));
    } else {
        m.terms = j.at("terms").get<std::vector<std::string>>();
        for (std::size_t i = 0; i < m.terms.size(); ++i)
            m.term_index.emplace(m.terms[i], static_cast<int>(i));
    }
    return m;
}

json encoder_to_json(const OneHotEncoder& e) {
    return {{"schema_version", 1}, {"kind", "onehot"}, {"categories", e.categories}};
}

OneHotEncoder onehot_from_json(const json& j) {
    check_envelope(j, "onehot");
    OneHotEncoder e;
    e.categories = j.at("categories").get<std::vector<std::string>>();
    for (std::size_t i = 0; i < e.categories.size(); ++i)
        e.index.emplace(e.categories[i], static_cast<int>(i));
    return e;
}

json encoder_to_json(const Scaler& s) {
    return {{"schema_version", 1}, {"kind", "scaler"},
            {"mean", vector_to_json(s.mean)}, {"stddev", vector_to_json(s.stddev)}};
}

Scaler scaler_from_json(const json& j) {
    check_envelope(j, "scaler");
    Scaler s;
    s.mean = vector_from_json(j.at("mean"));
    s.stddev = vector_from_json(j.at("stddev"));
    return s;
}

} // namespace stringvec
