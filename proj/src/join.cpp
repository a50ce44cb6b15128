#include "stringvec/join.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stringvec {

const char* join_encoder_name(JoinEncoderKind k) noexcept {
    switch (k) {
        case JoinEncoderKind::Tfidf: return "tfidf";
        case JoinEncoderKind::MinHash: return "minhash";
        case JoinEncoderKind::Embedding: return "embedding";
    }
    return "unknown";
}

namespace {

const std::vector<std::string>& key_column(const Table& t, const std::string& key) {
    const Column* col = t.find(key);
    if (!col) throw std::invalid_argument("join: key column not found: " + key);
    return col->values;
}

// Nearest left row per right row, scanning in left-index order so exact ties
// keep the lowest index. Blocked products bound the similarity buffer.
std::vector<JoinMatch> nearest_neighbors(const Matrix& right, const Matrix& left) {
    const Eigen::Index n_right = right.rows();
    std::vector<JoinMatch> out(static_cast<std::size_t>(n_right));

    constexpr Eigen::Index kBlock = 256;
    for (Eigen::Index begin = 0; begin < n_right; begin += kBlock) {
        const Eigen::Index rows = std::min(kBlock, n_right - begin);
        Matrix sims = right.middleRows(begin, rows) * left.transpose();
        for (Eigen::Index i = 0; i < rows; ++i) {
            int best = 0;
            double best_sim = sims(i, 0);
            for (Eigen::Index j = 1; j < sims.cols(); ++j) {
                if (sims(i, j) > best_sim) {
                    best_sim = sims(i, j);
                    best = static_cast<int>(j);
                }
            }
            out[static_cast<std::size_t>(begin + i)] = {best, best_sim};
        }
    }
    return out;
}

std::vector<JoinMatch> compute_nearest(const Table& right, const Table& left,
                                       const JoinSpec& spec, EmbeddingBackend* backend,
                                       EmbeddingCache* cache) {
    if (left.n_rows == 0) throw std::invalid_argument("join: left table is empty");
    const auto& right_keys = key_column(right, spec.right_key);
    const auto& left_keys = key_column(left, spec.left_key);

    Matrix right_vecs, left_vecs;
    switch (spec.encoder) {
        case JoinEncoderKind::Tfidf: {
            std::vector<std::string> corpus = right_keys;
            corpus.insert(corpus.end(), left_keys.begin(), left_keys.end());
            TfidfModel model = tfidf_fit(corpus, spec.tfidf_range.first, spec.tfidf_range.second);
            // TF-IDF rows are already L2-normalized.
            right_vecs = Matrix(tfidf_transform(model, right_keys).values);
            left_vecs = Matrix(tfidf_transform(model, left_keys).values);
            break;
        }
        case JoinEncoderKind::MinHash: {
            right_vecs = l2_normalize_rows(minhash_encode(right_keys, spec.minhash).values);
            left_vecs = l2_normalize_rows(minhash_encode(left_keys, spec.minhash).values);
            break;
        }
        case JoinEncoderKind::Embedding: {
            std::unique_ptr<EmbeddingBackend> owned;
            if (!backend) {
                owned = make_backend(spec.backend);
                backend = owned.get();
            }
            std::vector<std::string> all = right_keys;
            all.insert(all.end(), left_keys.begin(), left_keys.end());
            FeatureMatrix vecs = embed_batch(all, *backend, cache);
            Matrix normalized = l2_normalize_rows(vecs.values);
            right_vecs = normalized.topRows(static_cast<Eigen::Index>(right_keys.size()));
            left_vecs = normalized.bottomRows(static_cast<Eigen::Index>(left_keys.size()));
            break;
        }
    }
    return nearest_neighbors(right_vecs, left_vecs);
}

JoinResult apply_threshold(const std::vector<JoinMatch>& nearest, double tau) {
    JoinResult result;
    result.matches.reserve(nearest.size());
    for (const auto& m : nearest) {
        if (m.similarity < tau) result.matches.push_back({kNoMatch, m.similarity});
        else {
            result.matches.push_back(m);
            ++result.predicted;
        }
    }
    return result;
}

} // namespace

JoinResult join(const Table& right, const Table& left, const JoinSpec& spec,
                EmbeddingBackend* backend, EmbeddingCache* cache) {
    if (spec.tau < 0.0 || spec.tau > 1.0)
        throw std::invalid_argument("join: tau must be in [0, 1]");
    return apply_threshold(compute_nearest(right, left, spec, backend, cache), spec.tau);
}

JoinMetrics evaluate_join(const JoinResult& result, const std::vector<int>& gold) {
    if (gold.size() != result.matches.size())
        throw std::invalid_argument("evaluate_join: gold must cover all right rows");

    JoinMetrics m;
    m.predicted = result.predicted;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (gold[i] != kNoMatch) ++m.gold_matches;
        if (result.matches[i].left != kNoMatch && result.matches[i].left == gold[i]) ++m.correct;
    }
    m.precision = m.predicted > 0 ? static_cast<double>(m.correct) / m.predicted : 0.0;
    m.recall = m.gold_matches > 0 ? static_cast<double>(m.correct) / m.gold_matches : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

std::vector<double> default_taus() { return {0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}; }

SweepResult sweep_thresholds(const Table& right, const Table& left, const JoinSpec& spec,
                             const std::vector<double>& taus, const std::vector<int>& gold,
                             EmbeddingBackend* backend, EmbeddingCache* cache) {
    if (taus.empty()) throw std::invalid_argument("sweep_thresholds: no thresholds");

    SweepResult sweep;
    sweep.nearest = compute_nearest(right, left, spec, backend, cache);

    bool first = true;
    for (double tau : taus) {
        JoinResult at_tau = apply_threshold(sweep.nearest, tau);
        ThresholdPoint point{tau, evaluate_join(at_tau, gold)};
        if (first || point.metrics.f1 > sweep.best_f1) {
            sweep.best_f1 = point.metrics.f1;
            sweep.best_tau = tau;
            first = false;
        }
        sweep.curve.push_back(point);
    }
    return sweep;
}

std::vector<int> load_gold_csv(const std::string& path, std::size_t n_right) {
    Table t = load_csv(path);
    if (t.columns.size() < 2) throw CsvError("gold file needs columns right_id,left_id");
    std::vector<int> gold(n_right, kNoMatch);
    std::vector<bool> seen(n_right, false);
    for (std::size_t r = 0; r < t.n_rows; ++r) {
        const std::string& rid_cell = t.columns[0].values[r];
        auto rid_num = parse_number(rid_cell);
        if (!rid_num) throw CsvError("gold file: bad right_id: " + rid_cell);
        auto rid = static_cast<std::size_t>(*rid_num);
        if (rid >= n_right) throw CsvError("gold file: right_id out of range: " + rid_cell);
        seen[rid] = true;
        const std::string& lid_cell = t.columns[1].values[r];
        if (lid_cell.empty()) continue;
        auto lid = parse_number(lid_cell);
        if (!lid) throw CsvError("gold file: bad left_id: " + lid_cell);
        gold[rid] = static_cast<int>(*lid);
    }
    for (std::size_t i = 0; i < n_right; ++i)
        if (!seen[i]) throw CsvError("gold file: missing right_id " + std::to_string(i));
    return gold;
}

} // namespace stringvec
