#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "stringvec/hash.hpp"
#include "stringvec/join.hpp"
#include "stringvec/ngram.hpp"

using namespace stringvec;

namespace {

Table one_column_table(const std::string& header, std::vector<std::string> values) {
    Table t;
    t.n_rows = values.size();
    t.columns.push_back({header, std::move(values)});
    return t;
}

std::string random_word(SplitMix64& rng, int len) {
    static const std::string alphabet = "abcdefghijklmnopqrstuvwxyz";
    std::string s;
    for (int i = 0; i < len; ++i)
        s.push_back(alphabet[static_cast<std::size_t>(rng.bounded(alphabet.size()))]);
    return s;
}

// Typo injection: substitute, delete or duplicate a couple of characters.
std::string perturb(SplitMix64& rng, const std::string& s) {
    std::string out = s;
    const int edits = 1 + static_cast<int>(rng.bounded(2));
    for (int e = 0; e < edits && !out.empty(); ++e) {
        auto pos = static_cast<std::size_t>(rng.bounded(out.size()));
        switch (rng.bounded(3)) {
            case 0: out[pos] = static_cast<char>('a' + rng.bounded(26)); break;
            case 1: out.erase(pos, 1); break;
            default: out.insert(pos, 1, out[pos]);
        }
    }
    if (out.size() < 2) out = s;
    return out;
}

// Exhaustive all-pairs nearest neighbor over explicit TF-IDF vectors: plain
// per-pair sparse dot products, no matrix algebra. The engine must agree.
std::vector<std::vector<std::pair<int, double>>> to_sparse_rows(const SparseRowMatrix& m) {
    std::vector<std::vector<std::pair<int, double>>> rows(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (SparseRowMatrix::InnerIterator it(m, i); it; ++it)
            rows[static_cast<std::size_t>(i)].emplace_back(static_cast<int>(it.col()), it.value());
    return rows;
}

double sparse_dot(const std::vector<std::pair<int, double>>& a,
                  const std::vector<std::pair<int, double>>& b) {
    double sum = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first < b[j].first) ++i;
        else if (a[i].first > b[j].first) ++j;
        else sum += a[i++].second * b[j++].second;
    }
    return sum;
}

std::vector<JoinMatch> brute_force_tfidf(const Table& right, const Table& left,
                                         const JoinSpec& spec) {
    std::vector<std::string> corpus = right.columns[0].values;
    corpus.insert(corpus.end(), left.columns[0].values.begin(), left.columns[0].values.end());
    TfidfModel model = tfidf_fit(corpus, spec.tfidf_range.first, spec.tfidf_range.second);
    auto r = to_sparse_rows(tfidf_transform(model, right.columns[0].values).values);
    auto l = to_sparse_rows(tfidf_transform(model, left.columns[0].values).values);

    std::vector<JoinMatch> out;
    for (const auto& row : r) {
        int best = 0;
        double best_sim = -1.0;
        for (std::size_t j = 0; j < l.size(); ++j) {
            double sim = sparse_dot(row, l[j]);
            if (sim > best_sim) {
                best_sim = sim;
                best = static_cast<int>(j);
            }
        }
        out.push_back({best, best_sim});
    }
    return out;
}

} // namespace

TEST_CASE("identical key columns join perfectly at high tau") {
    std::vector<std::string> keys{"alpha corp", "beta llc", "gamma inc", "delta gmbh"};
    Table left = one_column_table("name", keys);
    Table right = one_column_table("entity", keys);

    JoinSpec spec;
    spec.left_key = "name";
    spec.right_key = "entity";
    spec.tau = 0.9;
    JoinResult result = join(right, left, spec);
    REQUIRE(result.matches.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(result.matches[i].left == static_cast<int>(i));
        CHECK(result.matches[i].similarity == doctest::Approx(1.0));
    }
    std::vector<int> gold{0, 1, 2, 3};
    JoinMetrics m = evaluate_join(result, gold);
    CHECK(m.f1 == doctest::Approx(1.0));
}

TEST_CASE("below-threshold best similarity yields no-match") {
    Table left = one_column_table("k", {"aaaa bbbb cccc"});
    Table right = one_column_table("k", {"zzzz qqqq wwww"});
    JoinSpec spec;
    spec.left_key = spec.right_key = "k";
    spec.tau = 0.3;
    JoinResult result = join(right, left, spec);
    CHECK(result.matches[0].left == kNoMatch);
    CHECK(result.matches[0].similarity < 0.3);
    CHECK(result.predicted == 0);
}

TEST_CASE("evaluate_join hand case: 2 correct of 3 predicted, 4 gold") {
    JoinResult result;
    result.matches = {{0, 0.9}, {1, 0.9}, {5, 0.9}, {kNoMatch, 0.1}, {kNoMatch, 0.1}};
    result.predicted = 3;
    std::vector<int> gold{0, 1, 2, 3, kNoMatch};
    JoinMetrics m = evaluate_join(result, gold);
    CHECK(m.precision == doctest::Approx(2.0 / 3.0));
    CHECK(m.recall == doctest::Approx(0.5));
    CHECK(m.f1 == doctest::Approx(4.0 / 7.0));
}

TEST_CASE("evaluate_join zero-denominator conventions") {
    JoinResult all_null;
    all_null.matches = {{kNoMatch, 0.0}, {kNoMatch, 0.0}};
    all_null.predicted = 0;
    JoinMetrics m = evaluate_join(all_null, {0, 1});
    CHECK(m.precision == 0.0);
    CHECK(m.recall == 0.0);
    CHECK(m.f1 == 0.0);
}

TEST_CASE("engine matches the brute-force oracle on perturbed pairs") {
    SplitMix64 rng(1234);
    for (int trial = 0; trial < 20; ++trial) {
        const int n_left = 30 + static_cast<int>(rng.bounded(471));  // up to 500
        std::vector<std::string> left_keys;
        std::set<std::string> seen;
        while (left_keys.size() < static_cast<std::size_t>(n_left)) {
            std::string w = random_word(rng, 8 + static_cast<int>(rng.bounded(10)));
            if (seen.insert(w).second) left_keys.push_back(w);
        }
        std::vector<std::string> right_keys;
        const int n_right = n_left / 2;
        for (int i = 0; i < n_right; ++i)
            right_keys.push_back(perturb(rng, left_keys[static_cast<std::size_t>(
                                                  rng.bounded(left_keys.size()))]));

        Table left = one_column_table("k", left_keys);
        Table right = one_column_table("k", right_keys);
        JoinSpec spec;
        spec.left_key = spec.right_key = "k";
        spec.tau = 0.0;

        JoinResult engine = join(right, left, spec);
        auto oracle = brute_force_tfidf(right, left, spec);
        REQUIRE(engine.matches.size() == oracle.size());
        for (std::size_t i = 0; i < oracle.size(); ++i) {
            CHECK(engine.matches[i].left == oracle[i].left);
            CHECK(engine.matches[i].similarity ==
                  doctest::Approx(oracle[i].similarity).epsilon(1e-9));
        }
    }
}

TEST_CASE("join is invariant under right-row permutation") {
    SplitMix64 rng(77);
    std::vector<std::string> left_keys, right_keys;
    for (int i = 0; i < 40; ++i) left_keys.push_back(random_word(rng, 10));
    for (int i = 0; i < 25; ++i)
        right_keys.push_back(perturb(rng, left_keys[static_cast<std::size_t>(rng.bounded(40))]));

    Table left = one_column_table("k", left_keys);
    JoinSpec spec;
    spec.left_key = spec.right_key = "k";
    spec.tau = 0.2;

    JoinResult base = join(one_column_table("k", right_keys), left, spec);
    std::vector<std::string> reversed(right_keys.rbegin(), right_keys.rend());
    JoinResult rev = join(one_column_table("k", reversed), left, spec);
    for (std::size_t i = 0; i < right_keys.size(); ++i) {
        CHECK(base.matches[i].left == rev.matches[right_keys.size() - 1 - i].left);
        CHECK(base.matches[i].similarity == rev.matches[right_keys.size() - 1 - i].similarity);
    }
}

TEST_CASE("ties break to the lowest left index") {
    // Two identical left rows; the right row matches both exactly.
    Table left = one_column_table("k", {"zzz", "same name", "same name"});
    Table right = one_column_table("k", {"same name"});
    JoinSpec spec;
    spec.left_key = spec.right_key = "k";
    spec.tau = 0.5;
    JoinResult result = join(right, left, spec);
    CHECK(result.matches[0].left == 1);
}

TEST_CASE("threshold sweep: nesting, monotone recall, curve matches per-tau joins") {
    SplitMix64 rng(99);
    std::vector<std::string> left_keys;
    for (int i = 0; i < 60; ++i) left_keys.push_back(random_word(rng, 9));
    std::vector<std::string> right_keys;
    std::vector<int> gold;
    for (int i = 0; i < 40; ++i) {
        auto src = static_cast<std::size_t>(rng.bounded(60));
        if (rng.uniform01() < 0.7) {
            right_keys.push_back(perturb(rng, left_keys[src]));
            gold.push_back(static_cast<int>(src));
        } else {
            right_keys.push_back(random_word(rng, 9));  // no true match
            gold.push_back(kNoMatch);
        }
    }
    Table left = one_column_table("k", left_keys);
    Table right = one_column_table("k", right_keys);
    JoinSpec spec;
    spec.left_key = spec.right_key = "k";

    SweepResult sweep = sweep_thresholds(right, left, spec, default_taus(), gold);
    REQUIRE(sweep.curve.size() == 7);

    double last_recall = 1.0;
    int last_predicted = static_cast<int>(right.n_rows) + 1;
    std::set<std::pair<int, int>> last_set;
    bool first = true;
    for (const auto& point : sweep.curve) {
        CHECK(point.metrics.recall <= last_recall + 1e-12);
        CHECK(point.metrics.predicted <= last_predicted);
        last_recall = point.metrics.recall;
        last_predicted = point.metrics.predicted;

        // Re-run join at this tau as the oracle.
        JoinSpec at_tau = spec;
        at_tau.tau = point.tau;
        JoinResult direct = join(right, left, at_tau);
        JoinMetrics direct_metrics = evaluate_join(direct, gold);
        CHECK(direct_metrics.f1 == doctest::Approx(point.metrics.f1));
        CHECK(direct_metrics.precision == doctest::Approx(point.metrics.precision));

        // Predicted sets nest as tau grows.
        std::set<std::pair<int, int>> current;
        for (std::size_t i = 0; i < direct.matches.size(); ++i)
            if (direct.matches[i].left != kNoMatch)
                current.insert({static_cast<int>(i), direct.matches[i].left});
        if (!first) {
            for (const auto& match : current) CHECK(last_set.count(match) == 1);
        }
        last_set = std::move(current);
        first = false;
    }

    double best = 0.0;
    for (const auto& point : sweep.curve) best = std::max(best, point.metrics.f1);
    CHECK(sweep.best_f1 == doctest::Approx(best));
}

TEST_CASE("minhash and embedding encoders run the same contract") {
    std::vector<std::string> keys{"acme industries", "globex corp", "initech llc"};
    Table left = one_column_table("k", keys);
    Table right = one_column_table("k", {"acme industry", "globex corporation"});

    JoinSpec spec;
    spec.left_key = spec.right_key = "k";
    spec.tau = 0.1;
    spec.encoder = JoinEncoderKind::MinHash;
    JoinResult via_minhash = join(right, left, spec);
    CHECK(via_minhash.matches[0].left == 0);
    CHECK(via_minhash.matches[1].left == 1);

    spec.encoder = JoinEncoderKind::Embedding;
    MockBackend backend(32, 5);
    JoinResult via_embedding = join(right, left, spec, &backend);
    CHECK(via_embedding.matches[0].left == 0);
    CHECK(via_embedding.matches[1].left == 1);
}

TEST_CASE("empty key cells encode to empty strings and miss naturally") {
    Table left = one_column_table("k", {"something real"});
    Table right = one_column_table("k", {""});
    JoinSpec spec;
    spec.left_key = spec.right_key = "k";
    spec.tau = 0.3;
    JoinResult result = join(right, left, spec);
    CHECK(result.matches[0].left == kNoMatch);
}

TEST_CASE("many-to-one: several right rows may share a left row") {
    Table left = one_column_table("k", {"acme corp", "zzz"});
    Table right = one_column_table("k", {"acme corp.", "acme  corp", "acme corp inc"});
    JoinSpec spec;
    spec.left_key = spec.right_key = "k";
    spec.tau = 0.3;
    JoinResult result = join(right, left, spec);
    for (const auto& m : result.matches) CHECK(m.left == 0);
}
