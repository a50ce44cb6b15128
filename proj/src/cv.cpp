#include "stringvec/cv.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "stringvec/hash.hpp"
#include "stringvec/metrics.hpp"

namespace stringvec {

nlohmann::json eval_report_to_json(const EvalReport& report) {
    return {{"method", report.method},
            {"train_size", report.train_size},
            {"fold_aucs", report.fold_aucs},
            {"mean", report.mean},
            {"stderr", report.stderr_}};
}

std::vector<int> stratified_folds(const std::vector<int>& labels, int folds, std::uint64_t seed) {
    if (folds < 2) throw std::invalid_argument("stratified_folds: need at least 2 folds");
    std::vector<int> fold_of(labels.size(), -1);
    for (int cls : {0, 1}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == cls) idx.push_back(i);
        SplitMix64 rng(mix_seed({seed, static_cast<std::uint64_t>(cls)}));
        for (std::size_t i = 0; i + 1 < idx.size(); ++i) {
            std::size_t j = i + static_cast<std::size_t>(rng.bounded(idx.size() - i));
            std::swap(idx[i], idx[j]);
        }
        for (std::size_t i = 0; i < idx.size(); ++i)
            fold_of[idx[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
    }
    return fold_of;
}

std::vector<int> grouped_split(const std::vector<std::string>& group_keys, int folds) {
    if (folds < 2) throw std::invalid_argument("grouped_split: need at least 2 folds");

    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < group_keys.size(); ++i) groups[group_keys[i]].push_back(i);
    if (static_cast<int>(groups.size()) < folds)
        throw std::invalid_argument("grouped_split: fewer distinct groups than folds");

    // Largest group first, to the currently smallest fold; key order breaks ties.
    std::vector<std::pair<const std::string*, const std::vector<std::size_t>*>> order;
    order.reserve(groups.size());
    for (const auto& [key, rows] : groups) order.emplace_back(&key, &rows);
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        return a.second->size() > b.second->size();
    });

    std::vector<std::size_t> fold_sizes(static_cast<std::size_t>(folds), 0);
    std::vector<int> fold_of(group_keys.size(), -1);
    for (const auto& [key, rows] : order) {
        int target = 0;
        for (int f = 1; f < folds; ++f)
            if (fold_sizes[static_cast<std::size_t>(f)] < fold_sizes[static_cast<std::size_t>(target)])
                target = f;
        fold_sizes[static_cast<std::size_t>(target)] += rows->size();
        for (std::size_t r : *rows) fold_of[r] = target;
    }
    return fold_of;
}

EvalReport cross_validate(const std::vector<int>& labels, const FoldScorer& scorer, int folds,
                          std::uint64_t seed, const std::vector<std::string>* group_keys,
                          std::string method_name) {
    if (labels.empty()) throw std::invalid_argument("cross_validate: empty dataset");
    if (group_keys && group_keys->size() != labels.size())
        throw std::invalid_argument("cross_validate: group keys length mismatch");

    std::vector<int> fold_of = group_keys ? grouped_split(*group_keys, folds)
                                          : stratified_folds(labels, folds, seed);

    EvalReport report;
    report.method = std::move(method_name);
    report.train_size = static_cast<int>(labels.size());

    for (int f = 0; f < folds; ++f) {
        std::vector<int> train_rows, test_rows;
        for (std::size_t i = 0; i < labels.size(); ++i)
            (fold_of[i] == f ? test_rows : train_rows).push_back(static_cast<int>(i));
        if (test_rows.empty())
            throw std::invalid_argument("cross_validate: empty fold " + std::to_string(f));

        std::vector<int> test_labels;
        test_labels.reserve(test_rows.size());
        for (int r : test_rows) test_labels.push_back(labels[static_cast<std::size_t>(r)]);
        bool has_pos = std::find(test_labels.begin(), test_labels.end(), 1) != test_labels.end();
        bool has_neg = std::find(test_labels.begin(), test_labels.end(), 0) != test_labels.end();
        if (!has_pos || !has_neg)
            throw std::invalid_argument("cross_validate: fold " + std::to_string(f) +
                                        " has a single class");

        std::vector<double> scores = scorer(train_rows, test_rows);
        if (scores.size() != test_rows.size())
            throw std::invalid_argument("cross_validate: scorer returned wrong count");
        report.fold_aucs.push_back(roc_auc(scores, test_labels));
    }

    const auto k = static_cast<double>(report.fold_aucs.size());
    report.mean = std::accumulate(report.fold_aucs.begin(), report.fold_aucs.end(), 0.0) / k;
    if (report.fold_aucs.size() > 1) {
        double ss = 0.0;
        for (double a : report.fold_aucs) ss += (a - report.mean) * (a - report.mean);
        report.stderr_ = std::sqrt(ss / (k - 1.0)) / std::sqrt(k);
    }
    return report;
}

} // namespace stringvec
