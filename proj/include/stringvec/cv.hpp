#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace stringvec {

struct EvalReport {
    std::string method;
    int train_size = 0;
    std::vector<double> fold_aucs;
    double mean = 0.0;
    double stderr_ = 0.0;  // sample standard deviation / sqrt(folds)
};

nlohmann::json eval_report_to_json(const EvalReport& report);

/// Seed-shuffled stratified fold ids, one per row.
std::vector<int> stratified_folds(const std::vector<int>& labels, int folds, std::uint64_t seed);

/// Greedy size-balanced assignment of whole groups to folds: every group's
/// rows land in exactly one fold. Requires at least `folds` distinct groups.
std::vector<int> grouped_split(const std::vector<std::string>& group_keys, int folds);

/// Fits on the train rows and returns scores for the test rows. All stateful
/// fitting must happen inside the callback on the train rows only.
using FoldScorer =
    std::function<std::vector<double>(const std::vector<int>& train_rows,
                                      const std::vector<int>& test_rows)>;

/// Per-fold ROC-AUC over a stratified (or grouped) split; every row is tested
/// exactly once. Throws when a fold ends up single-class.
EvalReport cross_validate(const std::vector<int>& labels, const FoldScorer& scorer,
                          int folds = 7, std::uint64_t seed = 0,
                          const std::vector<std::string>* group_keys = nullptr,
                          std::string method_name = {});

} // namespace stringvec
