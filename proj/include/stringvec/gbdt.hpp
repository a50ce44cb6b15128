#pragma once

#include <cstdint>
#include <vector>

#include "stringvec/feature_matrix.hpp"

namespace stringvec {

struct GbdtParams {
    int n_trees = 100;
    double learning_rate = 0.1;
    int max_depth = 3;
    int min_samples_leaf = 1;
    double subsample = 1.0;
    std::uint64_t seed = 0;
};

struct TreeNode {
    int feature = -1;       // -1 marks a leaf
    double threshold = 0.0; // go left when x <= threshold
    int left = -1;
    int right = -1;
    double value = 0.0;     // leaf contribution (pre learning-rate)
};

struct RegressionTree {
    std::vector<TreeNode> nodes;

    double predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
};

/// Stagewise logistic-loss boosting: the initial score is the log-odds of
/// the base rate, each stage fits a depth-bounded regression tree to the
/// residuals y - p with one Newton step per leaf, scaled by learning_rate.
struct GbdtModel {
    double initial_log_odds = 0.0;
    std::vector<RegressionTree> trees;
    int n_features = 0;
    bool single_class_warning = false;
    std::vector<double> stage_losses;  // train log-loss, entry 0 before any tree
};

GbdtModel gbdt_fit(const Matrix& x, const std::vector<int>& y, const GbdtParams& params = {});

Vector gbdt_predict_margin(const GbdtModel& model, const Matrix& x);
Vector gbdt_predict_proba(const GbdtModel& model, const Matrix& x);

} // namespace stringvec
