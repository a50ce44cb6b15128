#pragma once

#include <vector>

#include "stringvec/feature_matrix.hpp"

namespace stringvec {

/// Fractional ranks (1-based); tied values receive the average of their ranks.
std::vector<double> fractional_ranks(const std::vector<double>& values);

/// Probability that a random positive outranks a random negative; ties count
/// half. Throws when labels contain a single class.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

/// Per-method mean rank over a method x task score matrix. Rank 1 is the best
/// (highest) score per task, ties averaged. Missing (non-finite) entries are
/// an error.
Vector mean_rank(const Matrix& scores);

} // namespace stringvec
