#include "stringvec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace stringvec {

std::vector<double> fractional_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("roc_auc: scores and labels differ in length");
    std::size_t n_pos = 0, n_neg = 0;
    for (int y : labels) (y == 1 ? n_pos : n_neg) += 1;
    if (n_pos == 0 || n_neg == 0)
        throw std::invalid_argument("roc_auc: both classes must be present");
    for (double s : scores)
        if (!std::isfinite(s)) throw std::invalid_argument("roc_auc: non-finite score");

    auto ranks = fractional_ranks(scores);
    double rank_sum_pos = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == 1) rank_sum_pos += ranks[i];

    const double p = static_cast<double>(n_pos), q = static_cast<double>(n_neg);
    return (rank_sum_pos - p * (p + 1.0) / 2.0) / (p * q);
}

Vector mean_rank(const Matrix& scores) {
    const Eigen::Index n_methods = scores.rows(), n_tasks = scores.cols();
    if (n_methods == 0 || n_tasks == 0) throw std::invalid_argument("mean_rank: empty score matrix");
    if (!scores.allFinite()) throw std::invalid_argument("mean_rank: missing entries");

    Vector out = Vector::Zero(n_methods);
    std::vector<double> column(static_cast<std::size_t>(n_methods));
    for (Eigen::Index t = 0; t < n_tasks; ++t) {
        // Rank on negated scores so the best score gets rank 1.
        for (Eigen::Index m = 0; m < n_methods; ++m)
            column[static_cast<std::size_t>(m)] = -scores(m, t);
        auto ranks = fractional_ranks(column);
        for (Eigen::Index m = 0; m < n_methods; ++m)
            out[m] += ranks[static_cast<std::size_t>(m)];
    }
    return out / static_cast<double>(n_tasks);
}

} // namespace stringvec
