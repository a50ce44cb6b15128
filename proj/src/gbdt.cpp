#include "stringvec/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "stringvec/hash.hpp"

namespace stringvec {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double mean_log_loss(const std::vector<int>& y, const Vector& margin) {
    double loss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        double z = margin[static_cast<Eigen::Index>(i)];
        // log(1 + e^z) - y z, computed stably.
        double softplus = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
        loss += softplus - (y[i] == 1 ? z : 0.0);
    }
    return loss / static_cast<double>(y.size());
}

// Exact greedy splitter over presorted feature orders. Node row sets are kept
// sorted per feature, partitioned on each split, so every candidate scan is
// linear. Ties in gain resolve to the lowest feature index, then the lowest
// threshold (first best wins).
class TreeBuilder {
public:
    TreeBuilder(const Matrix& x, const Vector& gradient, const Vector& hessian,
                int max_depth, int min_samples_leaf)
        : x_(x), gradient_(gradient), hessian_(hessian),
          max_depth_(max_depth), min_leaf_(min_samples_leaf) {}

    RegressionTree build(const std::vector<std::vector<int>>& root_sorted) {
        RegressionTree tree;
        grow(tree, root_sorted, 0);
        return tree;
    }

    // Leaf assignment for the training rows, filled during build.
    const std::vector<std::pair<const std::vector<int>*, double>>& leaf_rows() const {
        return leaf_rows_;
    }

private:
    struct Split {
        int feature = -1;
        double threshold = 0.0;
        double gain = 0.0;
    };

    int grow(RegressionTree& tree, const std::vector<std::vector<int>>& sorted, int depth) {
        const auto& rows = sorted[0];
        const auto n = static_cast<int>(rows.size());

        Split best;
        if (depth < max_depth_ && n >= 2 * min_leaf_) best = find_split(sorted);

        const int node_id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();

        if (best.feature < 0) {
            double sum_g = 0.0, sum_h = 0.0;
            for (int r : rows) {
                sum_g += gradient_[r];
                sum_h += hessian_[r];
            }
            tree.nodes[node_id].value = sum_g / std::max(sum_h, 1e-12);
            owned_leaves_.push_back(std::make_unique<std::vector<int>>(rows));
            leaf_rows_.emplace_back(owned_leaves_.back().get(), tree.nodes[node_id].value);
            return node_id;
        }

        tree.nodes[node_id].feature = best.feature;
        tree.nodes[node_id].threshold = best.threshold;

        const std::size_t n_features = sorted.size();
        std::vector<std::vector<int>> left_sorted(n_features), right_sorted(n_features);
        for (std::size_t f = 0; f < n_features; ++f) {
            left_sorted[f].reserve(rows.size());
            right_sorted[f].reserve(rows.size());
            for (int r : sorted[f]) {
                if (x_(r, best.feature) <= best.threshold) left_sorted[f].push_back(r);
                else right_sorted[f].push_back(r);
            }
        }

        int left_id = grow(tree, left_sorted, depth + 1);
        int right_id = grow(tree, right_sorted, depth + 1);
        tree.nodes[node_id].left = left_id;
        tree.nodes[node_id].right = right_id;
        return node_id;
    }

    Split find_split(const std::vector<std::vector<int>>& sorted) const {
        Split best;
        const auto n = static_cast<int>(sorted[0].size());

        double total_g = 0.0;
        for (int r : sorted[0]) total_g += gradient_[r];
        const double parent_score = total_g * total_g / static_cast<double>(n);

        for (std::size_t f = 0; f < sorted.size(); ++f) {
            const auto& order = sorted[f];
            double left_g = 0.0;
            for (int i = 0; i + 1 < n; ++i) {
                left_g += gradient_[order[static_cast<std::size_t>(i)]];
                const double v = x_(order[static_cast<std::size_t>(i)], static_cast<int>(f));
                const double v_next = x_(order[static_cast<std::size_t>(i + 1)], static_cast<int>(f));
                if (v == v_next) continue;
                const int n_left = i + 1, n_right = n - n_left;
                if (n_left < min_leaf_ || n_right < min_leaf_) continue;
                const double right_g = total_g - left_g;
                // Variance reduction of residuals, parent term subtracted.
                const double gain = left_g * left_g / n_left + right_g * right_g / n_right -
                                    parent_score;
                if (gain > best.gain + 1e-12) {
                    best.feature = static_cast<int>(f);
                    best.threshold = 0.5 * (v + v_next);
                    best.gain = gain;
                }
            }
        }
        return best;
    }

    const Matrix& x_;
    const Vector& gradient_;
    const Vector& hessian_;
    int max_depth_;
    int min_leaf_;
    std::vector<std::unique_ptr<std::vector<int>>> owned_leaves_;
    std::vector<std::pair<const std::vector<int>*, double>> leaf_rows_;
};

} // namespace

double RegressionTree::predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
    int at = 0;
    while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
        const TreeNode& node = nodes[static_cast<std::size_t>(at)];
        at = row[node.feature] <= node.threshold ? node.left : node.right;
    }
    return nodes[static_cast<std::size_t>(at)].value;
}

GbdtModel gbdt_fit(const Matrix& x, const std::vector<int>& y, const GbdtParams& params) {
    if (static_cast<std::size_t>(x.rows()) != y.size())
        throw std::invalid_argument("gbdt_fit: row count mismatch");
    if (x.rows() == 0) throw std::invalid_argument("gbdt_fit: empty input");
    if (!x.allFinite()) throw std::invalid_argument("gbdt_fit: non-finite features");
    if (params.n_trees < 1) throw std::invalid_argument("gbdt_fit: n_trees must be >= 1");
    if (params.learning_rate <= 0.0 || params.learning_rate > 1.0)
        throw std::invalid_argument("gbdt_fit: learning_rate must be in (0, 1]");
    for (int v : y)
        if (v != 0 && v != 1) throw std::invalid_argument("gbdt_fit: labels must be 0/1");

    const auto n = static_cast<int>(x.rows());
    const auto d = static_cast<int>(x.cols());

    GbdtModel model;
    model.n_features = d;

    double base_rate = 0.0;
    for (int v : y) base_rate += v;
    base_rate /= static_cast<double>(n);
    const double clamped = std::clamp(base_rate, 1e-12, 1.0 - 1e-12);
    model.initial_log_odds = std::log(clamped / (1.0 - clamped));

    Vector margin = Vector::Constant(n, model.initial_log_odds);
    model.stage_losses.push_back(mean_log_loss(y, margin));

    if (base_rate == 0.0 || base_rate == 1.0) {
        model.single_class_warning = true;
        return model;
    }

    // Feature orders are sorted once; trees partition them per node.
    std::vector<std::vector<int>> presorted(static_cast<std::size_t>(d));
    for (int f = 0; f < d; ++f) {
        auto& order = presorted[static_cast<std::size_t>(f)];
        order.resize(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return x(a, f) < x(b, f); });
    }

    SplitMix64 rng(params.seed);
    Vector gradient(n), hessian(n);

    for (int stage = 0; stage < params.n_trees; ++stage) {
        for (int i = 0; i < n; ++i) {
            const double p = sigmoid(margin[i]);
            gradient[i] = static_cast<double>(y[static_cast<std::size_t>(i)]) - p;
            hessian[i] = p * (1.0 - p);
        }

        std::vector<std::vector<int>> stage_sorted;
        const std::vector<std::vector<int>>* sorted = &presorted;
        if (params.subsample < 1.0) {
            const int keep = std::max(1, static_cast<int>(params.subsample * n));
            std::vector<char> picked(static_cast<std::size_t>(n), 0);
            std::vector<int> pool(static_cast<std::size_t>(n));
            std::iota(pool.begin(), pool.end(), 0);
            for (int i = 0; i < keep; ++i) {
                auto j = static_cast<std::size_t>(i) +
                         static_cast<std::size_t>(rng.bounded(static_cast<std::uint64_t>(n - i)));
                std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
                picked[static_cast<std::size_t>(pool[static_cast<std::size_t>(i)])] = 1;
            }
            stage_sorted.resize(static_cast<std::size_t>(d));
            for (int f = 0; f < d; ++f) {
                auto& dst = stage_sorted[static_cast<std::size_t>(f)];
                dst.reserve(static_cast<std::size_t>(keep));
                for (int r : presorted[static_cast<std::size_t>(f)])
                    if (picked[static_cast<std::size_t>(r)]) dst.push_back(r);
            }
            sorted = &stage_sorted;
        }

        TreeBuilder builder(x, gradient, hessian, params.max_depth, params.min_samples_leaf);
        RegressionTree tree = builder.build(*sorted);

        // Stored leaf values carry the learning rate so prediction is a plain
        // sum over trees.
        for (auto& node : tree.nodes)
            if (node.feature < 0) node.value *= params.learning_rate;

        if (params.subsample >= 1.0) {
            // In-sample rows get their leaf value directly.
            for (const auto& [rows, value] : builder.leaf_rows())
                for (int r : *rows) margin[r] += params.learning_rate * value;
        } else {
            for (int i = 0; i < n; ++i) margin[i] += tree.predict_row(x.row(i));
        }

        model.trees.push_back(std::move(tree));
        model.stage_losses.push_back(mean_log_loss(y, margin));
    }
    return model;
}

Vector gbdt_predict_margin(const GbdtModel& model, const Matrix& x) {
    if (static_cast<int>(x.cols()) != model.n_features)
        throw std::invalid_argument("gbdt_predict: width mismatch with training data");
    Vector margin = Vector::Constant(x.rows(), model.initial_log_odds);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        double acc = 0.0;
        for (const auto& tree : model.trees) acc += tree.predict_row(x.row(i));
        margin[i] += acc;
    }
    return margin;
}

Vector gbdt_predict_proba(const GbdtModel& model, const Matrix& x) {
    Vector margin = gbdt_predict_margin(model, x);
    for (Eigen::Index i = 0; i < margin.size(); ++i) margin[i] = sigmoid(margin[i]);
    return margin;
}

} // namespace stringvec
