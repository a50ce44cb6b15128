#include "stringvec/feature_matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace stringvec {

FeatureMatrix hcat(std::vector<FeatureMatrix> blocks) {
    if (blocks.empty()) return {};
    Eigen::Index rows = blocks.front().rows();
    Eigen::Index cols = 0;
    for (const auto& b : blocks) {
        if (b.rows() != rows) throw std::invalid_argument("hcat: row count mismatch");
        cols += b.cols();
    }
    FeatureMatrix out;
    out.values.resize(rows, cols);
    out.col_names.reserve(static_cast<std::size_t>(cols));
    Eigen::Index at = 0;
    for (auto& b : blocks) {
        out.values.middleCols(at, b.cols()) = b.values;
        at += b.cols();
        for (auto& n : b.col_names) out.col_names.push_back(std::move(n));
    }
    return out;
}

FeatureMatrix prefixed(FeatureMatrix m, const std::string& prefix) {
    for (auto& n : m.col_names) n = prefix + ":" + n;
    return m;
}

void check_finite(const FeatureMatrix& m) {
    if (!m.values.allFinite()) throw std::invalid_argument("feature matrix contains non-finite values");
}

SparseRowMatrix l2_normalize_rows(const SparseRowMatrix& x) {
    SparseRowMatrix out = x;
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        double sq = 0.0;
        for (SparseRowMatrix::InnerIterator it(out, i); it; ++it) sq += it.value() * it.value();
        if (sq > 0.0) {
            double inv = 1.0 / std::sqrt(sq);
            for (SparseRowMatrix::InnerIterator it(out, i); it; ++it) it.valueRef() *= inv;
        }
    }
    return out;
}

} // namespace stringvec
