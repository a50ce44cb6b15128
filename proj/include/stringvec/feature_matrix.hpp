#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <string>
#include <vector>

namespace stringvec {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Dense feature block with provenance column names.
struct FeatureMatrix {
    Matrix values;
    std::vector<std::string> col_names;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
};

/// Sparse feature block (TF-IDF output).
struct SparseFeatures {
    SparseRowMatrix values;
    std::vector<std::string> col_names;

    FeatureMatrix to_dense() const { return {Matrix(values), col_names}; }
};

/// Concatenates blocks horizontally; all blocks must share a row count.
FeatureMatrix hcat(std::vector<FeatureMatrix> blocks);

/// Prefixes every column name, "prefix:name".
FeatureMatrix prefixed(FeatureMatrix m, const std::string& prefix);

/// Throws std::invalid_argument when any entry is NaN or infinite.
void check_finite(const FeatureMatrix& m);

/// Row-wise L2 normalization; zero rows stay zero.
template <typename Derived>
Matrix l2_normalize_rows(const Eigen::MatrixBase<Derived>& x) {
    Matrix out = x;
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        double norm = out.row(i).norm();
        if (norm > 0.0) out.row(i) /= norm;
    }
    return out;
}

SparseRowMatrix l2_normalize_rows(const SparseRowMatrix& x);

} // namespace stringvec
