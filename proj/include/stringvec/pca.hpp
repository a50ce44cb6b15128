#pragma once

#include <json.hpp>

#include "stringvec/feature_matrix.hpp"

namespace stringvec {

/// Principal component analysis fitted on training data only.
/// components rows are orthonormal principal axes; explained_variance is the
/// per-component sample variance (non-increasing).
struct PcaModel {
    Vector mean;
    Matrix components;           // k x d
    Vector explained_variance;   // length k

    int k() const { return static_cast<int>(components.rows()); }
    int input_dim() const { return static_cast<int>(components.cols()); }
};

/// Thin SVD of the centered matrix; k is clamped to min(k, n-1, d). The sign
/// convention makes the largest-magnitude loading of each component positive,
/// so fits are deterministic across runs and row permutations.
PcaModel pca_fit(const Eigen::Ref<const Matrix>& x, int k = 30);

/// Wide/sparse inputs (d >> n): same factorization through the centered Gram
/// matrix, avoiding the dense d x d covariance. k is additionally clamped to
/// the numerical rank.
PcaModel pca_fit(const SparseRowMatrix& x, int k = 30);

Matrix pca_transform(const PcaModel& model, const Eigen::Ref<const Matrix>& x);
Matrix pca_transform(const PcaModel& model, const SparseRowMatrix& x);

nlohmann::json pca_to_json(const PcaModel& model);
PcaModel pca_from_json(const nlohmann::json& j);

} // namespace stringvec
