#include "stringvec/pca.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stringvec {

namespace {

void apply_sign_convention(Matrix& components) {
    for (Eigen::Index i = 0; i < components.rows(); ++i) {
        Eigen::Index at = 0;
        components.row(i).cwiseAbs().maxCoeff(&at);
        if (components(i, at) < 0.0) components.row(i) = -components.row(i);
    }
}

int clamp_k(int k, Eigen::Index n, Eigen::Index d) {
    if (k < 1) throw std::invalid_argument("pca_fit: k must be >= 1");
    return static_cast<int>(std::min<Eigen::Index>({k, n - 1, d}));
}

} // namespace

PcaModel pca_fit(const Eigen::Ref<const Matrix>& x, int k) {
    if (x.rows() < 2) throw std::invalid_argument("pca_fit: need at least 2 rows");
    if (!x.allFinite()) throw std::invalid_argument("pca_fit: non-finite input");

    const Eigen::Index n = x.rows(), d = x.cols();
    const int kk = clamp_k(k, n, d);

    PcaModel model;
    model.mean = x.colwise().mean();
    Matrix centered = x.rowwise() - model.mean.transpose();

    Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinV);
    model.components = svd.matrixV().leftCols(kk).transpose();
    model.explained_variance =
        svd.singularValues().head(kk).array().square() / static_cast<double>(n - 1);
    apply_sign_convention(model.components);
    return model;
}

PcaModel pca_fit(const SparseRowMatrix& x, int k) {
    if (x.rows() < 2) throw std::invalid_argument("pca_fit: need at least 2 rows");
    const Eigen::Index n = x.rows(), d = x.cols();
    int kk = clamp_k(k, n, d);

    PcaModel model;
    Vector mean = Vector::Zero(d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (SparseRowMatrix::InnerIterator it(x, i); it; ++it) mean[it.col()] += it.value();
    mean /= static_cast<double>(n);
    model.mean = mean;

    // Centered Gram matrix without densifying the d-dimensional data:
    // G_c = X X^T - c 1^T - 1 c^T + (mu.mu) 1 1^T with c_i = x_i . mu.
    Eigen::SparseMatrix<double> xt = x.transpose();
    Eigen::SparseMatrix<double> gram_sparse = x * xt;
    Matrix gram = Matrix(gram_sparse);
    Vector c = x * mean;
    const double mu_sq = mean.squaredNorm();
    gram.noalias() -= c * Eigen::RowVectorXd::Ones(n);
    gram.noalias() -= Vector::Ones(n) * c.transpose();
    gram.array() += mu_sq;

    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    if (eig.info() != Eigen::Success) throw std::runtime_error("pca_fit: eigendecomposition failed");

    // Eigen returns ascending eigenvalues; take the top kk above numerical rank.
    const Vector& evals = eig.eigenvalues();
    const double tol = std::max(evals[n - 1], 0.0) * 1e-12;
    int rank = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (evals[i] > tol) ++rank;
    kk = std::min(kk, std::max(rank, 1));

    model.components.resize(kk, d);
    model.explained_variance.resize(kk);
    for (int i = 0; i < kk; ++i) {
        const Eigen::Index src = n - 1 - i;
        const double lambda = std::max(evals[src], 0.0);
        const double sigma = std::sqrt(lambda);
        Vector u = eig.eigenvectors().col(src);
        // v = (X^T u - mu (1^T u)) / sigma
        Vector v = Vector(x.transpose() * u) - mean * u.sum();
        if (sigma > 0.0) v /= sigma;
        model.components.row(i) = v.transpose();
        model.explained_variance[i] = lambda / static_cast<double>(n - 1);
    }
    apply_sign_convention(model.components);
    return model;
}

Matrix pca_transform(const PcaModel& model, const Eigen::Ref<const Matrix>& x) {
    if (x.cols() != model.mean.size())
        throw std::invalid_argument("pca_transform: width mismatch");
    return (x.rowwise() - model.mean.transpose()) * model.components.transpose();
}

Matrix pca_transform(const PcaModel& model, const SparseRowMatrix& x) {
    if (x.cols() != model.mean.size())
        throw std::invalid_argument("pca_transform: width mismatch");
    Matrix projected = x * model.components.transpose();
    projected.rowwise() -= (model.components * model.mean).transpose();
    return projected;
}

nlohmann::json pca_to_json(const PcaModel& model) {
    nlohmann::json mean = nlohmann::json::array();
    for (Eigen::Index i = 0; i < model.mean.size(); ++i) mean.push_back(model.mean[i]);
    nlohmann::json ev = nlohmann::json::array();
    for (Eigen::Index i = 0; i < model.explained_variance.size(); ++i)
        ev.push_back(model.explained_variance[i]);
    nlohmann::json comps = nlohmann::json::array();
    for (Eigen::Index i = 0; i < model.components.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < model.components.cols(); ++j)
            row.push_back(model.components(i, j));
        comps.push_back(std::move(row));
    }
    return {{"schema_version", 1}, {"kind", "pca"}, {"mean", std::move(mean)},
            {"components", std::move(comps)}, {"explained_variance", std::move(ev)}};
}

PcaModel pca_from_json(const nlohmann::json& j) {
    if (j.at("schema_version").get<int>() != 1) throw std::runtime_error("unsupported schema_version");
    if (j.at("kind").get<std::string>() != "pca") throw std::runtime_error("expected encoder kind pca");
    PcaModel model;
    const auto& mean = j.at("mean");
    model.mean.resize(static_cast<Eigen::Index>(mean.size()));
    for (std::size_t i = 0; i < mean.size(); ++i)
        model.mean[static_cast<Eigen::Index>(i)] = mean[i].get<double>();
    const auto& ev = j.at("explained_variance");
    model.explained_variance.resize(static_cast<Eigen::Index>(ev.size()));
    for (std::size_t i = 0; i < ev.size(); ++i)
        model.explained_variance[static_cast<Eigen::Index>(i)] = ev[i].get<double>();
    const auto& comps = j.at("components");
    const auto rows = static_cast<Eigen::Index>(comps.size());
    const auto cols = rows > 0 ? static_cast<Eigen::Index>(comps[0].size()) : model.mean.size();
    model.components.resize(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index jj = 0; jj < cols; ++jj)
            model.components(i, jj) = comps[static_cast<std::size_t>(i)][static_cast<std::size_t>(jj)].get<double>();
    return model;
}

} // namespace stringvec
