#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "stringvec/hash.hpp"
#include "stringvec/pca.hpp"

using namespace stringvec;

namespace {

Matrix random_matrix(std::uint64_t seed, Eigen::Index n, Eigen::Index d) {
    SplitMix64 rng(seed);
    Matrix x(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j) x(i, j) = rng.normal() * (1.0 + 0.05 * j) + 0.3 * j;
    return x;
}

// Covariance eigendecomposition oracle, independent of the SVD fit path.
std::pair<Vector, Matrix> covariance_eig(const Matrix& x, int k) {
    Matrix centered = x.rowwise() - x.colwise().mean();
    Matrix cov = centered.transpose() * centered / static_cast<double>(x.rows() - 1);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    const Eigen::Index d = x.cols();
    Vector values(k);
    Matrix vectors(k, d);
    for (int i = 0; i < k; ++i) {
        values[i] = eig.eigenvalues()[d - 1 - i];
        vectors.row(i) = eig.eigenvectors().col(d - 1 - i).transpose();
    }
    return {values, vectors};
}

// Largest principal angle between two row-orthonormal subspaces.
double max_principal_angle(const Matrix& a, const Matrix& b) {
    Eigen::BDCSVD<Matrix> svd(a * b.transpose());
    double smallest_cos = svd.singularValues().minCoeff();
    return std::acos(std::clamp(smallest_cos, -1.0, 1.0));
}

} // namespace

TEST_CASE("rank-1 data yields one dominant component along the line") {
    // Points on y = 2x.
    Matrix x(5, 2);
    x << 1, 2, 2, 4, 3, 6, 4, 8, 5, 10;
    PcaModel model = pca_fit(x, 2);
    CHECK(model.explained_variance[0] > 0.0);
    if (model.k() > 1) CHECK(model.explained_variance[1] == doctest::Approx(0.0).epsilon(1e-12));
    Vector direction = model.components.row(0);
    Vector expected(2);
    expected << 1.0 / std::sqrt(5.0), 2.0 / std::sqrt(5.0);
    CHECK((direction - expected).norm() < 1e-10);
    // One component carries all the variance.
    double total = (x.rowwise() - x.colwise().mean()).squaredNorm() / 4.0;
    CHECK(model.explained_variance[0] == doctest::Approx(total));
}

TEST_CASE("full-rank fit reconstructs the data") {
    Matrix x = random_matrix(3, 9, 8);  // k = d = n-1
    PcaModel model = pca_fit(x, 8);
    REQUIRE(model.k() == 8);
    Matrix projected = pca_transform(model, x);
    Matrix reconstructed = projected * model.components;
    reconstructed.rowwise() += model.mean.transpose();
    CHECK((reconstructed - x).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("explained variance and subspace match the eigen oracle") {
    for (std::uint64_t seed : {11u, 22u, 33u}) {
        Matrix x = random_matrix(seed, 200, 50);
        PcaModel model = pca_fit(x, 30);
        REQUIRE(model.k() == 30);

        auto [oracle_values, oracle_vectors] = covariance_eig(x, 30);
        for (int i = 0; i < 30; ++i)
            CHECK(model.explained_variance[i] == doctest::Approx(oracle_values[i]).epsilon(1e-6));
        CHECK(max_principal_angle(model.components, oracle_vectors) <= 1e-6);
    }
}

TEST_CASE("components are orthonormal and variances non-increasing") {
    Matrix x = random_matrix(7, 120, 40);
    PcaModel model = pca_fit(x, 30);
    Matrix gram = model.components * model.components.transpose();
    CHECK((gram - Matrix::Identity(30, 30)).cwiseAbs().maxCoeff() < 1e-8);
    for (int i = 1; i < 30; ++i)
        CHECK(model.explained_variance[i] <= model.explained_variance[i - 1] + 1e-12);
}

TEST_CASE("transform of the mean row is zero; projections shrink norms") {
    Matrix x = random_matrix(19, 60, 10);
    PcaModel model = pca_fit(x, 4);
    Matrix mean_row = model.mean.transpose();
    CHECK(pca_transform(model, mean_row).cwiseAbs().maxCoeff() < 1e-10);

    Matrix centered = x.rowwise() - model.mean.transpose();
    Matrix projected = pca_transform(model, x);
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        CHECK(projected.row(i).norm() <= centered.row(i).norm() + 1e-10);
}

TEST_CASE("train-only fit: test transform uses train mean") {
    Matrix train = random_matrix(5, 50, 6);
    Matrix test = random_matrix(6, 20, 6);
    PcaModel model = pca_fit(train, 3);
    Matrix expected = (test.rowwise() - model.mean.transpose()) * model.components.transpose();
    CHECK((pca_transform(model, test) - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("transformed train variance equals explained variance") {
    Matrix x = random_matrix(23, 150, 20);
    PcaModel model = pca_fit(x, 10);
    Matrix projected = pca_transform(model, x);
    for (int i = 0; i < 10; ++i) {
        double mean = projected.col(i).mean();
        double var = (projected.col(i).array() - mean).square().sum() /
                     static_cast<double>(x.rows() - 1);
        CHECK(var == doctest::Approx(model.explained_variance[i]).epsilon(1e-6));
    }
    // Total explained variance never exceeds total data variance.
    Matrix centered = x.rowwise() - x.colwise().mean();
    double total_var = centered.squaredNorm() / static_cast<double>(x.rows() - 1);
    CHECK(model.explained_variance.sum() <= total_var + 1e-9);
}

TEST_CASE("sign convention: deterministic across runs and row permutations") {
    Matrix x = random_matrix(41, 80, 12);
    PcaModel a = pca_fit(x, 5);
    PcaModel b = pca_fit(x, 5);
    CHECK((a.components - b.components).cwiseAbs().maxCoeff() == 0.0);

    // Reverse the rows: same point set, same fitted axes.
    Matrix reversed = x.colwise().reverse();
    PcaModel c = pca_fit(reversed, 5);
    CHECK((a.components - c.components).cwiseAbs().maxCoeff() < 1e-8);
    for (int i = 0; i < 5; ++i) {
        Eigen::Index at = 0;
        a.components.row(i).cwiseAbs().maxCoeff(&at);
        CHECK(a.components(i, at) > 0.0);
    }
}

TEST_CASE("k clamps to min(k, n-1, d)") {
    Matrix x = random_matrix(51, 5, 10);
    PcaModel model = pca_fit(x, 30);
    CHECK(model.k() == 4);  // n-1
    Matrix y = random_matrix(52, 40, 3);
    CHECK(pca_fit(y, 30).k() == 3);  // d
}

TEST_CASE("non-finite input and width mismatch are errors") {
    Matrix x = random_matrix(61, 10, 4);
    x(2, 2) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(pca_fit(x, 2), std::invalid_argument);

    Matrix ok = random_matrix(62, 10, 4);
    PcaModel model = pca_fit(ok, 2);
    Matrix wrong = random_matrix(63, 5, 3);
    CHECK_THROWS_AS(pca_transform(model, wrong), std::invalid_argument);
}

TEST_CASE("sparse Gram-route fit matches the dense fit") {
    SplitMix64 rng(77);
    const Eigen::Index n = 40, d = 120;  // wide: d > n
    Matrix dense = Matrix::Zero(n, d);
    std::vector<Eigen::Triplet<double>> triplets;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (int nz = 0; nz < 12; ++nz) {
            auto j = static_cast<Eigen::Index>(rng.bounded(static_cast<std::uint64_t>(d)));
            double v = rng.normal();
            dense(i, j) += v;
            triplets.emplace_back(static_cast<int>(i), static_cast<int>(j), v);
        }
    }
    SparseRowMatrix sparse(n, d);
    sparse.setFromTriplets(triplets.begin(), triplets.end());

    PcaModel via_dense = pca_fit(Eigen::Ref<const Matrix>(dense), 8);
    PcaModel via_gram = pca_fit(sparse, 8);
    REQUIRE(via_gram.k() == via_dense.k());
    for (int i = 0; i < via_dense.k(); ++i)
        CHECK(via_gram.explained_variance[i] ==
              doctest::Approx(via_dense.explained_variance[i]).epsilon(1e-8));
    CHECK(max_principal_angle(via_dense.components, via_gram.components) < 1e-6);

    Matrix t_dense = pca_transform(via_dense, Eigen::Ref<const Matrix>(dense));
    Matrix t_sparse = pca_transform(via_gram, sparse);
    CHECK((t_dense - t_sparse).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("pca json round trip") {
    Matrix x = random_matrix(91, 30, 6);
    PcaModel model = pca_fit(x, 3);
    PcaModel back = pca_from_json(pca_to_json(model));
    CHECK((back.components - model.components).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.mean - model.mean).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.explained_variance - model.explained_variance).cwiseAbs().maxCoeff() == 0.0);
}
