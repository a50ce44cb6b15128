#include "stringvec/linear.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace stringvec {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double objective(const Matrix& x, const std::vector<int>& y, double l2,
                 const Vector& w, double b) {
    const auto n = static_cast<double>(x.rows());
    Vector z = x * w;
    z.array() += b;
    double loss = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        double zi = z[i];
        double softplus = zi > 0 ? zi + std::log1p(std::exp(-zi)) : std::log1p(std::exp(zi));
        loss += softplus - (y[static_cast<std::size_t>(i)] == 1 ? zi : 0.0);
    }
    return loss / n + 0.5 * l2 * w.squaredNorm();
}

} // namespace

LogisticRegression logreg_fit(const Matrix& x, const std::vector<int>& y, double l2,
                              const LogRegOptions& options) {
    if (static_cast<std::size_t>(x.rows()) != y.size())
        throw std::invalid_argument("logreg_fit: row count mismatch");
    if (x.rows() == 0) throw std::invalid_argument("logreg_fit: empty input");
    if (!x.allFinite()) throw std::invalid_argument("logreg_fit: non-finite features");
    bool has_pos = false, has_neg = false;
    for (int v : y) {
        if (v == 1) has_pos = true;
        else if (v == 0) has_neg = true;
        else throw std::invalid_argument("logreg_fit: labels must be 0/1");
    }
    if (!has_pos || !has_neg)
        throw std::invalid_argument("logreg_fit: both classes must be present");

    const Eigen::Index n = x.rows(), d = x.cols();
    const double inv_n = 1.0 / static_cast<double>(n);

    Vector w = Vector::Zero(d);
    double b = 0.0;
    double f = objective(x, y, l2, w, b);

    for (int iter = 0; iter < options.max_iter; ++iter) {
        Vector z = x * w;
        z.array() += b;
        Vector p(n), r(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            p[i] = sigmoid(z[i]);
            r[i] = p[i] - static_cast<double>(y[static_cast<std::size_t>(i)]);
        }

        Vector grad_w = x.transpose() * r * inv_n + l2 * w;
        double grad_b = r.sum() * inv_n;

        double grad_norm = std::sqrt(grad_w.squaredNorm() + grad_b * grad_b);
        if (grad_norm <= options.tol) {
            return {w, b};
        }

        // Newton system over [w; b] with a small ridge for stability.
        Vector s(n);
        for (Eigen::Index i = 0; i < n; ++i) s[i] = std::max(p[i] * (1.0 - p[i]), 1e-12);
        Matrix h(d + 1, d + 1);
        Matrix xs = x.array().colwise() * s.array();
        h.topLeftCorner(d, d) = x.transpose() * xs * inv_n;
        h.topLeftCorner(d, d).diagonal().array() += l2 + 1e-12;
        Vector xs_sum = xs.colwise().sum() * inv_n;
        h.block(0, d, d, 1) = xs_sum;
        h.block(d, 0, 1, d) = xs_sum.transpose();
        h(d, d) = s.sum() * inv_n + 1e-12;

        Vector grad(d + 1);
        grad.head(d) = grad_w;
        grad[d] = grad_b;
        Vector step = h.ldlt().solve(grad);

        // Halve until the objective actually decreases.
        double scale = 1.0;
        for (int half = 0; half < 60; ++half) {
            Vector w_new = w - scale * step.head(d);
            double b_new = b - scale * step[d];
            double f_new = objective(x, y, l2, w_new, b_new);
            if (f_new <= f + 1e-15) {
                w = std::move(w_new);
                b = b_new;
                f = f_new;
                break;
            }
            scale *= 0.5;
        }
    }

    // Final check: the cap may land exactly on the optimum.
    Vector z = x * w;
    z.array() += b;
    Vector r(n);
    for (Eigen::Index i = 0; i < n; ++i)
        r[i] = sigmoid(z[i]) - static_cast<double>(y[static_cast<std::size_t>(i)]);
    Vector grad_w = x.transpose() * r * inv_n + l2 * w;
    double grad_b = r.sum() * inv_n;
    if (std::sqrt(grad_w.squaredNorm() + grad_b * grad_b) <= options.tol) return {w, b};

    throw ConvergenceError("logreg_fit: no convergence after " + std::to_string(options.max_iter) +
                           " iterations");
}

Vector logreg_predict_proba(const LogisticRegression& model, const Matrix& x) {
    if (x.cols() != model.weights.size())
        throw std::invalid_argument("logreg_predict_proba: width mismatch");
    Vector z = x * model.weights;
    z.array() += model.intercept;
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = sigmoid(z[i]);
    return z;
}

double logreg_loss(const Matrix& x, const std::vector<int>& y, double l2,
                   const LogisticRegression& model) {
    return objective(x, y, l2, model.weights, model.intercept);
}

Vector voting_ensemble(const std::vector<Vector>& prob_lists) {
    if (prob_lists.empty()) throw std::invalid_argument("voting_ensemble: no members");
    const Eigen::Index n = prob_lists.front().size();
    Vector out = Vector::Zero(n);
    for (const auto& p : prob_lists) {
        if (p.size() != n) throw std::invalid_argument("voting_ensemble: length mismatch");
        out += p;
    }
    return out / static_cast<double>(prob_lists.size());
}

Vector stacking_ensemble(const Matrix& base_train, const std::vector<int>& y_train,
                         const Matrix& base_test, double l2) {
    if (base_train.cols() != base_test.cols())
        throw std::invalid_argument("stacking_ensemble: base width mismatch");
    LogisticRegression meta = logreg_fit(base_train, y_train, l2);
    return logreg_predict_proba(meta, base_test);
}

} // namespace stringvec
