#pragma once

#include <stdexcept>
#include <vector>

#include "stringvec/feature_matrix.hpp"

namespace stringvec {

struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LogisticRegression {
    Vector weights;
    double intercept = 0.0;
};

struct LogRegOptions {
    int max_iter = 100;
    double tol = 1e-6;  // gradient norm
};

/// Damped-Newton fit of the L2-regularized logistic loss
///   f(w, b) = mean_i log(1 + e^{z_i}) - y_i z_i  +  (l2 / 2) ||w||^2
/// with the intercept unpenalized. Throws ConvergenceError when the gradient
/// norm has not reached tol within max_iter iterations.
LogisticRegression logreg_fit(const Matrix& x, const std::vector<int>& y, double l2,
                              const LogRegOptions& options = {});

Vector logreg_predict_proba(const LogisticRegression& model, const Matrix& x);

double logreg_loss(const Matrix& x, const std::vector<int>& y, double l2,
                   const LogisticRegression& model);

/// Arithmetic mean of the member probabilities, row by row.
Vector voting_ensemble(const std::vector<Vector>& prob_lists);

/// Logistic regression over base-model outputs. base_train must hold
/// out-of-fold predictions for the training rows.
Vector stacking_ensemble(const Matrix& base_train, const std::vector<int>& y_train,
                         const Matrix& base_test, double l2 = 1e-3);

} // namespace stringvec
