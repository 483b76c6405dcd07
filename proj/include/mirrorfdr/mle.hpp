#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "mirrorfdr/glm.hpp"

namespace mirrorfdr {

struct MleFit {
    Eigen::VectorXd beta_hat;
    int iterations = 0;
    double grad_norm = 0.0;
    bool converged = false;
    bool ridge_fallback = false;  // weighted Gram needed regularization
};

struct MleOptions {
    int max_iter = 100;
    double tol = 1e-8;          // sup-norm of (1/n) X^T loss_dot
    bool intercept = false;     // append an all-ones column internally
    int max_halvings = 30;
    double divergence_bound = 1e6;  // ||beta||_2 beyond which the MLE is declared nonexistent
};

struct MleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Newton/IRLS with step-halving line search. The intercept, when requested,
// is reported as the last entry of beta_hat.
MleFit fit_mle(const Dataset& data, const MleOptions& opts = {});

}  // namespace mirrorfdr
