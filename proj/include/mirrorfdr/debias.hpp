#pragma once

#include <Eigen/Dense>

#include "mirrorfdr/lasso.hpp"
#include "mirrorfdr/nodewise.hpp"

namespace mirrorfdr {

struct DebiasedFit {
    Eigen::VectorXd beta_d;     // debiased coefficients
    Eigen::VectorXd sigma_hat;  // per-coordinate standard errors, positive
};

// beta_d = beta + (1/n) Theta X'(y - X beta); sigma_j^2 = (Theta Sigma_hat Theta')_jj
DebiasedFit debias_linear(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          const LassoFit& lasso, const PrecisionEstimate& prec);

// beta_d = beta - Theta (1/n) X' loss_dot; sandwich variance with loss_dot at
// beta. Gaussian family dispatches to debias_linear.
DebiasedFit debias_glm(const Dataset& data, const LassoFit& lasso,
                       const PrecisionEstimate& prec);

}  // namespace mirrorfdr
