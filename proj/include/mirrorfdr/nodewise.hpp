#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "mirrorfdr/lasso.hpp"

namespace mirrorfdr {

enum class Exec { serial, parallel };

// tau_sq[j] = RSS_j / denominator where RSS_j is the residual sum of squares
// of OLS of X_j on X_{-j}. p = 1 regresses on the empty set: RSS = ||X_1||^2.
Eigen::VectorXd node_wise_ols_tau(const Eigen::MatrixXd& X, int denominator,
                                  Exec exec = Exec::parallel);

struct PrecisionEstimate {
    Eigen::MatrixXd theta_hat;           // p x p decorrelating matrix
    Eigen::VectorXd tau_sq;              // length p, all positive
    std::vector<Eigen::VectorXd> gammas; // per-node coefficients, length p-1 each
    Eigen::VectorXd lambdas;             // per-node penalties
};

struct NodewiseOptions {
    // per-node penalties; empty = theory rule c*sqrt(log p / n)
    Eigen::VectorXd lambdas;
    double theory_c = 1.0;
    // GLM branch of the cross product: weighted column (default) or the raw
    // unweighted column supplied via x_raw
    bool cross_with_raw = false;
    Exec exec = Exec::parallel;
    LassoOptions lasso;
};

// Node-wise Lasso of Xw_j on Xw_{-j}; tau_sq via the cross-product formula
// (Xw_j - Xw_{-j} gamma_j)' Xw_j / n; theta = diag(1/tau_sq) * C with
// C_jj = 1, C_jk = -gamma_{j,k}. x_raw (when cross_with_raw) replaces the
// trailing Xw_j in the cross product.
PrecisionEstimate node_wise_precision(const Eigen::MatrixXd& Xw,
                                      const NodewiseOptions& opts = {},
                                      const Eigen::MatrixXd* x_raw = nullptr);

}  // namespace mirrorfdr
