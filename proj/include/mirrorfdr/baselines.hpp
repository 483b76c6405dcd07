#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mirrorfdr/debias.hpp"
#include "mirrorfdr/mle.hpp"

namespace mirrorfdr {

struct PvalueReport {
    Eigen::VectorXd pvals;    // 2 (1 - Phi(|z|)) entrywise
    Eigen::VectorXd zscores;
    std::string method;
};

// Classical Wald z-scores from the inverse observed information X'W^2 X at
// the MLE; two-sided normal p-values.
PvalueReport wald_pvalues_mle(const Dataset& data, const MleFit& fit);

// z_j = sqrt(n) beta_d_j / sigma_hat_j from a debiased Lasso fit.
PvalueReport wald_pvalues_debiased(const DebiasedFit& fit, int n);

// Benjamini-Hochberg step-up rule at level q; returns 0-based indices.
std::vector<int> benjamini_hochberg(const Eigen::VectorXd& pvals, double q);

}  // namespace mirrorfdr
