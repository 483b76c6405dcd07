#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "mirrorfdr/glm.hpp"

namespace mirrorfdr {

struct LassoFit {
    Eigen::VectorXd beta_hat;
    double lambda = 0.0;
    double kkt_violation = 0.0;
    std::vector<int> active_set;
    bool converged = true;
};

struct LassoOptions {
    int max_outer = 100;       // proximal-Newton iterations (GLM)
    int max_sweeps = 10000;    // coordinate-descent sweeps per solve
    double coord_tol = 1e-9;   // max |delta beta_j| per sweep
    double kkt_tol = 1e-6;
    Eigen::VectorXd warm_start;  // empty = start at zero
};

// Gaussian family: (1/2n)||y - X beta||^2 + lambda ||beta||_1 by cyclic
// coordinate descent with active-set cycling. Other families: the GLM
// objective (1/2n) sum loss(y_i, x_i'beta) + lambda ||beta||_1 by an outer
// proximal-Newton loop with an inner weighted coordinate descent.
LassoFit fit_lasso(const Dataset& data, double lambda, const LassoOptions& opts = {});

// Smallest lambda at which beta = 0 is optimal (sup-norm of the smooth
// gradient at zero).
double lambda_max(const Dataset& data);

// KKT residual of beta on the objective actually optimized for this family.
double kkt_violation(const Dataset& data, const Eigen::VectorXd& beta, double lambda);

struct LambdaRule {
    enum class Kind { cv, theory } kind = Kind::theory;
    int folds = 10;   // cv
    double c = 1.0;   // theory: lambda = c sqrt(log p / n)
};

double select_lambda(const Dataset& data, const LambdaRule& rule, std::mt19937_64& rng);

}  // namespace mirrorfdr
