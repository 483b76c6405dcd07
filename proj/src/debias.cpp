#include "mirrorfdr/debias.hpp"

#include <cmath>
#include <stdexcept>

namespace mirrorfdr {

namespace {

Eigen::VectorXd sandwich_diag_sqrt(const Eigen::MatrixXd& theta, const Eigen::MatrixXd& mid) {
    Eigen::MatrixXd tm = theta * mid;
    Eigen::VectorXd out(theta.rows());
    for (Eigen::Index j = 0; j < theta.rows(); ++j) {
        double v = tm.row(j).dot(theta.row(j));
        if (v <= 0) throw std::runtime_error("debias: nonpositive variance estimate");
        out[j] = std::sqrt(v);
    }
    return out;
}

}  // namespace

DebiasedFit debias_linear(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          const LassoFit& lasso, const PrecisionEstimate& prec) {
    const double n = static_cast<double>(X.rows());
    DebiasedFit fit;
    fit.beta_d = lasso.beta_hat +
                 prec.theta_hat * (X.transpose() * (y - X * lasso.beta_hat)) / n;
    Eigen::MatrixXd sigma_hat_n = X.transpose() * X / n;
    fit.sigma_hat = sandwich_diag_sqrt(prec.theta_hat, sigma_hat_n);
    return fit;
}

DebiasedFit debias_glm(const Dataset& data, const LassoFit& lasso,
                       const PrecisionEstimate& prec) {
    if (data.family.kind == Family::gaussian)
        return debias_linear(data.X, data.y, lasso, prec);
    const double n = static_cast<double>(data.n());
    Eigen::VectorXd eta = data.X * lasso.beta_hat;
    Eigen::VectorXd dot(data.n());
    for (Eigen::Index i = 0; i < data.n(); ++i)
        dot[i] = data.family.eval(data.y[i], eta[i]).dot;
    DebiasedFit fit;
    fit.beta_d = lasso.beta_hat - prec.theta_hat * (data.X.transpose() * dot) / n;
    // empirical score covariance (1/n) X' diag(dot^2) X
    Eigen::MatrixXd mid = data.X.transpose() * dot.array().square().matrix().asDiagonal() *
                          data.X / n;
    fit.sigma_hat = sandwich_diag_sqrt(prec.theta_hat, mid);
    return fit;
}

}  // namespace mirrorfdr
