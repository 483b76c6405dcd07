#include "mirrorfdr/nodewise.hpp"

#include <cmath>
#include <exception>
#include <stdexcept>
#include <string>

namespace mirrorfdr {

namespace {

Eigen::MatrixXd drop_column(const Eigen::MatrixXd& X, Eigen::Index j) {
    Eigen::MatrixXd out(X.rows(), X.cols() - 1);
    if (j > 0) out.leftCols(j) = X.leftCols(j);
    if (j + 1 < X.cols()) out.rightCols(X.cols() - j - 1) = X.rightCols(X.cols() - j - 1);
    return out;
}

// run body(j) for j in [0, p), optionally with OpenMP; first exception wins
template <typename Body>
void for_each_index(Eigen::Index p, Exec exec, Body body) {
    std::exception_ptr err;
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (Eigen::Index j = 0; j < p; ++j) {
            try {
                body(j);
            } catch (...) {
#pragma omp critical
                if (!err) err = std::current_exception();
            }
        }
    } else {
        for (Eigen::Index j = 0; j < p && !err; ++j) {
            try {
                body(j);
            } catch (...) {
                err = std::current_exception();
            }
        }
    }
    if (err) std::rethrow_exception(err);
}

}  // namespace

Eigen::VectorXd node_wise_ols_tau(const Eigen::MatrixXd& X, int denominator, Exec exec) {
    const Eigen::Index p = X.cols();
    if (denominator <= 0) throw std::invalid_argument("node_wise_ols_tau: nonpositive denominator");
    Eigen::VectorXd tau_sq(p);
    for_each_index(p, exec, [&](Eigen::Index j) {
        double rss;
        if (p == 1) {
            rss = X.col(0).squaredNorm();
        } else {
            Eigen::MatrixXd Xmj = drop_column(X, j);
            Eigen::MatrixXd G = Xmj.transpose() * Xmj;
            Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
            if (ldlt.info() != Eigen::Success ||
                ldlt.vectorD().minCoeff() <= ldlt.vectorD().maxCoeff() * 1e-12)
                throw std::runtime_error("node_wise_ols_tau: rank-deficient X_{-j} at node " +
                                         std::to_string(j));
            Eigen::VectorXd b = Xmj.transpose() * X.col(j);
            Eigen::VectorXd gamma = ldlt.solve(b);
            rss = (X.col(j) - Xmj * gamma).squaredNorm();
        }
        tau_sq[j] = rss / static_cast<double>(denominator);
    });
    return tau_sq;
}

PrecisionEstimate node_wise_precision(const Eigen::MatrixXd& Xw,
                                      const NodewiseOptions& opts,
                                      const Eigen::MatrixXd* x_raw) {
    const Eigen::Index n = Xw.rows();
    const Eigen::Index p = Xw.cols();
    if (opts.cross_with_raw && (x_raw == nullptr || x_raw->rows() != n || x_raw->cols() != p))
        throw std::invalid_argument("node_wise_precision: raw design required for cross_with_raw");

    PrecisionEstimate est;
    est.tau_sq.resize(p);
    est.lambdas.resize(p);
    est.gammas.assign(p, Eigen::VectorXd());
    if (opts.lambdas.size() != 0 && opts.lambdas.size() != p)
        throw std::invalid_argument("node_wise_precision: lambdas must have length p");
    for (Eigen::Index j = 0; j < p; ++j)
        est.lambdas[j] = opts.lambdas.size() == p
                             ? opts.lambdas[j]
                             : opts.theory_c * std::sqrt(std::log(static_cast<double>(p)) /
                                                         static_cast<double>(n));

    for_each_index(p, opts.exec, [&](Eigen::Index j) {
        Eigen::VectorXd gamma;
        Eigen::VectorXd fitted = Eigen::VectorXd::Zero(n);
        if (p > 1) {
            Dataset node;
            node.X = drop_column(Xw, j);
            node.y = Xw.col(j);
            node.family = GlmFamily::gaussian();
            LassoFit fit = fit_lasso(node, est.lambdas[j], opts.lasso);
            gamma = fit.beta_hat;
            fitted = node.X * gamma;
        }
        const Eigen::VectorXd& cross = opts.cross_with_raw ? x_raw->col(j) : Xw.col(j);
        double tau = (Xw.col(j) - fitted).dot(cross) / static_cast<double>(n);
        if (tau <= 0)
            throw std::runtime_error("tau_nonpositive at feature " + std::to_string(j + 1));
        est.tau_sq[j] = tau;
        est.gammas[j] = gamma;
    });

    // theta = Ghat^{-2} C with Ghat^2 = diag(tau_sq): row j of C over tau_sq[j]
    est.theta_hat.resize(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        double inv = 1.0 / est.tau_sq[j];
        for (Eigen::Index k = 0; k < p; ++k) {
            if (k == j) {
                est.theta_hat(j, k) = inv;
            } else {
                Eigen::Index kk = k < j ? k : k - 1;
                est.theta_hat(j, k) = -est.gammas[j][kk] * inv;
            }
        }
    }
    return est;
}

}  // namespace mirrorfdr
