#include "mirrorfdr/mle.hpp"

#include <cmath>

namespace mirrorfdr {

namespace {

constexpr double kWeightFloor = 1e-10;

// mean loss and its gradient/Hessian weights at the current linear predictor
struct Evaluated {
    double loss;            // (1/n) sum loss_i
    Eigen::VectorXd dot;    // loss_dot per observation
    Eigen::VectorXd ddot;   // loss_ddot per observation, floored
};

Evaluated evaluate(const GlmFamily& family, const Eigen::VectorXd& y,
                   const Eigen::VectorXd& eta) {
    const Eigen::Index n = y.size();
    Evaluated ev{0.0, Eigen::VectorXd(n), Eigen::VectorXd(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        LossEval le = family.eval(y[i], eta[i]);
        ev.loss += le.loss;
        ev.dot[i] = le.dot;
        ev.ddot[i] = std::max(le.ddot, kWeightFloor);
    }
    ev.loss /= static_cast<double>(n);
    return ev;
}

double mean_loss(const GlmFamily& family, const Eigen::VectorXd& y,
                 const Eigen::VectorXd& eta) {
    double loss = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) loss += family.eval(y[i], eta[i]).loss;
    return loss / static_cast<double>(y.size());
}

}  // namespace

MleFit fit_mle(const Dataset& data, const MleOptions& opts) {
    data.validate();
    Eigen::MatrixXd X = data.X;
    if (opts.intercept) {
        X.conservativeResize(Eigen::NoChange, X.cols() + 1);
        X.col(X.cols() - 1).setOnes();
    }
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();

    MleFit fit;
    fit.beta_hat = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(n);

    for (int it = 0; it < opts.max_iter; ++it) {
        Evaluated ev = evaluate(data.family, data.y, eta);
        Eigen::VectorXd grad = X.transpose() * ev.dot / static_cast<double>(n);
        fit.grad_norm = grad.lpNorm<Eigen::Infinity>();
        fit.iterations = it;
        if (fit.grad_norm <= opts.tol) {
            // Separation check: at an interior optimum the loss rises along the
            // ray t*beta; if doubling beta still lowers it, the "optimum" is a
            // descent ray at infinity and the MLE does not exist.
            if (it > 0 && mean_loss(data.family, data.y, 2.0 * eta) < ev.loss)
                throw MleError("mle_nonexistent");
            fit.converged = true;
            return fit;
        }
        if (fit.beta_hat.norm() > opts.divergence_bound)
            throw MleError("mle_nonexistent");

        Eigen::MatrixXd H = X.transpose() * ev.ddot.asDiagonal() * X / static_cast<double>(n);
        Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
        // singular or near-singular weighted Gram: add a small ridge once
        bool bad = ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
                   ldlt.vectorD().minCoeff() <= ldlt.vectorD().maxCoeff() * 1e-12;
        if (bad) {
            fit.ridge_fallback = true;
            H.diagonal().array() += 1e-8;
            ldlt.compute(H);
            if (ldlt.info() != Eigen::Success) throw MleError("singular_hessian");
        }
        Eigen::VectorXd step = ldlt.solve(-grad);

        double t = 1.0;
        bool accepted = false;
        for (int h = 0; h <= opts.max_halvings; ++h) {
            Eigen::VectorXd beta_try = fit.beta_hat + t * step;
            Eigen::VectorXd eta_try = X * beta_try;
            double loss_try = mean_loss(data.family, data.y, eta_try);
            if (std::isfinite(loss_try) && loss_try <= ev.loss) {
                fit.beta_hat = beta_try;
                eta = eta_try;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) throw MleError("mle_nonexistent");
    }
    // loss kept decreasing but the gradient never converged within budget
    throw MleError("mle_nonexistent");
}

}  // namespace mirrorfdr
