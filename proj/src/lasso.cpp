#include "mirrorfdr/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mirrorfdr {

namespace {

constexpr double kWeightFloor = 1e-10;

double soft_threshold(double z, double lambda) {
    if (z > lambda) return z - lambda;
    if (z < -lambda) return z + lambda;
    return 0.0;
}

double penalty(const Eigen::VectorXd& beta, double lambda) {
    return lambda * beta.lpNorm<1>();
}

// --- gaussian branch: (1/2n)||y - X beta||^2 + lambda||beta||_1 ------------

struct GaussianCd {
    const Eigen::MatrixXd& X;
    const Eigen::VectorXd& y;
    double lambda;
    Eigen::Index n;
    Eigen::VectorXd colsq;  // ||X_j||^2 / n
    Eigen::VectorXd beta;
    Eigen::VectorXd resid;

    GaussianCd(const Eigen::MatrixXd& X_, const Eigen::VectorXd& y_, double lambda_,
               const Eigen::VectorXd& warm)
        : X(X_), y(y_), lambda(lambda_), n(X_.rows()) {
        colsq = X.colwise().squaredNorm() / static_cast<double>(n);
        beta = warm.size() == X.cols() ? warm : Eigen::VectorXd::Zero(X.cols());
        resid = y - X * beta;
    }

    // one pass over the given coordinates; returns max |delta beta_j|
    double sweep(const std::vector<int>& coords) {
        double max_delta = 0.0;
        for (int j : coords) {
            if (colsq[j] <= 0) continue;
            double old = beta[j];
            double z = X.col(j).dot(resid) / static_cast<double>(n) + colsq[j] * old;
            double next = soft_threshold(z, lambda) / colsq[j];
            if (next != old) {
                resid -= X.col(j) * (next - old);
                beta[j] = next;
                max_delta = std::max(max_delta, std::abs(next - old));
            }
        }
        return max_delta;
    }
};

// --- shared coordinate-descent driver with active-set cycling --------------

template <typename Sweeper>
bool cd_driver(Sweeper& cd, Eigen::Index p, const LassoOptions& opts, int& sweeps_used) {
    std::vector<int> all(p);
    std::iota(all.begin(), all.end(), 0);
    int sweeps = 0;
    while (sweeps < opts.max_sweeps) {
        double delta = cd.sweep(all);
        ++sweeps;
        std::vector<int> active;
        for (Eigen::Index j = 0; j < p; ++j)
            if (cd.beta[j] != 0.0) active.push_back(static_cast<int>(j));
        while (sweeps < opts.max_sweeps) {
            double d = cd.sweep(active);
            ++sweeps;
            if (d <= opts.coord_tol) break;
        }
        if (delta <= opts.coord_tol) {
            sweeps_used = sweeps;
            return true;
        }
    }
    sweeps_used = sweeps;
    return false;
}

LassoFit fit_lasso_gaussian(const Dataset& data, double lambda, const LassoOptions& opts) {
    GaussianCd cd(data.X, data.y, lambda, opts.warm_start);
    const Eigen::Index p = data.p();
    LassoFit fit;
    fit.lambda = lambda;
    int sweeps = 0;
    // iterate until the KKT residual on the objective clears the tolerance
    for (int round = 0; round < 10; ++round) {
        fit.converged = cd_driver(cd, p, opts, sweeps);
        fit.kkt_violation = kkt_violation(data, cd.beta, lambda);
        if (fit.kkt_violation <= opts.kkt_tol) break;
    }
    fit.beta_hat = cd.beta;
    for (Eigen::Index j = 0; j < p; ++j)
        if (fit.beta_hat[j] != 0.0) fit.active_set.push_back(static_cast<int>(j));
    return fit;
}

// --- GLM branch: (1/2n) sum loss + lambda||beta||_1 ------------------------

double glm_objective(const Dataset& data, const Eigen::VectorXd& eta, double lambda,
                     const Eigen::VectorXd& beta) {
    double loss = 0.0;
    for (Eigen::Index i = 0; i < data.n(); ++i)
        loss += data.family.eval(data.y[i], eta[i]).loss;
    return loss / (2.0 * static_cast<double>(data.n())) + penalty(beta, lambda);
}

// inner solver for the penalized quadratic model around beta0
struct QuadraticCd {
    const Eigen::MatrixXd& X;
    double lambda;
    Eigen::Index n;
    Eigen::VectorXd w;      // loss_ddot at beta0
    Eigen::VectorXd g0;     // (1/2n) X^T loss_dot at beta0
    Eigen::VectorXd hdiag;  // (1/2n) X_j^T W X_j
    Eigen::VectorXd beta;
    Eigen::VectorXd v;      // X (beta - beta0)

    QuadraticCd(const Eigen::MatrixXd& X_, double lambda_, const Eigen::VectorXd& w_,
                const Eigen::VectorXd& g0_, const Eigen::VectorXd& beta0)
        : X(X_), lambda(lambda_), n(X_.rows()), w(w_), g0(g0_), beta(beta0) {
        hdiag.resize(X.cols());
        for (Eigen::Index j = 0; j < X.cols(); ++j)
            hdiag[j] = X.col(j).cwiseProduct(w).dot(X.col(j)) / (2.0 * static_cast<double>(n));
        v = Eigen::VectorXd::Zero(n);
    }

    double sweep(const std::vector<int>& coords) {
        double max_delta = 0.0;
        for (int j : coords) {
            if (hdiag[j] <= 0) continue;
            double old = beta[j];
            double q = g0[j] + X.col(j).cwiseProduct(w).dot(v) / (2.0 * static_cast<double>(n));
            double next = soft_threshold(hdiag[j] * old - q, lambda) / hdiag[j];
            if (next != old) {
                v += X.col(j) * (next - old);
                beta[j] = next;
                max_delta = std::max(max_delta, std::abs(next - old));
            }
        }
        return max_delta;
    }
};

LassoFit fit_lasso_glm(const Dataset& data, double lambda, const LassoOptions& opts) {
    const Eigen::Index n = data.n();
    const Eigen::Index p = data.p();
    LassoFit fit;
    fit.lambda = lambda;
    fit.beta_hat = opts.warm_start.size() == p ? opts.warm_start : Eigen::VectorXd::Zero(p);
    Eigen::VectorXd eta = data.X * fit.beta_hat;
    double obj = glm_objective(data, eta, lambda, fit.beta_hat);

    for (int outer = 0; outer < opts.max_outer; ++outer) {
        Eigen::VectorXd dot(n), ddot(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            LossEval le = data.family.eval(data.y[i], eta[i]);
            dot[i] = le.dot;
            ddot[i] = std::max(le.ddot, kWeightFloor);
        }
        Eigen::VectorXd grad = data.X.transpose() * dot / (2.0 * static_cast<double>(n));
        fit.kkt_violation = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            double v = fit.beta_hat[j] != 0.0
                           ? std::abs(grad[j] + lambda * (fit.beta_hat[j] > 0 ? 1.0 : -1.0))
                           : std::max(std::abs(grad[j]) - lambda, 0.0);
            fit.kkt_violation = std::max(fit.kkt_violation, v);
        }
        if (fit.kkt_violation <= opts.kkt_tol) {
            fit.converged = true;
            break;
        }

        QuadraticCd cd(data.X, lambda, ddot, grad, fit.beta_hat);
        int sweeps = 0;
        cd_driver(cd, p, opts, sweeps);
        Eigen::VectorXd dir = cd.beta - fit.beta_hat;
        if (dir.lpNorm<Eigen::Infinity>() == 0.0) {
            fit.converged = false;
            break;
        }

        // backtracking on the true objective
        double t = 1.0;
        bool accepted = false;
        for (int h = 0; h < 30; ++h) {
            Eigen::VectorXd beta_try = fit.beta_hat + t * dir;
            Eigen::VectorXd eta_try = eta + t * (data.X * dir);
            double obj_try = glm_objective(data, eta_try, lambda, beta_try);
            if (std::isfinite(obj_try) && obj_try <= obj) {
                fit.beta_hat = beta_try;
                eta = eta_try;
                obj = obj_try;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            fit.converged = false;
            break;
        }
        fit.converged = false;  // until the KKT check at the top passes
    }
    fit.kkt_violation = kkt_violation(data, fit.beta_hat, lambda);
    for (Eigen::Index j = 0; j < p; ++j)
        if (fit.beta_hat[j] != 0.0) fit.active_set.push_back(static_cast<int>(j));
    return fit;
}

}  // namespace

LassoFit fit_lasso(const Dataset& data, double lambda, const LassoOptions& opts) {
    if (lambda <= 0) throw std::invalid_argument("fit_lasso: lambda must be positive");
    data.validate();
    if (data.family.kind == Family::gaussian) return fit_lasso_gaussian(data, lambda, opts);
    return fit_lasso_glm(data, lambda, opts);
}

double kkt_violation(const Dataset& data, const Eigen::VectorXd& beta, double lambda) {
    const double n = static_cast<double>(data.n());
    Eigen::VectorXd grad;
    if (data.family.kind == Family::gaussian) {
        grad = -data.X.transpose() * (data.y - data.X * beta) / n;
    } else {
        Eigen::VectorXd eta = data.X * beta;
        Eigen::VectorXd dot(data.n());
        for (Eigen::Index i = 0; i < data.n(); ++i)
            dot[i] = data.family.eval(data.y[i], eta[i]).dot;
        grad = data.X.transpose() * dot / (2.0 * n);
    }
    double viol = 0.0;
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        double v = beta[j] != 0.0 ? std::abs(grad[j] + lambda * (beta[j] > 0 ? 1.0 : -1.0))
                                  : std::max(std::abs(grad[j]) - lambda, 0.0);
        viol = std::max(viol, v);
    }
    return viol;
}

double lambda_max(const Dataset& data) {
    const double n = static_cast<double>(data.n());
    if (data.family.kind == Family::gaussian)
        return (data.X.transpose() * data.y).lpNorm<Eigen::Infinity>() / n;
    Eigen::VectorXd dot(data.n());
    for (Eigen::Index i = 0; i < data.n(); ++i)
        dot[i] = data.family.eval(data.y[i], 0.0).dot;
    return (data.X.transpose() * dot / (2.0 * n)).lpNorm<Eigen::Infinity>();
}

namespace {

bool fold_degenerate(const Dataset& data, const std::vector<int>& train_idx) {
    if (data.family.kind != Family::logistic) return false;
    bool has0 = false, has1 = false;
    for (int i : train_idx) (data.y[i] == 0.0 ? has0 : has1) = true;
    return !(has0 && has1);
}

double heldout_deviance(const Dataset& data, const std::vector<int>& test_idx,
                        const Eigen::VectorXd& beta) {
    double dev = 0.0;
    for (int i : test_idx) dev += data.family.eval(data.y[i], data.X.row(i).dot(beta)).loss;
    return dev;
}

Dataset subset(const Dataset& data, const std::vector<int>& idx) {
    Dataset out;
    out.family = data.family;
    out.X.resize(static_cast<Eigen::Index>(idx.size()), data.p());
    out.y.resize(static_cast<Eigen::Index>(idx.size()));
    for (size_t k = 0; k < idx.size(); ++k) {
        out.X.row(static_cast<Eigen::Index>(k)) = data.X.row(idx[k]);
        out.y[static_cast<Eigen::Index>(k)] = data.y[idx[k]];
    }
    return out;
}

}  // namespace

double select_lambda(const Dataset& data, const LambdaRule& rule, std::mt19937_64& rng) {
    const int n = static_cast<int>(data.n());
    const int p = static_cast<int>(data.p());
    if (rule.kind == LambdaRule::Kind::theory)
        return rule.c * std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n));

    if (rule.folds < 2) throw std::invalid_argument("select_lambda: cv needs k >= 2");
    const int grid_size = 50;
    double lmax = lambda_max(data);
    if (lmax <= 0) lmax = 1e-3;
    std::vector<double> grid(grid_size);
    for (int g = 0; g < grid_size; ++g)
        grid[g] = lmax * std::pow(1e-3, static_cast<double>(g) / (grid_size - 1));

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::vector<int>> folds;
    for (int attempt = 0; attempt < 10; ++attempt) {
        std::shuffle(perm.begin(), perm.end(), rng);
        folds.assign(rule.folds, {});
        for (int i = 0; i < n; ++i) folds[i % rule.folds].push_back(perm[i]);
        bool ok = true;
        for (int f = 0; f < rule.folds && ok; ++f) {
            std::vector<int> train;
            for (int g = 0; g < rule.folds; ++g)
                if (g != f) train.insert(train.end(), folds[g].begin(), folds[g].end());
            ok = !fold_degenerate(data, train);
        }
        if (ok) break;
        if (attempt == 9) throw std::runtime_error("select_lambda: degenerate folds after 10 reshuffles");
    }

    std::vector<double> cv_dev(grid_size, 0.0);
    for (int f = 0; f < rule.folds; ++f) {
        std::vector<int> train;
        for (int g = 0; g < rule.folds; ++g)
            if (g != f) train.insert(train.end(), folds[g].begin(), folds[g].end());
        Dataset dtrain = subset(data, train);
        LassoOptions opts;
        for (int g = 0; g < grid_size; ++g) {
            LassoFit fit = fit_lasso(dtrain, grid[g], opts);
            opts.warm_start = fit.beta_hat;  // warm start down the path
            cv_dev[g] += heldout_deviance(data, folds[f], fit.beta_hat);
        }
    }
    int best = 0;
    for (int g = 1; g < grid_size; ++g)
        if (cv_dev[g] < cv_dev[best]) best = g;
    return grid[best];
}

}  // namespace mirrorfdr
