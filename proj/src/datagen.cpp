#include "mirrorfdr/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mirrorfdr {

namespace {

constexpr double kPredictorClamp = 30.0;  // guards exp() in count samplers

Eigen::MatrixXd toeplitz_matrix(int p, double r) {
    Eigen::MatrixXd sigma(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) sigma(i, j) = std::pow(r, std::abs(i - j));
    return sigma;
}

Eigen::MatrixXd constant_matrix(int p, double r) {
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Constant(p, p, r);
    sigma.diagonal().setOnes();
    return sigma;
}

}  // namespace

std::string CovarianceSpec::name() const {
    switch (kind) {
        case CovKind::identity: return "identity";
        case CovKind::toeplitz: return "toeplitz";
        case CovKind::constant: return "constant";
        case CovKind::blockwise_toeplitz: return "blockwise_toeplitz";
        case CovKind::constant_partial: return "constant_partial";
        case CovKind::toeplitz_partial: return "toeplitz_partial";
    }
    return "?";
}

CovarianceSpec covariance_from_name(const std::string& name, double r, int blocks) {
    CovarianceSpec spec;
    spec.r = r;
    spec.blocks = blocks;
    if (name == "identity") spec.kind = CovKind::identity;
    else if (name == "toeplitz") spec.kind = CovKind::toeplitz;
    else if (name == "constant") spec.kind = CovKind::constant;
    else if (name == "blockwise_toeplitz") spec.kind = CovKind::blockwise_toeplitz;
    else if (name == "constant_partial") spec.kind = CovKind::constant_partial;
    else if (name == "toeplitz_partial") spec.kind = CovKind::toeplitz_partial;
    else throw std::invalid_argument("unknown covariance kind: " + name);
    return spec;
}

Eigen::MatrixXd make_covariance(const CovarianceSpec& spec, int p) {
    if (p < 1) throw std::invalid_argument("make_covariance: p must be positive");
    if (spec.r < 0.0 || spec.r >= 1.0)
        throw std::invalid_argument("make_covariance: r must lie in [0, 1)");
    Eigen::MatrixXd sigma;
    switch (spec.kind) {
        case CovKind::identity:
            sigma = Eigen::MatrixXd::Identity(p, p);
            break;
        case CovKind::toeplitz:
            sigma = toeplitz_matrix(p, spec.r);
            break;
        case CovKind::constant:
            sigma = constant_matrix(p, spec.r);
            break;
        case CovKind::blockwise_toeplitz: {
            if (spec.blocks < 1 || p % spec.blocks != 0)
                throw std::invalid_argument("blockwise_toeplitz: p must be divisible by blocks");
            int bp = p / spec.blocks;  // block size p'
            sigma = Eigen::MatrixXd::Zero(p, p);
            Eigen::MatrixXd block(bp, bp);
            for (int i = 0; i < bp; ++i)
                for (int j = 0; j < bp; ++j) {
                    int d = std::abs(i - j);
                    // banded linear decay: (p'-1-d) r/(p'-1), zero at d = p'-1
                    block(i, j) = (i == j) ? 1.0
                                           : std::max(bp - 1 - d, 0) * spec.r / (bp - 1);
                }
            for (int b = 0; b < spec.blocks; ++b)
                sigma.block(b * bp, b * bp, bp, bp) = block;
            break;
        }
        case CovKind::constant_partial: {
            Eigen::MatrixXd prec = constant_matrix(p, spec.r);
            sigma = prec.llt().solve(Eigen::MatrixXd::Identity(p, p));
            break;
        }
        case CovKind::toeplitz_partial: {
            Eigen::MatrixXd prec = toeplitz_matrix(p, spec.r);
            sigma = prec.llt().solve(Eigen::MatrixXd::Identity(p, p));
            break;
        }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("make_covariance: matrix is not positive definite");
    return sigma;
}

Eigen::MatrixXd sample_design(int n, int p, const Eigen::MatrixXd& sigma,
                              DesignScale scale, std::mt19937_64& rng) {
    if (sigma.rows() != p || sigma.cols() != p)
        throw std::invalid_argument("sample_design: sigma must be p x p");
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("sample_design: Cholesky factorization failed");
    Eigen::MatrixXd L = llt.matrixL();

    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd Z(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) Z(i, j) = normal(rng);
    Eigen::MatrixXd X = Z * L.transpose();

    if (scale == DesignScale::inv_n) {
        for (int j = 0; j < p; ++j) {
            double mean = X.col(j).mean();
            double var = (X.col(j).array() - mean).square().sum() / (n - 1);
            if (var <= 0) throw std::runtime_error("sample_design: degenerate column");
            X.col(j) *= 1.0 / std::sqrt(var * n);
        }
    }
    return X;
}

Coefficients sample_coefficients(int p, const SignalSpec& spec, std::mt19937_64& rng) {
    if (spec.p1 < 0 || spec.p1 > p)
        throw std::invalid_argument("sample_coefficients: p1 out of range");
    std::vector<int> idx(p);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<int> s1(idx.begin(), idx.begin() + spec.p1);
    std::sort(s1.begin(), s1.end());

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    for (int j : s1) {
        if (spec.mode == MagnitudeMode::fixed)
            beta[j] = coin(rng) ? spec.value : -spec.value;
        else
            beta[j] = spec.value * normal(rng);
    }
    return {beta, s1};
}

Eigen::VectorXd sample_response(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta,
                                const GlmFamily& family, std::mt19937_64& rng) {
    if (X.cols() != beta.size())
        throw std::invalid_argument("sample_response: dimension mismatch");
    const Eigen::Index n = X.rows();
    Eigen::VectorXd eta = X * beta;
    Eigen::VectorXd y(n);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        double v = eta[i];
        switch (family.kind) {
            case Family::gaussian:
                y[i] = v + normal(rng);
                break;
            case Family::logistic: {
                double prob = 1.0 / (1.0 + std::exp(-v));
                y[i] = unif(rng) < prob ? 1.0 : 0.0;
                break;
            }
            case Family::poisson: {
                double lambda = std::exp(std::clamp(v, -kPredictorClamp, kPredictorClamp));
                std::poisson_distribution<long> pois(lambda);
                y[i] = static_cast<double>(pois(rng));
                break;
            }
            case Family::negative_binomial: {
                double mu = std::exp(std::clamp(v, -kPredictorClamp, kPredictorClamp));
                double r = family.dispersion;
                // gamma-Poisson mixture: lambda ~ Gamma(r, mu/r), y ~ Poisson(lambda)
                std::gamma_distribution<double> gamma(r, mu / r);
                std::poisson_distribution<long> pois(gamma(rng));
                y[i] = static_cast<double>(pois(rng));
                break;
            }
        }
    }
    return y;
}

}  // namespace mirrorfdr
