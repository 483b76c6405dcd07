#pragma once

#include <Eigen/Dense>
#include <random>
#include <string>
#include <vector>

#include "mirrorfdr/glm.hpp"

namespace mirrorfdr {

enum class CovKind {
    identity,
    toeplitz,
    constant,
    blockwise_toeplitz,
    constant_partial,
    toeplitz_partial,
};

struct CovarianceSpec {
    CovKind kind = CovKind::identity;
    double r = 0.0;   // in [0, 1)
    int blocks = 10;  // blockwise_toeplitz only

    std::string name() const;
};

CovarianceSpec covariance_from_name(const std::string& name, double r, int blocks);

enum class MagnitudeMode { fixed, gaussian };

struct SignalSpec {
    int p1 = 0;
    MagnitudeMode mode = MagnitudeMode::fixed;
    double value = 0.0;  // |beta| for fixed, sd for gaussian
};

enum class DesignScale { unit, inv_n };

// Materialize the covariance matrix for the given spec. Partial variants
// build the stated precision matrix and invert it. Positive definiteness is
// checked by Cholesky factorization.
Eigen::MatrixXd make_covariance(const CovarianceSpec& spec, int p);

// Rows i.i.d. N(0, sigma) via Cholesky. Under inv_n every column is rescaled
// so its sample variance is exactly 1/n.
Eigen::MatrixXd sample_design(int n, int p, const Eigen::MatrixXd& sigma,
                              DesignScale scale, std::mt19937_64& rng);

struct Coefficients {
    Eigen::VectorXd beta;  // length p
    std::vector<int> s1;   // sorted support, 0-based
};

Coefficients sample_coefficients(int p, const SignalSpec& spec, std::mt19937_64& rng);

Eigen::VectorXd sample_response(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta,
                                const GlmFamily& family, std::mt19937_64& rng);

}  // namespace mirrorfdr
