#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mirrorfdr/datagen.hpp"
#include "mirrorfdr/rng.hpp"

using namespace mirrorfdr;

TEST_CASE("identity covariance") {
    Eigen::MatrixXd s = make_covariance({CovKind::identity}, 4);
    CHECK((s - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("toeplitz covariance entries r^|i-j|") {
    double r = 0.6;
    Eigen::MatrixXd s = make_covariance({CovKind::toeplitz, r}, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            CHECK(s(i, j) == doctest::Approx(std::pow(r, std::abs(i - j))).epsilon(1e-15));
}

TEST_CASE("constant covariance entries") {
    double r = 0.3;
    Eigen::MatrixXd s = make_covariance({CovKind::constant, r}, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(s(i, j) == (i == j ? 1.0 : r));
}

TEST_CASE("blockwise toeplitz: within-block linear decay, zero across blocks") {
    // p = 8, 2 blocks of p' = 4; entry max(p'-1-d, 0) * r / (p'-1) off-diagonal.
    double r = 0.6;
    CovarianceSpec spec{CovKind::blockwise_toeplitz, r, 2};
    Eigen::MatrixXd s = make_covariance(spec, 8);
    CHECK(s(0, 0) == 1.0);
    CHECK(s(0, 1) == doctest::Approx(2.0 * r / 3.0).epsilon(1e-15));
    CHECK(s(0, 2) == doctest::Approx(1.0 * r / 3.0).epsilon(1e-15));
    CHECK(s(0, 3) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(s(0, 4) == 0.0);  // different block
    CHECK(s(4, 5) == doctest::Approx(2.0 * r / 3.0).epsilon(1e-15));
    CHECK_THROWS(make_covariance(spec, 9));  // 9 not divisible by 2 blocks
}

TEST_CASE("partial variants invert the stated precision matrix") {
    double r = 0.25;
    for (CovKind kind : {CovKind::constant_partial, CovKind::toeplitz_partial}) {
        Eigen::MatrixXd s = make_covariance({kind, r}, 6);
        Eigen::MatrixXd prec = s.inverse();
        // The precision should be the corresponding direct form (scaled so its
        // diagonal is 1 before inversion).
        Eigen::MatrixXd direct = make_covariance(
            {kind == CovKind::constant_partial ? CovKind::constant : CovKind::toeplitz, r}, 6);
        CHECK((prec / prec(0, 0) - direct).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("covariance must be positive definite") {
    CHECK_THROWS(make_covariance({CovKind::constant, -0.5}, 4));
}

TEST_CASE("toeplitz with r near 1 still factorizes") {
    CHECK_NOTHROW(make_covariance({CovKind::toeplitz, 0.99}, 200));
}

TEST_CASE("inv_n scaling gives sample variance exactly 1/n") {
    int n = 50, p = 8;
    auto rng = make_rng(3);
    Eigen::MatrixXd sigma = make_covariance({CovKind::toeplitz, 0.4}, p);
    Eigen::MatrixXd X = sample_design(n, p, sigma, DesignScale::inv_n, rng);
    for (int j = 0; j < p; ++j) {
        double mean = X.col(j).mean();
        double var = (X.col(j).array() - mean).square().sum() / (n - 1);
        CHECK(var == doctest::Approx(1.0 / n).epsilon(1e-12));
    }
}

TEST_CASE("design sampling is reproducible from the seed") {
    int n = 20, p = 5;
    Eigen::MatrixXd sigma = make_covariance({CovKind::identity}, p);
    auto r1 = make_rng(42), r2 = make_rng(42), r3 = make_rng(43);
    Eigen::MatrixXd a = sample_design(n, p, sigma, DesignScale::unit, r1);
    Eigen::MatrixXd b = sample_design(n, p, sigma, DesignScale::unit, r2);
    Eigen::MatrixXd c = sample_design(n, p, sigma, DesignScale::unit, r3);
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("unit-scale design has approximately the target covariance") {
    int n = 20000, p = 3;
    double r = 0.5;
    auto rng = make_rng(7);
    Eigen::MatrixXd sigma = make_covariance({CovKind::toeplitz, r}, p);
    Eigen::MatrixXd X = sample_design(n, p, sigma, DesignScale::unit, rng);
    Eigen::MatrixXd shat = X.transpose() * X / n;
    CHECK((shat - sigma).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("coefficients: support size, magnitudes, sign balance") {
    SignalSpec fixed{4, MagnitudeMode::fixed, 2.5};
    auto rng = make_rng(11);
    Coefficients c = sample_coefficients(10, fixed, rng);
    CHECK(c.s1.size() == 4);
    CHECK(std::is_sorted(c.s1.begin(), c.s1.end()));
    int nonzero = 0;
    for (int j = 0; j < 10; ++j)
        if (c.beta[j] != 0.0) {
            ++nonzero;
            CHECK(std::abs(c.beta[j]) == doctest::Approx(2.5).epsilon(1e-15));
        }
    CHECK(nonzero == 4);
    for (int j : c.s1) CHECK(c.beta[j] != 0.0);

    // Signs are i.i.d. fair coin flips over the support.
    int pos = 0, total = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        Coefficients ck = sample_coefficients(10, fixed, rng);
        for (int j : ck.s1) {
            ++total;
            if (ck.beta[j] > 0) ++pos;
        }
    }
    double frac = static_cast<double>(pos) / total;
    CHECK(frac > 0.4);
    CHECK(frac < 0.6);
}

TEST_CASE("gaussian magnitude mode draws nonconstant magnitudes") {
    SignalSpec g{5, MagnitudeMode::gaussian, 3.0};
    auto rng = make_rng(13);
    Coefficients c = sample_coefficients(12, g, rng);
    CHECK(c.s1.size() == 5);
    double first = std::abs(c.beta[c.s1[0]]);
    bool varies = false;
    for (int j : c.s1)
        if (std::abs(std::abs(c.beta[j]) - first) > 1e-12) varies = true;
    CHECK(varies);
}

TEST_CASE("p1 = 0 gives the zero vector") {
    auto rng = make_rng(1);
    Coefficients c = sample_coefficients(6, {0, MagnitudeMode::fixed, 5.0}, rng);
    CHECK(c.beta.cwiseAbs().maxCoeff() == 0.0);
    CHECK(c.s1.empty());
}

TEST_CASE("responses stay in the family support") {
    int n = 200, p = 4;
    auto rng = make_rng(5);
    Eigen::MatrixXd sigma = make_covariance({CovKind::identity}, p);
    Eigen::MatrixXd X = sample_design(n, p, sigma, DesignScale::unit, rng);
    Eigen::VectorXd beta = Eigen::VectorXd::Constant(p, 1.0);

    for (GlmFamily fam : {GlmFamily::gaussian(), GlmFamily::logistic(),
                          GlmFamily::poisson(), GlmFamily::negative_binomial(2.0)}) {
        Eigen::VectorXd y = sample_response(X, beta, fam, rng);
        REQUIRE(y.size() == n);
        for (int i = 0; i < n; ++i) CHECK(fam.in_support(y[i]));
    }
}

TEST_CASE("gaussian response has unit noise variance around X beta") {
    int n = 20000, p = 2;
    auto rng = make_rng(9);
    Eigen::MatrixXd sigma = make_covariance({CovKind::identity}, p);
    Eigen::MatrixXd X = sample_design(n, p, sigma, DesignScale::unit, rng);
    Eigen::VectorXd beta = Eigen::VectorXd::Constant(p, 0.5);
    Eigen::VectorXd y = sample_response(X, beta, GlmFamily::gaussian(), rng);
    Eigen::VectorXd eps = y - X * beta;
    double var = eps.squaredNorm() / n;
    CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("covariance_from_name parses and rejects") {
    CHECK(covariance_from_name("identity", 0, 1).kind == CovKind::identity);
    CHECK(covariance_from_name("toeplitz", 0.2, 1).kind == CovKind::toeplitz);
    CHECK(covariance_from_name("constant", 0.2, 1).kind == CovKind::constant);
    CHECK(covariance_from_name("blockwise_toeplitz", 0.2, 5).blocks == 5);
    CHECK(covariance_from_name("constant_partial", 0.2, 1).kind == CovKind::constant_partial);
    CHECK(covariance_from_name("toeplitz_partial", 0.2, 1).kind == CovKind::toeplitz_partial);
    CHECK_THROWS(covariance_from_name("wishart", 0.2, 1));
}
