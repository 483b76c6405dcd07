#include "mirrorfdr/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mirrorfdr {

namespace {

// 2 (1 - Phi(|z|)) = erfc(|z| / sqrt(2))
double two_sided_pvalue(double z) {
    return std::erfc(std::abs(z) / std::sqrt(2.0));
}

}  // namespace

PvalueReport wald_pvalues_mle(const Dataset& data, const MleFit& fit) {
    if (!fit.converged) throw std::invalid_argument("wald_pvalues_mle: fit not converged");
    const Eigen::Index n = data.n();
    const Eigen::Index p = data.p();
    Eigen::VectorXd eta = data.X * fit.beta_hat;
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i)
        w[i] = std::max(data.family.fisher_weight(eta[i]), 1e-10);
    Eigen::MatrixXd info = data.X.transpose() * w.asDiagonal() * data.X;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    if (ldlt.info() != Eigen::Success ||
        ldlt.vectorD().minCoeff() <= ldlt.vectorD().maxCoeff() * 1e-14)
        throw std::runtime_error("wald_pvalues_mle: singular information matrix");
    Eigen::MatrixXd inv = ldlt.solve(Eigen::MatrixXd::Identity(p, p));

    PvalueReport rep;
    rep.method = "bhq_mle";
    rep.zscores.resize(p);
    rep.pvals.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        double se = std::sqrt(inv(j, j));
        rep.zscores[j] = fit.beta_hat[j] / se;
        rep.pvals[j] = two_sided_pvalue(rep.zscores[j]);
    }
    return rep;
}

PvalueReport wald_pvalues_debiased(const DebiasedFit& fit, int n) {
    if ((fit.sigma_hat.array() <= 0).any())
        throw std::invalid_argument("wald_pvalues_debiased: nonpositive sigma_hat");
    PvalueReport rep;
    rep.method = "bhq_debiased";
    rep.zscores = std::sqrt(static_cast<double>(n)) *
                  fit.beta_d.cwiseQuotient(fit.sigma_hat);
    rep.pvals.resize(rep.zscores.size());
    for (Eigen::Index j = 0; j < rep.zscores.size(); ++j)
        rep.pvals[j] = two_sided_pvalue(rep.zscores[j]);
    return rep;
}

std::vector<int> benjamini_hochberg(const Eigen::VectorXd& pvals, double q) {
    if (q <= 0.0 || q >= 1.0) throw std::invalid_argument("benjamini_hochberg: q in (0,1)");
    const Eigen::Index p = pvals.size();
    for (Eigen::Index j = 0; j < p; ++j)
        if (pvals[j] < 0.0 || pvals[j] > 1.0)
            throw std::invalid_argument("benjamini_hochberg: p-value outside [0,1]");
    std::vector<int> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return pvals[a] < pvals[b]; });
    int kstar = 0;
    for (int k = 1; k <= p; ++k)
        if (pvals[order[k - 1]] <= static_cast<double>(k) * q / static_cast<double>(p))
            kstar = k;
    std::vector<int> rejected;
    if (kstar > 0) {
        double cut = pvals[order[kstar - 1]];
        for (Eigen::Index j = 0; j < p; ++j)
            if (pvals[j] <= cut) rejected.push_back(static_cast<int>(j));
    }
    std::sort(rejected.begin(), rejected.end());
    return rejected;
}

}  // namespace mirrorfdr
