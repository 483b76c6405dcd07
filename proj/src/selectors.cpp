#include <cmath>
#include <exception>
#include <stdexcept>

#include "mirrorfdr/debias.hpp"
#include "mirrorfdr/mirror.hpp"
#include "mirrorfdr/mle.hpp"
#include "mirrorfdr/rng.hpp"

namespace mirrorfdr {

namespace {

// stream tags for substream derivation
constexpr std::uint64_t kStreamSplit = 1;
constexpr std::uint64_t kStreamGm = 2;
constexpr std::uint64_t kStreamLambda = 3;
constexpr std::uint64_t kStreamMds = 4;

Eigen::VectorXd tau_sq_moderate(const Eigen::MatrixXd& X, int denominator,
                                const SelectorOptions& opts) {
    if (!opts.tau_from_sample_inverse)
        return node_wise_ols_tau(X, denominator, opts.exec);
    // Remark-3 alternative: 1 / (X'X/n)^{-1}_jj
    const double n = static_cast<double>(X.rows());
    Eigen::MatrixXd cov = X.transpose() * X / n;
    Eigen::MatrixXd inv = cov.ldlt().solve(Eigen::MatrixXd::Identity(X.cols(), X.cols()));
    Eigen::VectorXd tau(X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        if (inv(j, j) <= 0) throw std::runtime_error("tau_nonpositive at feature " +
                                                     std::to_string(j + 1));
        tau[j] = 1.0 / inv(j, j);
    }
    return tau;
}

double node_theory_c(const SelectorOptions& opts) {
    return opts.lambda_node.kind == LambdaRule::Kind::theory ? opts.lambda_node.c : 1.0;
}

// normalized debiased-Lasso estimates for one half of the data
Eigen::VectorXd high_dim_t(const Dataset& half, const SelectorOptions& opts, double lambda) {
    LassoFit lasso = fit_lasso(half, lambda);
    NodewiseOptions nw;
    nw.theory_c = node_theory_c(opts);
    nw.exec = opts.exec;
    DebiasedFit deb;
    if (half.family.kind == Family::gaussian) {
        PrecisionEstimate prec = node_wise_precision(half.X, nw);
        deb = debias_linear(half.X, half.y, lasso, prec);
    } else {
        Eigen::VectorXd eta = half.X * lasso.beta_hat;
        Eigen::VectorXd w(half.n());
        for (Eigen::Index i = 0; i < half.n(); ++i)
            w[i] = std::sqrt(std::max(half.family.eval(half.y[i], eta[i]).ddot, 1e-10));
        Eigen::MatrixXd Xw = w.asDiagonal() * half.X;
        nw.cross_with_raw = opts.nodewise_cross_with_raw;
        PrecisionEstimate prec = node_wise_precision(Xw, nw, &half.X);
        deb = debias_glm(half, lasso, prec);
    }
    return deb.beta_d.cwiseQuotient(deb.sigma_hat);
}

MirrorResult ds_high(const Dataset& data, const MirrorConfig& cfg,
                     const SelectorOptions& opts) {
    auto rng = make_rng(cfg.seed, kStreamSplit);
    SplitPair sp = split_data(data, rng);

    double lambda1, lambda2;
    {
        auto lrng1 = make_rng(cfg.seed, kStreamLambda, 1);
        lambda1 = select_lambda(sp.part1, opts.lambda_main, lrng1);
        if (opts.freeze_lambda_across_splits) {
            lambda2 = lambda1;
        } else {
            auto lrng2 = make_rng(cfg.seed, kStreamLambda, 2);
            lambda2 = select_lambda(sp.part2, opts.lambda_main, lrng2);
        }
    }

    Eigen::VectorXd t1 = high_dim_t(sp.part1, opts, lambda1);
    Eigen::VectorXd t2 = high_dim_t(sp.part2, opts, lambda2);
    MirrorResult res = select_from_mirror(mirror_statistics(t1, t2, cfg.f_choice), cfg.q);
    res.t1 = t1;
    res.t2 = t2;
    return res;
}

}  // namespace

MirrorResult ds_moderate(const Dataset& data, const MirrorConfig& cfg,
                         const SelectorOptions& opts) {
    data.validate();
    const int n = static_cast<int>(data.n());
    const int p = static_cast<int>(data.p());
    if (n / 2 <= p) throw std::runtime_error("insufficient_samples");

    auto rng = make_rng(cfg.seed, kStreamSplit);
    SplitPair sp = split_data(data, rng);

    auto half_t = [&](const Dataset& half) {
        int nk = static_cast<int>(half.n());
        Eigen::VectorXd tau_sq = tau_sq_moderate(half.X, nk - p + 1, opts);
        MleFit fit = fit_mle(half);
        return (tau_sq.array().sqrt() * fit.beta_hat.array()).matrix().eval();
    };
    Eigen::VectorXd t1 = half_t(sp.part1);
    Eigen::VectorXd t2 = half_t(sp.part2);

    MirrorResult res = select_from_mirror(mirror_statistics(t1, t2, cfg.f_choice), cfg.q);
    res.t1 = t1;
    res.t2 = t2;
    return res;
}

MirrorResult gm_moderate(const Dataset& data, const MirrorConfig& cfg,
                         const SelectorOptions& opts) {
    data.validate();
    const int n = static_cast<int>(data.n());
    const int p = static_cast<int>(data.p());
    if (n <= p + 1) throw std::runtime_error("insufficient_samples");

    Eigen::VectorXd tau_sq = tau_sq_moderate(data.X, n - p + 1, opts);

    Eigen::VectorXd tplus = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd tminus = Eigen::VectorXd::Zero(p);
    std::vector<int> failed(p, 0);

    auto per_feature = [&](int j) {
        auto rng = make_rng(cfg.seed, kStreamGm, static_cast<std::uint64_t>(j));
        std::normal_distribution<double> normal(0.0, 1.0);
        Eigen::VectorXd z(n);
        for (int i = 0; i < n; ++i) z[i] = normal(rng);

        Eigen::VectorXd xj = data.X.col(j);
        double c;
        Eigen::MatrixXd aug(n, p + 1);
        if (p == 1) {
            c = xj.norm() / z.norm();
        } else {
            Eigen::MatrixXd Xmj(n, p - 1);
            Xmj.leftCols(j) = data.X.leftCols(j);
            Xmj.rightCols(p - 1 - j) = data.X.rightCols(p - 1 - j);
            Eigen::HouseholderQR<Eigen::MatrixXd> qr(Xmj);
            Eigen::MatrixXd thinQ =
                qr.householderQ() * Eigen::MatrixXd::Identity(n, p - 1);
            Eigen::VectorXd rx = xj - thinQ * (thinQ.transpose() * xj);
            Eigen::VectorXd rz = z - thinQ * (thinQ.transpose() * z);
            c = rx.norm() / rz.norm();
            aug.leftCols(j) = data.X.leftCols(j);
            aug.middleCols(j, p - 1 - j) = data.X.rightCols(p - 1 - j);
        }
        aug.col(p - 1) = xj + c * z;
        aug.col(p) = xj - c * z;

        Dataset augmented{aug, data.y, data.family};
        MleFit fit = fit_mle(augmented);
        double scale = std::sqrt(tau_sq[j] + c * c);
        tplus[j] = scale * fit.beta_hat[p - 1];
        tminus[j] = scale * fit.beta_hat[p];
    };

    // per-feature failures are absorbed as M_j = 0, not fatal
    if (opts.exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int j = 0; j < p; ++j) {
            try {
                per_feature(j);
            } catch (...) {
                failed[j] = 1;
            }
        }
    } else {
        for (int j = 0; j < p; ++j) {
            try {
                per_feature(j);
            } catch (...) {
                failed[j] = 1;
            }
        }
    }
    for (int j = 0; j < p; ++j)
        if (failed[j]) {
            tplus[j] = 0.0;
            tminus[j] = 0.0;
        }

    MirrorResult res =
        select_from_mirror(mirror_statistics(tplus, tminus, cfg.f_choice), cfg.q);
    res.t1 = tplus;
    res.t2 = tminus;
    for (int j = 0; j < p; ++j) res.warnings += failed[j];
    return res;
}

MirrorResult ds_high_linear(const Dataset& data, const MirrorConfig& cfg,
                            const SelectorOptions& opts) {
    data.validate();
    if (data.family.kind != Family::gaussian)
        throw std::invalid_argument("ds_high_linear: gaussian family required");
    return ds_high(data, cfg, opts);
}

MirrorResult ds_high_glm(const Dataset& data, const MirrorConfig& cfg,
                         const SelectorOptions& opts) {
    data.validate();
    return ds_high(data, cfg, opts);
}

MdsResult mds(const Dataset& data, BaseSelector base, int m, const MirrorConfig& cfg,
              const SelectorOptions& opts) {
    if (m < 1) throw std::invalid_argument("mds: m must be >= 1");
    std::vector<std::vector<int>> per_split(m);
    std::vector<int> ok(m, 0);

    auto run_one = [&](int k) {
        MirrorConfig sub = cfg;
        sub.seed = splitmix64(splitmix64(cfg.seed) + kStreamMds * 0x100000000ULL +
                              static_cast<std::uint64_t>(k));
        SelectorOptions inner = opts;
        inner.exec = Exec::serial;  // the split fan-out owns the threads
        MirrorResult r;
        switch (base) {
            case BaseSelector::ds_moderate: r = ds_moderate(data, sub, inner); break;
            case BaseSelector::ds_high_linear: r = ds_high_linear(data, sub, inner); break;
            case BaseSelector::ds_high_glm: r = ds_high_glm(data, sub, inner); break;
        }
        per_split[k] = r.selected;
        ok[k] = 1;
    };

    if (opts.exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int k = 0; k < m; ++k) {
            try {
                run_one(k);
            } catch (...) {
                ok[k] = 0;
            }
        }
    } else {
        for (int k = 0; k < m; ++k) {
            try {
                run_one(k);
            } catch (...) {
                ok[k] = 0;
            }
        }
    }

    MdsResult out;
    out.inclusion.per_split.clear();
    for (int k = 0; k < m; ++k)
        if (ok[k]) out.inclusion.per_split.push_back(per_split[k]);
    int m_eff = static_cast<int>(out.inclusion.per_split.size());
    out.inclusion.m = m_eff;
    if (m_eff == 0) throw std::runtime_error("mds: every split failed");

    const Eigen::Index p = data.p();
    Eigen::VectorXd rates = Eigen::VectorXd::Zero(p);
    for (const auto& sel : out.inclusion.per_split) {
        double w = 1.0 / (static_cast<double>(std::max<size_t>(sel.size(), 1)) * m_eff);
        for (int j : sel) rates[j] += w;
    }
    out.inclusion.rates = rates;

    AggregateDetail agg = aggregate_inclusion_detail(rates, cfg.q);
    out.result.mirror = rates;
    out.result.selected = agg.selected;
    out.result.cutoff = agg.threshold;
    out.result.fdp_hat = agg.threshold ? std::optional<double>(agg.cum) : std::nullopt;
    out.result.warnings = m - m_eff;
    return out;
}

}  // namespace mirrorfdr
