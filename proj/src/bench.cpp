#include "mirrorfdr/bench.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mirrorfdr/baselines.hpp"
#include "mirrorfdr/debias.hpp"
#include "mirrorfdr/mle.hpp"
#include "mirrorfdr/rng.hpp"

namespace mirrorfdr {

Method method_from_name(const std::string& name) {
    if (name == "ds") return Method::ds;
    if (name == "mds") return Method::mds;
    if (name == "gm") return Method::gm;
    if (name == "bhq-mle" || name == "bhq_mle") return Method::bhq_mle;
    if (name == "bhq-debiased" || name == "bhq_debiased") return Method::bhq_debiased;
    throw std::invalid_argument("unknown method: " + name);
}

const char* method_name(Method m) {
    switch (m) {
        case Method::ds: return "ds";
        case Method::mds: return "mds";
        case Method::gm: return "gm";
        case Method::bhq_mle: return "bhq-mle";
        case Method::bhq_debiased: return "bhq-debiased";
    }
    return "?";
}

Regime regime_from_name(const std::string& name) {
    if (name == "moderate") return Regime::moderate;
    if (name == "high") return Regime::high;
    throw std::invalid_argument("unknown regime: " + name);
}

void Scenario::validate() const {
    if (n < 1 || p < 1 || p1 < 0 || p1 > p) throw std::invalid_argument("scenario: bad n/p/p1");
    if (q <= 0.0 || q >= 1.0) throw std::invalid_argument("scenario: q must lie in (0,1)");
    if (reps < 1) throw std::invalid_argument("scenario: reps must be >= 1");
    if (method == Method::mds && m < 1) throw std::invalid_argument("scenario: m must be >= 1");
    bool needs_moderate = method == Method::gm || method == Method::bhq_mle;
    if (needs_moderate && (regime != Regime::moderate || n <= p))
        throw std::invalid_argument("scenario: gm/bhq-mle require moderate regime with n > p");
    if (regime == Regime::moderate && method == Method::ds && n / 2 <= p)
        throw std::invalid_argument("scenario: moderate ds requires n/2 > p");
}

namespace {

constexpr std::uint64_t kStreamData = 100;

std::vector<int> run_method(const Scenario& sc, const Dataset& data,
                            const MirrorConfig& cfg) {
    switch (sc.method) {
        case Method::ds:
            if (sc.regime == Regime::moderate) return ds_moderate(data, cfg, sc.selector).selected;
            return ds_high_glm(data, cfg, sc.selector).selected;
        case Method::mds: {
            BaseSelector base = sc.regime == Regime::moderate ? BaseSelector::ds_moderate
                                                              : BaseSelector::ds_high_glm;
            SelectorOptions opts = sc.selector;
            return mds(data, base, sc.m, cfg, opts).result.selected;
        }
        case Method::gm:
            return gm_moderate(data, cfg, sc.selector).selected;
        case Method::bhq_mle: {
            MleFit fit = fit_mle(data);
            PvalueReport rep = wald_pvalues_mle(data, fit);
            return benjamini_hochberg(rep.pvals, sc.q);
        }
        case Method::bhq_debiased: {
            auto lrng = make_rng(cfg.seed, 7);
            double lambda = select_lambda(data, sc.selector.lambda_main, lrng);
            LassoFit lasso = fit_lasso(data, lambda);
            NodewiseOptions nw;
            nw.exec = sc.selector.exec;
            DebiasedFit deb;
            if (data.family.kind == Family::gaussian) {
                PrecisionEstimate prec = node_wise_precision(data.X, nw);
                deb = debias_linear(data.X, data.y, lasso, prec);
            } else {
                Eigen::VectorXd eta = data.X * lasso.beta_hat;
                Eigen::VectorXd w(data.n());
                for (Eigen::Index i = 0; i < data.n(); ++i)
                    w[i] = std::sqrt(std::max(data.family.eval(data.y[i], eta[i]).ddot, 1e-10));
                Eigen::MatrixXd Xw = w.asDiagonal() * data.X;
                PrecisionEstimate prec = node_wise_precision(Xw, nw, &data.X);
                deb = debias_glm(data, lasso, prec);
            }
            PvalueReport rep = wald_pvalues_debiased(deb, static_cast<int>(data.n()));
            return benjamini_hochberg(rep.pvals, sc.q);
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace

RepRecord run_replication(const Scenario& sc, int rep) {
    RepRecord rec;
    rec.rep = rep;
    auto start = std::chrono::steady_clock::now();
    try {
        auto rng = make_rng(sc.seed, kStreamData, static_cast<std::uint64_t>(rep));
        Eigen::MatrixXd sigma = make_covariance(sc.covariance, sc.p);
        Eigen::MatrixXd X = sample_design(sc.n, sc.p, sigma, sc.effective_scale(), rng);
        Coefficients coef = sample_coefficients(sc.p, sc.signal, rng);
        Eigen::VectorXd y = sample_response(X, coef.beta, sc.family, rng);
        Dataset data{X, y, sc.family};

        MirrorConfig cfg;
        cfg.q = sc.q;
        cfg.f_choice = sc.f_choice;
        cfg.seed = splitmix64(splitmix64(sc.seed) + static_cast<std::uint64_t>(rep) + 17);

        std::vector<int> selected = run_method(sc, data, cfg);
        auto [fdp, power] = fdp_power(selected, coef.s1, sc.p1);
        rec.fdp = fdp;
        rec.power = sc.p1 > 0 ? std::optional<double>(power) : std::nullopt;
        rec.selected = static_cast<int>(selected.size());
    } catch (const std::exception& e) {
        rec.skipped = true;
        rec.reason = e.what();
    }
    rec.runtime_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

namespace {

double sample_sd(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (xs.size() - 1));
}

BenchResult aggregate(const Scenario& sc, std::vector<RepRecord> recs) {
    BenchResult out;
    out.scenario = sc;
    std::vector<double> fdps, powers;
    for (auto& r : recs) {
        if (r.skipped) {
            ++out.skipped;
            continue;
        }
        fdps.push_back(r.fdp);
        if (r.power) powers.push_back(*r.power);
        out.per_rep.push_back(std::move(r));
    }
    if (!fdps.empty()) {
        out.fdr = 0.0;
        for (double f : fdps) out.fdr += f;
        out.fdr /= fdps.size();
        out.mc_se_fdr = sample_sd(fdps, out.fdr) / std::sqrt(static_cast<double>(fdps.size()));
    }
    if (!powers.empty()) {
        out.power = 0.0;
        for (double pw : powers) out.power += pw;
        out.power /= powers.size();
        out.mc_se_power =
            sample_sd(powers, out.power) / std::sqrt(static_cast<double>(powers.size()));
    }
    out.unreliable = out.skipped * 5 > sc.reps;  // > 20% skipped
    return out;
}

}  // namespace

std::vector<BenchResult> run_bench(const std::vector<Scenario>& grid, Exec exec) {
    if (grid.empty()) throw std::invalid_argument("run_bench: empty grid");
    for (const auto& sc : grid) sc.validate();

    std::vector<BenchResult> results;
    results.reserve(grid.size());
    for (const auto& sc : grid) {
        std::vector<RepRecord> recs(sc.reps);
        if (exec == Exec::parallel) {
            Scenario inner = sc;
            inner.selector.exec = Exec::serial;  // reps own the threads
#pragma omp parallel for schedule(dynamic)
            for (int r = 0; r < sc.reps; ++r) recs[r] = run_replication(inner, r);
        } else {
            for (int r = 0; r < sc.reps; ++r) recs[r] = run_replication(sc, r);
        }
        results.push_back(aggregate(sc, std::move(recs)));
    }
    return results;
}

std::string bench_csv(const std::vector<BenchResult>& results) {
    std::ostringstream os;
    os.precision(12);
    os << "name,method,regime,family,n,p,p1,covariance,r,signal_mode,signal,q,reps,seed,"
          "fdr,power,mc_se_fdr,mc_se_power,skipped,unreliable\n";
    for (const auto& res : results) {
        const Scenario& sc = res.scenario;
        os << sc.name << ',' << method_name(sc.method) << ','
           << (sc.regime == Regime::moderate ? "moderate" : "high") << ','
           << sc.family.name() << ',' << sc.n << ',' << sc.p << ',' << sc.p1 << ','
           << sc.covariance.name() << ',' << sc.covariance.r << ','
           << (sc.signal.mode == MagnitudeMode::fixed ? "fixed" : "gaussian") << ','
           << sc.signal.value << ',' << sc.q << ',' << sc.reps << ',' << sc.seed << ','
           << res.fdr << ',' << res.power << ',' << res.mc_se_fdr << ','
           << res.mc_se_power << ',' << res.skipped << ',' << (res.unreliable ? 1 : 0)
           << '\n';
    }
    return os.str();
}

}  // namespace mirrorfdr
