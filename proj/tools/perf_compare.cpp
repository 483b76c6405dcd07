// Timing harness: serial reference kernels vs their OpenMP counterparts.
// Verifies bitwise agreement before reporting speedups.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include <omp.h>

#include "mirrorfdr/bench.hpp"
#include "mirrorfdr/nodewise.hpp"
#include "mirrorfdr/rng.hpp"

using namespace mirrorfdr;

namespace {

double now_sec() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

template <typename F>
double time_best_of(int trials, F&& f) {
    double best = 1e300;
    for (int t = 0; t < trials; ++t) {
        double t0 = now_sec();
        f();
        best = std::min(best, now_sec() - t0);
    }
    return best;
}

void report(const char* kernel, double serial_s, double parallel_s, bool match) {
    std::printf("%-24s serial %8.3fs  parallel %8.3fs  speedup %5.2fx  %s\n", kernel,
                serial_s, parallel_s, serial_s / parallel_s,
                match ? "results match" : "RESULTS DIFFER");
}

}  // namespace

int main(int argc, char** argv) {
    int scale = argc > 1 ? std::atoi(argv[1]) : 1;
    if (scale < 1) scale = 1;
    std::printf("threads: %d, scale: %d\n", omp_get_max_threads(), scale);
    bool all_match = true;

    {   // node-wise precision (lasso per column)
        int n = 300 * scale, p = 200;
        auto rng = make_rng(11, 0, 0);
        Eigen::MatrixXd sigma = make_covariance({CovKind::toeplitz, 0.5}, p);
        Eigen::MatrixXd X = sample_design(n, p, sigma, DesignScale::unit, rng);
        NodewiseOptions ser, par;
        ser.exec = Exec::serial;
        par.exec = Exec::parallel;
        PrecisionEstimate a, b;
        double ts = time_best_of(2, [&] { a = node_wise_precision(X, ser); });
        double tp = time_best_of(2, [&] { b = node_wise_precision(X, par); });
        bool match = a.theta_hat == b.theta_hat && a.tau_sq == b.tau_sq;
        all_match &= match;
        report("node_wise_precision", ts, tp, match);
    }

    {   // node-wise OLS tau (moderate-dim variances)
        int n = 800 * scale, p = 150;
        auto rng = make_rng(12, 0, 0);
        Eigen::MatrixXd sigma = make_covariance({CovKind::constant, 0.3}, p);
        Eigen::MatrixXd X = sample_design(n, p, sigma, DesignScale::inv_n, rng);
        Eigen::VectorXd a, b;
        double ts = time_best_of(3, [&] { a = node_wise_ols_tau(X, n - p + 1, Exec::serial); });
        double tp = time_best_of(3, [&] { b = node_wise_ols_tau(X, n - p + 1, Exec::parallel); });
        bool match = a == b;
        all_match &= match;
        report("node_wise_ols_tau", ts, tp, match);
    }

    {   // Gaussian mirror (one perturbed MLE per feature)
        int n = 400 * scale, p = 60;
        auto rng = make_rng(13, 0, 0);
        Eigen::MatrixXd sigma = make_covariance({CovKind::identity}, p);
        Eigen::MatrixXd X = sample_design(n, p, sigma, DesignScale::inv_n, rng);
        SignalSpec sig{10, MagnitudeMode::fixed, 4.0};
        Coefficients coef = sample_coefficients(p, sig, rng);
        GlmFamily fam = GlmFamily::gaussian();
        Eigen::VectorXd y = sample_response(X, coef.beta, fam, rng);
        Dataset data{X, y, fam};
        MirrorConfig cfg{0.1, FChoice::product, 21};
        SelectorOptions ser, par;
        ser.exec = Exec::serial;
        par.exec = Exec::parallel;
        MirrorResult a, b;
        double ts = time_best_of(2, [&] { a = gm_moderate(data, cfg, ser); });
        double tp = time_best_of(2, [&] { b = gm_moderate(data, cfg, par); });
        bool match = a.mirror == b.mirror && a.selected == b.selected;
        all_match &= match;
        report("gm_moderate", ts, tp, match);
    }

    {   // Monte Carlo bench fan-out
        Scenario sc;
        sc.name = "perf";
        sc.n = 500 * scale;
        sc.p = 80;
        sc.p1 = 15;
        sc.family = GlmFamily::logistic();
        sc.covariance = {CovKind::toeplitz, 0.4};
        sc.signal = {15, MagnitudeMode::fixed, 6.0};
        sc.method = Method::ds;
        sc.reps = 16;
        sc.seed = 99;
        std::vector<BenchResult> a, b;
        double ts = time_best_of(1, [&] { a = run_bench({sc}, Exec::serial); });
        double tp = time_best_of(1, [&] { b = run_bench({sc}, Exec::parallel); });
        bool match = a.size() == b.size() && a[0].fdr == b[0].fdr && a[0].power == b[0].power;
        all_match &= match;
        report("run_bench", ts, tp, match);
    }

    return all_match ? 0 : 1;
}
