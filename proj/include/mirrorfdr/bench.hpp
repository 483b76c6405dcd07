#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mirrorfdr/datagen.hpp"
#include "mirrorfdr/mirror.hpp"

namespace mirrorfdr {

enum class Method { ds, mds, gm, bhq_mle, bhq_debiased };
enum class Regime { moderate, high };

Method method_from_name(const std::string& name);
const char* method_name(Method m);
Regime regime_from_name(const std::string& name);

struct Scenario {
    std::string name;
    int n = 0, p = 0, p1 = 0;
    GlmFamily family;
    CovarianceSpec covariance;
    SignalSpec signal;
    double q = 0.1;
    Method method = Method::ds;
    int m = 50;  // MDS splits
    int reps = 20;
    std::uint64_t seed = 0;
    Regime regime = Regime::moderate;
    std::optional<DesignScale> scale;  // default: inv_n moderate, unit high
    SelectorOptions selector;
    FChoice f_choice = FChoice::product;

    DesignScale effective_scale() const {
        return scale ? *scale
                     : (regime == Regime::moderate ? DesignScale::inv_n : DesignScale::unit);
    }
    void validate() const;
};

struct RepRecord {
    int rep = 0;
    double fdp = 0.0;
    std::optional<double> power;  // none when p1 = 0
    int selected = 0;
    double runtime_sec = 0.0;
    bool skipped = false;
    std::string reason;
};

struct BenchResult {
    Scenario scenario;
    std::vector<RepRecord> per_rep;  // completed reps only
    double fdr = 0.0;
    double power = 0.0;
    double mc_se_fdr = 0.0;
    double mc_se_power = 0.0;
    int skipped = 0;
    bool unreliable = false;  // > 20% of reps skipped
};

// One replication: substream rng from (seed, rep), generate data, run the
// method, score. Deterministic given (scenario, rep).
RepRecord run_replication(const Scenario& sc, int rep);

// Full grid under a fan-out contract; per-rep failures become skip records.
std::vector<BenchResult> run_bench(const std::vector<Scenario>& grid,
                                   Exec exec = Exec::parallel);

// CSV schema: scenario columns + fdr, power, mc_se_fdr, mc_se_power, skipped
std::string bench_csv(const std::vector<BenchResult>& results);

}  // namespace mirrorfdr
