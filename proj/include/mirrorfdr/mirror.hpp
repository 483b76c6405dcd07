#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mirrorfdr/glm.hpp"
#include "mirrorfdr/lasso.hpp"
#include "mirrorfdr/nodewise.hpp"

namespace mirrorfdr {

enum class FChoice { min2, product, sum };

FChoice f_choice_from_name(const std::string& name);
const char* f_choice_name(FChoice f);

struct MirrorConfig {
    double q = 0.1;
    FChoice f_choice = FChoice::product;
    std::uint64_t seed = 0;
};

struct MirrorResult {
    Eigen::VectorXd mirror;            // per-feature statistics (inclusion rates for MDS)
    std::optional<double> cutoff;
    std::vector<int> selected;         // 0-based, sorted
    std::optional<double> fdp_hat;
    Eigen::VectorXd t1, t2;            // normalized estimates when available
    int warnings = 0;                  // per-feature/per-split failures absorbed
};

// M_j = sign(t1_j t2_j) f(|t1_j|, |t2_j|); sign(0) = 0.
Eigen::VectorXd mirror_statistics(const Eigen::VectorXd& t1, const Eigen::VectorXd& t2,
                                  FChoice f);

struct CutoffResult {
    std::optional<double> tau;
    std::optional<double> fdp_hat;
};

// tau_q = inf{ t > 0 : #{M_j < -t} / #{M_j > t} <= q }, zero denominator
// counting as +inf. Candidates are the distinct nonzero |M_j| plus a value
// just below the smallest (the t -> 0+ limit).
CutoffResult fdp_cutoff(const Eigen::VectorXd& M, double q);

// Applies fdp_cutoff and assembles selected = {j : M_j > tau}.
MirrorResult select_from_mirror(const Eigen::VectorXd& M, double q);

struct SplitPair {
    Dataset part1, part2;
    std::vector<int> assignment;  // 1 or 2 per original row
};

SplitPair split_data(const Dataset& data, std::mt19937_64& rng);

struct InclusionRates {
    Eigen::VectorXd rates;
    int m = 0;
    std::vector<std::vector<int>> per_split;
};

// Algorithm-2 aggregation: largest l with sorted cumulative rates <= q,
// select {j : rate_j > rate_(l)}.
std::vector<int> aggregate_inclusion(const Eigen::VectorXd& rates, double q);

struct AggregateDetail {
    std::vector<int> selected;
    std::optional<double> threshold;  // rate_(l); none when no prefix fits under q
    double cum = 0.0;                 // rate_(1) + ... + rate_(l)
    int ell = 0;
};

AggregateDetail aggregate_inclusion_detail(const Eigen::VectorXd& rates, double q);

struct SelectorOptions {
    LambdaRule lambda_main{LambdaRule::Kind::cv, 10, 1.0};
    LambdaRule lambda_node{LambdaRule::Kind::theory, 10, 1.0};
    bool tau_from_sample_inverse = false;  // moderate-dim: 1/(X'X/n)^{-1}_jj route
    bool nodewise_cross_with_raw = false;  // GLM tau cross product against raw X_j
    bool freeze_lambda_across_splits = false;
    Exec exec = Exec::parallel;
};

// Moderate-dimensional data splitting (MLE-based, T = tau_hat * beta_hat).
MirrorResult ds_moderate(const Dataset& data, const MirrorConfig& cfg,
                         const SelectorOptions& opts = {});

// Moderate-dimensional Gaussian mirror (per-feature perturbed MLE fits).
MirrorResult gm_moderate(const Dataset& data, const MirrorConfig& cfg,
                         const SelectorOptions& opts = {});

// High-dimensional data splitting, linear model (debiased Lasso).
MirrorResult ds_high_linear(const Dataset& data, const MirrorConfig& cfg,
                            const SelectorOptions& opts = {});

// High-dimensional data splitting, GLM (debiased GLM Lasso on the weighted
// design). Gaussian family dispatches to ds_high_linear.
MirrorResult ds_high_glm(const Dataset& data, const MirrorConfig& cfg,
                         const SelectorOptions& opts = {});

enum class BaseSelector { ds_moderate, ds_high_linear, ds_high_glm };

struct MdsResult {
    MirrorResult result;
    InclusionRates inclusion;
};

// Multiple data splitting: m runs of the base selector, inclusion-rate
// aggregation per Algorithm 2. Failed splits are dropped and counted.
MdsResult mds(const Dataset& data, BaseSelector base, int m, const MirrorConfig& cfg,
              const SelectorOptions& opts = {});

}  // namespace mirrorfdr
