#include "mirrorfdr/mirror.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mirrorfdr/rng.hpp"

namespace mirrorfdr {

FChoice f_choice_from_name(const std::string& name) {
    if (name == "min2") return FChoice::min2;
    if (name == "product") return FChoice::product;
    if (name == "sum") return FChoice::sum;
    throw std::invalid_argument("unknown f choice: " + name);
}

const char* f_choice_name(FChoice f) {
    switch (f) {
        case FChoice::min2: return "min2";
        case FChoice::product: return "product";
        case FChoice::sum: return "sum";
    }
    return "?";
}

Eigen::VectorXd mirror_statistics(const Eigen::VectorXd& t1, const Eigen::VectorXd& t2,
                                  FChoice f) {
    if (t1.size() != t2.size())
        throw std::invalid_argument("mirror_statistics: length mismatch");
    Eigen::VectorXd M(t1.size());
    for (Eigen::Index j = 0; j < t1.size(); ++j) {
        double prod = t1[j] * t2[j];
        double sign = prod > 0 ? 1.0 : (prod < 0 ? -1.0 : 0.0);
        double u = std::abs(t1[j]), v = std::abs(t2[j]);
        double fv = 0.0;
        switch (f) {
            case FChoice::min2: fv = 2.0 * std::min(u, v); break;
            case FChoice::product: fv = u * v; break;
            case FChoice::sum: fv = u + v; break;
        }
        M[j] = sign * fv;
    }
    return M;
}

CutoffResult fdp_cutoff(const Eigen::VectorXd& M, double q) {
    if (q <= 0.0 || q >= 1.0) throw std::invalid_argument("fdp_cutoff: q must lie in (0,1)");
    std::vector<double> mags;
    for (Eigen::Index j = 0; j < M.size(); ++j)
        if (M[j] != 0.0) mags.push_back(std::abs(M[j]));
    std::sort(mags.begin(), mags.end());
    mags.erase(std::unique(mags.begin(), mags.end()), mags.end());
    if (mags.empty()) return {};

    auto ratio_at = [&](double t) {
        int neg = 0, pos = 0;
        for (Eigen::Index j = 0; j < M.size(); ++j) {
            if (M[j] < -t) ++neg;
            if (M[j] > t) ++pos;
        }
        return pos == 0 ? std::numeric_limits<double>::infinity()
                        : static_cast<double>(neg) / pos;
    };

    // t -> 0+ first, then the distinct magnitudes ascending; FDP-hat is
    // piecewise constant between magnitudes, so this scan realizes the infimum
    double eps_candidate = mags.front() / 2.0;
    double r0 = ratio_at(0.0);
    if (r0 <= q) return {eps_candidate, r0};
    for (double t : mags) {
        double r = ratio_at(t);
        if (r <= q) return {t, r};
    }
    return {};
}

MirrorResult select_from_mirror(const Eigen::VectorXd& M, double q) {
    MirrorResult res;
    res.mirror = M;
    CutoffResult cut = fdp_cutoff(M, q);
    res.cutoff = cut.tau;
    res.fdp_hat = cut.fdp_hat;
    if (cut.tau) {
        for (Eigen::Index j = 0; j < M.size(); ++j)
            if (M[j] > *cut.tau) res.selected.push_back(static_cast<int>(j));
    }
    return res;
}

SplitPair split_data(const Dataset& data, std::mt19937_64& rng) {
    const int n = static_cast<int>(data.n());
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    int n1 = (n + 1) / 2;

    SplitPair sp;
    sp.assignment.assign(n, 2);
    for (int i = 0; i < n1; ++i) sp.assignment[perm[i]] = 1;

    auto fill = [&](Dataset& part, int tag) {
        int rows = static_cast<int>(std::count(sp.assignment.begin(), sp.assignment.end(), tag));
        part.X.resize(rows, data.p());
        part.y.resize(rows);
        part.family = data.family;
        int k = 0;
        for (int i = 0; i < n; ++i)
            if (sp.assignment[i] == tag) {
                part.X.row(k) = data.X.row(i);
                part.y[k] = data.y[i];
                ++k;
            }
    };
    fill(sp.part1, 1);
    fill(sp.part2, 2);
    return sp;
}

AggregateDetail aggregate_inclusion_detail(const Eigen::VectorXd& rates, double q) {
    const Eigen::Index p = rates.size();
    std::vector<double> sorted(rates.data(), rates.data() + p);
    std::sort(sorted.begin(), sorted.end());
    AggregateDetail out;
    double cum = 0.0;  // largest l with I_(1) + ... + I_(l) <= q
    for (Eigen::Index k = 0; k < p; ++k) {
        cum += sorted[k];
        if (cum > q) break;
        out.ell = static_cast<int>(k) + 1;
        out.cum = cum;
    }
    if (out.ell >= 1) {
        out.threshold = sorted[out.ell - 1];
        for (Eigen::Index j = 0; j < p; ++j)
            if (rates[j] > *out.threshold) out.selected.push_back(static_cast<int>(j));
    }
    return out;
}

std::vector<int> aggregate_inclusion(const Eigen::VectorXd& rates, double q) {
    return aggregate_inclusion_detail(rates, q).selected;
}

}  // namespace mirrorfdr
