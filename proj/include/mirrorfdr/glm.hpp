#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace mirrorfdr {

enum class Family { gaussian, logistic, poisson, negative_binomial };

struct LossEval {
    double loss;
    double dot;
    double ddot;
};

// Exponential-family loss in the linear predictor v: loss(y, v) = -y*v + rho(v)
// for the canonical families; negative binomial uses the log-link loss
// -y*v + (y + r)*log(r + e^v) with known dispersion r.
struct GlmFamily {
    Family kind = Family::gaussian;
    double dispersion = 0.0;  // negative_binomial only

    static GlmFamily gaussian() { return {Family::gaussian, 0.0}; }
    static GlmFamily logistic() { return {Family::logistic, 0.0}; }
    static GlmFamily poisson() { return {Family::poisson, 0.0}; }
    static GlmFamily negative_binomial(double r) {
        if (r <= 0) throw std::invalid_argument("negative_binomial dispersion must be positive");
        return {Family::negative_binomial, r};
    }

    LossEval eval(double y, double v) const;
    // Fisher-information weight E[loss_ddot | v]: equals loss_ddot for the
    // canonical families; for the negative binomial it is mu*r/(mu+r) with
    // mu = e^v, i.e. the y-free expected curvature.
    double fisher_weight(double v) const;
    bool in_support(double y) const;
    const char* name() const;
};

GlmFamily family_from_name(const std::string& name, double dispersion);

struct Dataset {
    Eigen::MatrixXd X;  // n x p, rows = observations
    Eigen::VectorXd y;  // length n
    GlmFamily family;

    Eigen::Index n() const { return X.rows(); }
    Eigen::Index p() const { return X.cols(); }
    void validate() const;
};

// FDP = |selected \ s1| / |selected|, zero on empty selection.
// Power = |selected & s1| / p1.
std::pair<double, double> fdp_power(const std::vector<int>& selected,
                                    const std::vector<int>& s1, int p1);

}  // namespace mirrorfdr
