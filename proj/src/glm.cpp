#include "mirrorfdr/glm.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace mirrorfdr {

namespace {

// log(1 + e^v) without overflow
double log1pexp(double v) {
    if (v > 0) return v + std::log1p(std::exp(-v));
    return std::log1p(std::exp(v));
}

// log(r + e^v) without overflow
double log_r_plus_exp(double r, double v) {
    double lr = std::log(r);
    return lr + log1pexp(v - lr);
}

}  // namespace

LossEval GlmFamily::eval(double y, double v) const {
    if (!std::isfinite(v)) throw std::domain_error("loss_eval: non-finite linear predictor");
    if (!in_support(y)) throw std::domain_error("loss_eval: response outside family support");
    switch (kind) {
        case Family::gaussian:
            return {-y * v + 0.5 * v * v, v - y, 1.0};
        case Family::logistic: {
            double s = 1.0 / (1.0 + std::exp(-v));  // sigma(v)
            return {-y * v + log1pexp(v), s - y, s * (1.0 - s)};
        }
        case Family::poisson: {
            double ev = std::exp(v);
            return {-y * v + ev, ev - y, ev};
        }
        case Family::negative_binomial: {
            double r = dispersion;
            // s = e^v / (r + e^v), evaluated stably; note s(1-s) = r e^v/(r+e^v)^2
            double s = 1.0 / (1.0 + r * std::exp(-v));
            double loss = -y * v + (y + r) * log_r_plus_exp(r, v);
            double dot = -y + (y + r) * s;
            double ddot = (y + r) * s * (1.0 - s);
            return {loss, dot, ddot};
        }
    }
    throw std::logic_error("unreachable");
}

double GlmFamily::fisher_weight(double v) const {
    if (!std::isfinite(v)) throw std::domain_error("fisher_weight: non-finite linear predictor");
    switch (kind) {
        case Family::gaussian:
            return 1.0;
        case Family::logistic: {
            double s = 1.0 / (1.0 + std::exp(-v));
            return s * (1.0 - s);
        }
        case Family::poisson:
            return std::exp(v);
        case Family::negative_binomial: {
            // mu*r/(mu+r) with mu = e^v, computed without overflow
            double r = dispersion;
            return r / (1.0 + r * std::exp(-v));
        }
    }
    throw std::logic_error("unreachable");
}

bool GlmFamily::in_support(double y) const {
    switch (kind) {
        case Family::gaussian:
            return std::isfinite(y);
        case Family::logistic:
            return y == 0.0 || y == 1.0;
        case Family::poisson:
        case Family::negative_binomial:
            return std::isfinite(y) && y >= 0.0 && y == std::floor(y);
    }
    return false;
}

const char* GlmFamily::name() const {
    switch (kind) {
        case Family::gaussian: return "gaussian";
        case Family::logistic: return "logistic";
        case Family::poisson: return "poisson";
        case Family::negative_binomial: return "negbin";
    }
    return "?";
}

GlmFamily family_from_name(const std::string& name, double dispersion) {
    if (name == "gaussian") return GlmFamily::gaussian();
    if (name == "logistic") return GlmFamily::logistic();
    if (name == "poisson") return GlmFamily::poisson();
    if (name == "negbin" || name == "negative_binomial")
        return GlmFamily::negative_binomial(dispersion);
    throw std::invalid_argument("unknown family: " + name);
}

void Dataset::validate() const {
    if (X.rows() != y.size()) throw std::invalid_argument("Dataset: X rows != y length");
    if (X.rows() < 1 || X.cols() < 1) throw std::invalid_argument("Dataset: need n >= 1, p >= 1");
    for (Eigen::Index i = 0; i < y.size(); ++i)
        if (!family.in_support(y[i]))
            throw std::domain_error("Dataset: y[" + std::to_string(i) + "] outside family support");
}

std::pair<double, double> fdp_power(const std::vector<int>& selected,
                                    const std::vector<int>& s1, int p1) {
    std::set<int> truth(s1.begin(), s1.end());
    int tp = 0;
    for (int j : selected)
        if (truth.count(j)) ++tp;
    double fdp = selected.empty()
                     ? 0.0
                     : static_cast<double>(selected.size() - tp) / static_cast<double>(selected.size());
    double power = p1 > 0 ? static_cast<double>(tp) / p1 : 0.0;
    return {fdp, power};
}

}  // namespace mirrorfdr
