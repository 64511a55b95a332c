#include "gedsv/priors.hpp"

#include "gedsv/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace gedsv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* what) {
    if (!ok) throw std::domain_error(what);
}

}  // namespace

ParamPrior ParamPrior::uniform(double lo, double hi) {
    require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, "uniform prior needs finite ordered bounds");
    return {PriorKind::Uniform, lo, hi, lo, hi};
}

ParamPrior ParamPrior::normal(double mean, double variance) {
    require(std::isfinite(mean) && variance > 0.0 && std::isfinite(variance), "normal prior needs positive variance");
    return {PriorKind::Normal, mean, variance, -kInf, kInf};
}

ParamPrior ParamPrior::shifted_beta(double a, double b) {
    require(a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b), "beta prior needs positive shapes");
    // The model restricts phi to [0, 1).
    return {PriorKind::ShiftedBeta, a, b, 0.0, 1.0};
}

ParamPrior ParamPrior::inverse_gamma(double shape, double scale) {
    require(shape > 0.0 && scale > 0.0 && std::isfinite(shape) && std::isfinite(scale),
            "inverse-gamma prior needs positive parameters");
    return {PriorKind::InverseGamma, shape, scale, 0.0, kInf};
}

ParamPrior ParamPrior::gamma(double shape, double rate) {
    require(shape > 0.0 && rate > 0.0 && std::isfinite(shape) && std::isfinite(rate),
            "gamma prior needs positive parameters");
    return {PriorKind::Gamma, shape, rate, 0.0, kInf};
}

double ParamPrior::log_density(double x) const {
    if (!in_support(x)) return -kInf;
    switch (kind) {
        case PriorKind::Uniform:
            return -std::log(p2 - p1);
        case PriorKind::Normal: {
            const double d = x - p1;
            return -0.5 * (std::log(2.0 * std::numbers::pi * p2) + d * d / p2);
        }
        case PriorKind::ShiftedBeta: {
            // Density of phi when u = (phi + 1)/2 ~ Beta(a, b); the Jacobian is 1/2.
            const double u = 0.5 * (x + 1.0);
            return (p1 - 1.0) * std::log(u) + (p2 - 1.0) * std::log1p(-u) + log_gamma(p1 + p2) - log_gamma(p1) -
                   log_gamma(p2) - std::log(2.0);
        }
        case PriorKind::InverseGamma:
            return p1 * std::log(p2) - log_gamma(p1) - (p1 + 1.0) * std::log(x) - p2 / x;
        case PriorKind::Gamma:
            return p1 * std::log(p2) - log_gamma(p1) + (p1 - 1.0) * std::log(x) - p2 * x;
    }
    return -kInf;
}

PriorSpec PriorSpec::vague_uniform() {
    return PriorSpec{{ParamPrior::uniform(-1e3, 1e3), ParamPrior::uniform(0.0, 1.0), ParamPrior::uniform(0.0, 1e3),
                      ParamPrior::uniform(0.0, 1e3)}};
}

void PriorSpec::validate() const {
    const auto& phi = params[1];
    if (phi.lower < 0.0 || phi.upper > 1.0) throw std::domain_error("phi prior support must lie within [0, 1]");
    if (params[2].lower < 0.0) throw std::domain_error("sigma_eta2 prior support must be positive");
    if (params[3].lower < 0.0) throw std::domain_error("r prior support must be positive");
    if (params[1].kind == PriorKind::Normal || params[2].kind == PriorKind::Normal ||
        params[3].kind == PriorKind::Normal) {
        throw std::domain_error("normal prior is only available for alpha");
    }
    for (const auto& p : params) {
        if (!(p.lower < p.upper)) throw std::domain_error("prior support is empty");
    }
}

bool PriorSpec::in_support(const StaticParams& p) const {
    for (std::size_t i = 0; i < kParamCount; ++i) {
        if (!params[i].in_support(get(p, i))) return false;
    }
    return true;
}

double PriorSpec::log_density(const StaticParams& p) const {
    double total = 0.0;
    for (std::size_t i = 0; i < kParamCount; ++i) {
        const double v = params[i].log_density(get(p, i));
        if (v == -kInf) return -kInf;
        total += v;
    }
    return total;
}

std::string to_string(PriorKind kind) {
    switch (kind) {
        case PriorKind::Uniform: return "uniform";
        case PriorKind::Normal: return "normal";
        case PriorKind::ShiftedBeta: return "beta";
        case PriorKind::InverseGamma: return "inverse-gamma";
        case PriorKind::Gamma: return "gamma";
    }
    return "uniform";
}

PriorKind prior_kind_from_string(const std::string& name) {
    if (name == "uniform") return PriorKind::Uniform;
    if (name == "normal") return PriorKind::Normal;
    if (name == "beta") return PriorKind::ShiftedBeta;
    if (name == "inverse-gamma") return PriorKind::InverseGamma;
    if (name == "gamma") return PriorKind::Gamma;
    throw std::invalid_argument("unknown prior kind: " + name);
}

}  // namespace gedsv
