#pragma once

#include "gedsv/model.hpp"

#include <array>
#include <string>

namespace gedsv {

enum class PriorKind {
    Uniform,      ///< Uniform(p1, p2)
    Normal,       ///< Normal(mean p1, variance p2); alpha only
    ShiftedBeta,  ///< (φ + 1) / 2 ~ Beta(p1, p2); phi only
    InverseGamma, ///< InvGamma(shape p1, scale p2); sigma_eta2 only
    Gamma,        ///< Gamma(shape p1, rate p2); r only
};

/// Prior on one static parameter. Densities are normalized.
struct ParamPrior {
    PriorKind kind = PriorKind::Uniform;
    double p1 = 0.0;
    double p2 = 1.0;

    /// Support intersected with the model's parameter space for that coordinate.
    double lower = 0.0;
    double upper = 1.0;

    double log_density(double x) const;
    bool in_support(double x) const { return x > lower && x < upper; }

    static ParamPrior uniform(double lo, double hi);
    static ParamPrior normal(double mean, double variance);
    static ParamPrior shifted_beta(double a, double b);
    static ParamPrior inverse_gamma(double shape, double scale);
    static ParamPrior gamma(double shape, double rate);
};

/// Independent priors on (alpha, phi, sigma_eta2, r).
struct PriorSpec {
    std::array<ParamPrior, kParamCount> params;

    /// Vague uniforms: alpha ~ U(-1e3, 1e3), phi ~ U(0, 1), sigma_eta2 ~ U(0, 1e3), r ~ U(0, 1e3).
    static PriorSpec vague_uniform();

    void validate() const;

    /// Sum of log prior densities; -inf outside the support.
    double log_density(const StaticParams& p) const;
    bool in_support(const StaticParams& p) const;
};

std::string to_string(PriorKind kind);
PriorKind prior_kind_from_string(const std::string& name);

inline double get(const StaticParams& p, std::size_t i) {
    switch (i) {
        case 0: return p.alpha;
        case 1: return p.phi;
        case 2: return p.sigma_eta2;
        default: return p.r;
    }
}

inline void set(StaticParams& p, std::size_t i, double value) {
    switch (i) {
        case 0: p.alpha = value; break;
        case 1: p.phi = value; break;
        case 2: p.sigma_eta2 = value; break;
        default: p.r = value; break;
    }
}

inline constexpr std::array<const char*, kParamCount> kParamNames{"alpha", "phi", "sigma_eta2", "r"};

}  // namespace gedsv
