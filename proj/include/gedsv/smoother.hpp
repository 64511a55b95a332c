#pragma once

#include "gedsv/filter.hpp"
#include "gedsv/model.hpp"
#include "gedsv/random.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gedsv {

/// Normal approximation N(mean, variance) to ln λ under a Gamma belief.
struct NormalMoments {
    double mean;
    double variance;
};

/// M sampled log-precision paths, stored row-major (draw, t).
struct SmoothedDraws {
    std::size_t draws = 0;
    std::size_t length = 0;
    std::vector<double> log_precision;

    double at(std::size_t draw, std::size_t t) const { return log_precision[draw * length + t]; }
    std::span<const double> path(std::size_t draw) const {
        return std::span<const double>(log_precision).subspan(draw * length, length);
    }
};

/// Per-t mean and equal-tailed 95% band of h_t = exp(-ln λ_t).
struct VolatilitySummary {
    std::vector<double> mean;
    std::vector<double> lower95;
    std::vector<double> upper95;
};

/// Mean digamma(a) - ln b and variance trigamma(a) of ln λ for λ ~ Gamma(a, b).
NormalMoments log_gamma_moments(const GammaBelief& belief);

/// Distribution of ln λ_t given ln λ_{t+1} and the filtered belief at t.
NormalMoments backward_conditional(double log_lambda_next, const GammaBelief& posterior_t,
                                   const StaticParams& params);

/// One backward-sampled path ln λ_1..ln λ_n given a completed filter pass.
std::vector<double> sample_smoothed_path(const FilterOutput& filtered, const StaticParams& params, RngStream& rng);

/// Log-density of a path under the backward factorization used by sample_smoothed_path.
double smoothed_path_log_density(std::span<const double> path, const FilterOutput& filtered,
                                 const StaticParams& params);

/// Smoothing procedure over parameter draws: path j is sampled with
/// param_draws[j % size] on its own stream (seed, j).
SmoothedDraws smooth(const ReturnSeries& series, std::span<const StaticParams> param_draws, std::size_t draws,
                     std::uint64_t seed, const GammaBelief& init = kDiffuseInitialBelief);

VolatilitySummary smoothed_volatility_summary(const SmoothedDraws& draws);

/// Linear-interpolation (type 7) sample quantile; sorts `values`.
double empirical_quantile(std::vector<double>& values, double p);

}  // namespace gedsv
