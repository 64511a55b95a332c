#include "gedsv/smoother.hpp"

#include "gedsv/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gedsv {

namespace {

double normal_log_density(double x, double mean, double variance) {
    const double d = x - mean;
    return -0.5 * (std::log(2.0 * std::numbers::pi * variance) + d * d / variance);
}

}  // namespace

NormalMoments log_gamma_moments(const GammaBelief& belief) {
    belief.validate();
    return {digamma(belief.shape) - std::log(belief.rate), trigamma(belief.shape)};
}

NormalMoments backward_conditional(double log_lambda_next, const GammaBelief& posterior_t,
                                   const StaticParams& params) {
    if (!(params.sigma_eta2 > 0.0)) throw std::domain_error("backward_conditional: sigma_eta2 must be positive");
    const NormalMoments filtered = log_gamma_moments(posterior_t);
    const double precision = params.phi * params.phi / params.sigma_eta2 + 1.0 / filtered.variance;
    const double variance = 1.0 / precision;
    const double mean = variance * (params.phi * (log_lambda_next + params.alpha) / params.sigma_eta2 +
                                    filtered.mean / filtered.variance);
    return {mean, variance};
}

std::vector<double> sample_smoothed_path(const FilterOutput& filtered, const StaticParams& params, RngStream& rng) {
    params.validate();
    const std::size_t n = filtered.size();
    if (n == 0) throw std::domain_error("sample_smoothed_path: empty filter output");
    std::vector<double> path(n);
    const NormalMoments last = log_gamma_moments(filtered.posteriors[n - 1]);
    path[n - 1] = last.mean + std::sqrt(last.variance) * rng.normal();
    for (std::size_t t = n - 1; t-- > 0;) {
        const NormalMoments c = backward_conditional(path[t + 1], filtered.posteriors[t], params);
        path[t] = c.mean + std::sqrt(c.variance) * rng.normal();
    }
    return path;
}

double smoothed_path_log_density(std::span<const double> path, const FilterOutput& filtered,
                                 const StaticParams& params) {
    const std::size_t n = filtered.size();
    if (path.size() != n || n == 0) throw std::domain_error("smoothed_path_log_density: length mismatch");
    const NormalMoments last = log_gamma_moments(filtered.posteriors[n - 1]);
    double total = normal_log_density(path[n - 1], last.mean, last.variance);
    for (std::size_t t = 0; t + 1 < n; ++t) {
        const NormalMoments c = backward_conditional(path[t + 1], filtered.posteriors[t], params);
        total += normal_log_density(path[t], c.mean, c.variance);
    }
    return total;
}

SmoothedDraws smooth(const ReturnSeries& series, std::span<const StaticParams> param_draws, std::size_t draws,
                     std::uint64_t seed, const GammaBelief& init) {
    if (param_draws.empty()) throw std::domain_error("smooth: no parameter draws");
    if (draws == 0) throw std::domain_error("smooth: draws must be positive");
    SmoothedDraws out;
    out.draws = draws;
    out.length = series.size();
    out.log_precision.reserve(draws * series.size());

    // Consecutive draws that share a parameter vector share one filter pass.
    const StaticParams* cached_params = nullptr;
    FilterOutput filtered;
    for (std::size_t j = 0; j < draws; ++j) {
        const StaticParams& p = param_draws[j % param_draws.size()];
        if (cached_params == nullptr || !(*cached_params == p)) {
            filtered = run_filter(series, p, init);
            cached_params = &p;
        }
        RngStream rng(seed, j);
        const std::vector<double> path = sample_smoothed_path(filtered, p, rng);
        out.log_precision.insert(out.log_precision.end(), path.begin(), path.end());
    }
    return out;
}

double empirical_quantile(std::vector<double>& values, double p) {
    if (values.empty()) throw std::domain_error("empirical_quantile: no values");
    std::sort(values.begin(), values.end());
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

VolatilitySummary smoothed_volatility_summary(const SmoothedDraws& draws) {
    if (draws.draws < 2) throw std::domain_error("smoothed_volatility_summary: need at least two draws");
    VolatilitySummary out;
    out.mean.resize(draws.length);
    out.lower95.resize(draws.length);
    out.upper95.resize(draws.length);
    std::vector<double> column(draws.draws);
    for (std::size_t t = 0; t < draws.length; ++t) {
        double sum = 0.0;
        for (std::size_t j = 0; j < draws.draws; ++j) {
            column[j] = std::exp(-draws.at(j, t));
            sum += column[j];
        }
        out.mean[t] = sum / static_cast<double>(draws.draws);
        out.lower95[t] = empirical_quantile(column, 0.025);
        out.upper95[t] = empirical_quantile(column, 0.975);
    }
    return out;
}

}  // namespace gedsv
