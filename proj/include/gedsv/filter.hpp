#pragma once

#include "gedsv/model.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace gedsv {

/// Per-step beliefs and predictive terms from one pass of the Gamma filter.
struct FilterOutput {
    std::vector<GammaBelief> priors;      ///< λ_t | Y_{t-1}
    std::vector<GammaBelief> posteriors;  ///< λ_t | Y_t
    std::vector<double> log_predictive;   ///< ln p(y_t | Y_{t-1})
    double total_loglik = 0.0;

    std::size_t size() const { return posteriors.size(); }
};

/// Volatility h = 1/λ forecast at horizons 1..horizon.
struct VolatilityForecast {
    std::size_t horizon = 0;
    std::vector<GammaBelief> beliefs;
    /// E[h] = rate / (shape - 1); empty when shape <= 1.
    std::vector<std::optional<double>> means;
    std::vector<double> lower95;
    std::vector<double> upper95;
};

/// Moment-matched prediction of λ_t | Y_{t-1} from λ_{t-1} | Y_{t-1}.
GammaBelief predict_state(const GammaBelief& posterior, const StaticParams& params);

/// Conjugate update with one observation.
GammaBelief update_state(const GammaBelief& prior, double y, double r);

/// ln p(y | Y_{t-1}): the generalized Student-t predictive density.
double log_predictive_one_step(const GammaBelief& prior, double y, double r);

/// Runs the filter over the series. Throws FilterFailure if a belief leaves the finite range.
FilterOutput run_filter(const ReturnSeries& series, const StaticParams& params,
                        const GammaBelief& init = kDiffuseInitialBelief);

/// Sum of ln p(y_t | Y_{t-1}) without storing the per-step beliefs.
double marginal_loglik(const ReturnSeries& series, const StaticParams& params,
                       const GammaBelief& init = kDiffuseInitialBelief);

/// Iterates predict_state `horizon` times from the last filtered belief.
VolatilityForecast forecast_volatility(const GammaBelief& last_posterior, const StaticParams& params,
                                       std::size_t horizon);

/// Equal-tailed 95% bounds of h = 1/λ under λ ~ belief.
std::pair<double, double> volatility_interval95(const GammaBelief& belief);

}  // namespace gedsv
