#include "gedsv/filter.hpp"

#include "gedsv/errors.hpp"
#include "gedsv/special_functions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gedsv {

namespace {

// Constants of the observation density that depend only on r.
struct ShapeConstants {
    explicit ShapeConstants(double r_)
        : r(r_), inv_r(1.0 / r_), psi(psi_r(r_)), log_half_r(std::log(0.5 * r_)) {}

    double r;
    double inv_r;
    double psi;
    double log_half_r;
};

// ln a' and ln b' of the predicted belief, kept in log space because
// (a/b)^{-phi} overflows under diffuse starts.
struct LogBelief {
    double log_shape;
    double log_rate;
};

LogBelief predict_log(const GammaBelief& posterior, const StaticParams& p) {
    const double spread = p.phi * p.phi / posterior.shape + p.sigma_eta2;
    const double log_spread = std::log(spread);
    return {-log_spread,
            p.alpha - p.phi * (std::log(posterior.shape) - std::log(posterior.rate)) - log_spread};
}

// With z = 1/r the GED normalizer is (r/2) ψ^z / Γ(z), so the density is
//   B(z, a)^{-1} (r/2) (|y|^r + b/ψ)^{-z} (1 + ψ|y|^r / b)^{-a}.
// This form keeps its precision as r -> 0, where Γ(z) and ψ^z are astronomically large.
double log_predictive(const GammaBelief& prior, double y, const ShapeConstants& c) {
    const double a = prior.shape;
    const double b = prior.rate;
    const double abs_y = std::abs(y);
    const double y_r = std::pow(abs_y, c.r);
    const double b_scaled = b / c.psi;
    const double base = y_r + b_scaled;
    double log_base;
    if (base > 0.5 && base < 2.0 && abs_y > 0.0) {
        log_base = std::log1p(std::expm1(c.r * std::log(abs_y)) + b_scaled);
    } else {
        log_base = std::log(base);
    }
    const double excess = c.psi * y_r;
    const double log_ratio = excess <= b ? std::log1p(excess / b) : std::log(excess + b) - std::log(b);
    return -log_beta(c.inv_r, a) + c.log_half_r - c.inv_r * log_base - a * log_ratio;
}

template <typename Visit>
double filter_pass(const ReturnSeries& series, const StaticParams& params, const GammaBelief& init,
                   Visit&& visit) {
    params.validate();
    init.validate();
    if (series.size() == 0) throw std::domain_error("run_filter: empty series");
    const ShapeConstants c(params.r);

    GammaBelief posterior = init;
    double total = 0.0;
    for (std::size_t t = 0; t < series.size(); ++t) {
        const double y = series.values[t];
        const LogBelief lp = predict_log(posterior, params);
        const GammaBelief prior{std::exp(lp.log_shape), std::exp(lp.log_rate)};
        if (!prior.valid()) throw FilterFailure(t + 1, prior.shape, prior.rate, y);
        posterior = {prior.shape + c.inv_r, prior.rate + c.psi * std::pow(std::abs(y), c.r)};
        if (!posterior.valid()) throw FilterFailure(t + 1, posterior.shape, posterior.rate, y);
        const double term = log_predictive(prior, y, c);
        if (!std::isfinite(term)) throw FilterFailure(t + 1, prior.shape, prior.rate, y);
        total += term;
        visit(prior, posterior, term);
    }
    return total;
}

}  // namespace

GammaBelief predict_state(const GammaBelief& posterior, const StaticParams& params) {
    posterior.validate();
    params.validate();
    const LogBelief lp = predict_log(posterior, params);
    GammaBelief out{std::exp(lp.log_shape), std::exp(lp.log_rate)};
    if (!out.valid()) throw FilterFailure(0, out.shape, out.rate, std::numeric_limits<double>::quiet_NaN());
    return out;
}

GammaBelief update_state(const GammaBelief& prior, double y, double r) {
    prior.validate();
    if (!(r > 0.0) || !std::isfinite(r)) throw std::domain_error("update_state: r must be positive");
    if (!std::isfinite(y)) throw std::domain_error("update_state: y must be finite");
    return {prior.shape + 1.0 / r, prior.rate + psi_r(r) * std::pow(std::abs(y), r)};
}

double log_predictive_one_step(const GammaBelief& prior, double y, double r) {
    prior.validate();
    if (!(r > 0.0) || !std::isfinite(r)) throw std::domain_error("log_predictive_one_step: r must be positive");
    return log_predictive(prior, y, ShapeConstants(r));
}

FilterOutput run_filter(const ReturnSeries& series, const StaticParams& params, const GammaBelief& init) {
    FilterOutput out;
    out.priors.reserve(series.size());
    out.posteriors.reserve(series.size());
    out.log_predictive.reserve(series.size());
    out.total_loglik = filter_pass(series, params, init,
                                   [&](const GammaBelief& prior, const GammaBelief& posterior, double term) {
                                       out.priors.push_back(prior);
                                       out.posteriors.push_back(posterior);
                                       out.log_predictive.push_back(term);
                                   });
    return out;
}

double marginal_loglik(const ReturnSeries& series, const StaticParams& params, const GammaBelief& init) {
    return filter_pass(series, params, init, [](const GammaBelief&, const GammaBelief&, double) {});
}

std::pair<double, double> volatility_interval95(const GammaBelief& belief) {
    // h = 1/λ, so the lower h bound comes from the upper λ quantile.
    const double lambda_hi = gamma_quantile(belief.shape, belief.rate, 0.975);
    const double lambda_lo = gamma_quantile(belief.shape, belief.rate, 0.025);
    const double inf = std::numeric_limits<double>::infinity();
    return {lambda_hi > 0.0 ? 1.0 / lambda_hi : inf, lambda_lo > 0.0 ? 1.0 / lambda_lo : inf};
}

VolatilityForecast forecast_volatility(const GammaBelief& last_posterior, const StaticParams& params,
                                       std::size_t horizon) {
    if (horizon == 0) throw std::domain_error("forecast_volatility: horizon must be positive");
    VolatilityForecast out;
    out.horizon = horizon;
    GammaBelief belief = last_posterior;
    for (std::size_t k = 0; k < horizon; ++k) {
        belief = predict_state(belief, params);
        out.beliefs.push_back(belief);
        if (belief.shape > 1.0) {
            out.means.emplace_back(belief.rate / (belief.shape - 1.0));
        } else {
            out.means.emplace_back(std::nullopt);
        }
        const auto [lo, hi] = volatility_interval95(belief);
        out.lower95.push_back(lo);
        out.upper95.push_back(hi);
    }
    return out;
}

}  // namespace gedsv
