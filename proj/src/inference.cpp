#include "gedsv/inference.hpp"

#include "gedsv/errors.hpp"
#include "gedsv/smoother.hpp"
#include "gedsv/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gedsv {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::size_t> free_indices(const FixedParams& fixed) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < kParamCount; ++i) {
        if (!fixed[i]) out.push_back(i);
    }
    return out;
}

StaticParams apply_fixed(StaticParams p, const FixedParams& fixed) {
    for (std::size_t i = 0; i < kParamCount; ++i) {
        if (fixed[i]) set(p, i, *fixed[i]);
    }
    return p;
}

// Maps between the optimizer's free coordinates and StaticParams.
class Coordinates {
public:
    Coordinates(const StaticParams& base, const FixedParams& fixed, bool unconstrained)
        : base_(apply_fixed(base, fixed)), free_(free_indices(fixed)), unconstrained_(unconstrained) {}

    std::vector<double> encode(const StaticParams& p) const {
        std::vector<double> x;
        if (unconstrained_) {
            const auto u = to_unconstrained(p);
            for (std::size_t i : free_) x.push_back(u[i]);
        } else {
            for (std::size_t i : free_) x.push_back(get(p, i));
        }
        return x;
    }

    StaticParams decode(std::span<const double> x) const {
        if (unconstrained_) {
            auto u = to_unconstrained(base_);
            for (std::size_t k = 0; k < free_.size(); ++k) u[free_[k]] = x[k];
            StaticParams p = from_unconstrained(u);
            // Fixed coordinates are copied exactly rather than round-tripped.
            for (std::size_t i = 0; i < kParamCount; ++i) {
                if (std::find(free_.begin(), free_.end(), i) == free_.end()) set(p, i, get(base_, i));
            }
            return p;
        }
        StaticParams p = base_;
        for (std::size_t k = 0; k < free_.size(); ++k) set(p, free_[k], x[k]);
        return p;
    }

    const std::vector<std::size_t>& free() const { return free_; }

private:
    StaticParams base_;
    std::vector<std::size_t> free_;
    bool unconstrained_;
};

double sample_variance(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return ss / std::max(n - 1.0, 1.0);
}

}  // namespace

double log_posterior(const StaticParams& params, const ReturnSeries& series, const PriorSpec& priors,
                     const GammaBelief& init) {
    if (!params.valid() || !priors.in_support(params)) return kNegInf;
    const double log_prior = priors.log_density(params);
    if (!std::isfinite(log_prior)) return kNegInf;
    try {
        const double loglik = marginal_loglik(series, params, init);
        return std::isfinite(loglik) ? loglik + log_prior : kNegInf;
    } catch (const NumericFailure&) {
        return kNegInf;
    } catch (const std::domain_error&) {
        return kNegInf;
    }
}

StaticParams default_start(const ReturnSeries& series) {
    StaticParams p;
    p.phi = 0.9;
    p.sigma_eta2 = 0.05;
    p.r = 2.0;
    const double var = series.size() > 1 ? sample_variance(series.values) : 1.0;
    p.alpha = (1.0 - p.phi) * std::log(var > 0.0 ? var : 1.0);
    return p;
}

ModeResult posterior_mode(const ReturnSeries& series, const PriorSpec& priors, const StaticParams& start,
                          const ModeOptions& options) {
    priors.validate();
    const Coordinates coords(start, options.fixed, options.unconstrained);
    ModeResult out;
    out.params = apply_fixed(start, options.fixed);

    const Objective objective = [&](std::span<const double> x) {
        try {
            const double lp = log_posterior(coords.decode(x), series, priors, options.init);
            return std::isfinite(lp) ? -lp : kInf;
        } catch (const std::domain_error&) {
            return kInf;
        }
    };

    std::vector<double> x0;
    try {
        x0 = coords.encode(out.params);
    } catch (const std::domain_error& e) {
        out.message = std::string("invalid start: ") + e.what();
        out.log_posterior = kNegInf;
        return out;
    }
    if (x0.empty()) {
        out.converged = true;
        out.log_posterior = log_posterior(out.params, series, priors, options.init);
        out.message = "no free parameters";
        return out;
    }

    const BfgsResult r = bfgs_minimize(objective, std::move(x0), options.bfgs);
    out.params = coords.decode(r.x);
    out.converged = r.converged;
    out.log_posterior = -r.value;
    out.gradient_norm = r.gradient_norm;
    out.iterations = r.iterations;
    out.message = r.message;
    return out;
}

double marginal_loglik_laplace(const ReturnSeries& series, const PriorSpec& priors, const StaticParams& mode,
                               const FixedParams& fixed, const GammaBelief& init) {
    const Coordinates coords(mode, fixed, false);
    const StaticParams centre = apply_fixed(mode, fixed);
    const std::vector<double> x = coords.encode(centre);
    std::vector<double> steps;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const std::size_t i = coords.free()[k];
        double h = 1e-3 * std::max(std::abs(x[k]), 0.1);
        if (i == 1) h = std::min({h, 0.25 * x[k], 0.25 * (1.0 - x[k])});
        if (i >= 2) h = std::min(h, 0.25 * x[k]);
        steps.push_back(h);
    }
    const Objective log_integrand = [&](std::span<const double> v) {
        return log_posterior(coords.decode(v), series, priors, init);
    };
    if (!std::isfinite(log_integrand(x))) throw NumericFailure("Laplace approximation: mode has zero posterior density");
    return laplace_log_integral(log_integrand, x, steps);
}

std::vector<double> PosteriorSamples::column(std::size_t param) const {
    std::vector<double> out(draws.size());
    for (std::size_t k = 0; k < draws.size(); ++k) out[k] = get(draws[k], param);
    return out;
}

std::vector<double> PosteriorSamples::chain_column(std::size_t param, std::size_t c) const {
    std::vector<double> out;
    for (std::size_t k = 0; k < draws.size(); ++k) {
        if (chain[k] == c) out.push_back(get(draws[k], param));
    }
    return out;
}

ParamSummary summarize(const PosteriorSamples& samples, std::size_t param) {
    std::vector<double> v = samples.column(param);
    if (v.empty()) throw std::domain_error("summarize: no draws");
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    return {mean, empirical_quantile(v, 0.5), empirical_quantile(v, 0.025), empirical_quantile(v, 0.975)};
}

double split_rhat(const PosteriorSamples& samples, std::size_t param) {
    std::vector<std::vector<double>> halves;
    for (std::size_t c = 0; c < samples.chains; ++c) {
        const std::vector<double> v = samples.chain_column(param, c);
        const std::size_t half = v.size() / 2;
        if (half < 2) throw std::domain_error("split_rhat: chains too short");
        halves.emplace_back(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(half));
        halves.emplace_back(v.end() - static_cast<std::ptrdiff_t>(half), v.end());
    }
    const double len = static_cast<double>(halves.front().size());
    const double m = static_cast<double>(halves.size());
    std::vector<double> means;
    double within = 0.0;
    for (const auto& h : halves) {
        means.push_back(std::accumulate(h.begin(), h.end(), 0.0) / len);
        within += sample_variance(h);
    }
    within /= m;
    const double between = len * sample_variance(means);
    if (within <= 0.0) return between > 0.0 ? kInf : 1.0;
    const double pooled = (len - 1.0) / len * within + between / len;
    return std::sqrt(pooled / within);
}

std::optional<double> PredictiveMixture::mean_volatility() const {
    if (components.empty()) return std::nullopt;
    double sum = 0.0;
    for (const auto& c : components) {
        if (!(c.shape > 1.0)) return std::nullopt;
        sum += c.rate / (c.shape - 1.0);
    }
    return sum / static_cast<double>(components.size());
}

double PredictiveMixture::volatility_cdf(double q) const {
    if (components.empty()) throw std::domain_error("empty predictive mixture");
    if (!(q > 0.0)) return 0.0;
    double sum = 0.0;
    // P(1/λ <= q) = P(λ >= 1/q)
    for (const auto& c : components) sum += gamma_q(c.shape, c.rate / q);
    return sum / static_cast<double>(components.size());
}

double PredictiveMixture::volatility_quantile(double p) const {
    if (components.empty()) throw std::domain_error("empty predictive mixture");
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("volatility_quantile: p must lie in (0, 1)");
    // The mixture quantile lies between the extreme component quantiles.
    double lo = kInf;
    double hi = 0.0;
    for (const auto& c : components) {
        const double lambda_q = gamma_quantile(c.shape, c.rate, 1.0 - p);
        const double h = lambda_q > 0.0 ? 1.0 / lambda_q : std::numeric_limits<double>::max();
        lo = std::min(lo, h);
        hi = std::max(hi, h);
    }
    if (lo == hi) return lo;
    double log_lo = std::log(lo);
    double log_hi = std::log(hi);
    for (int iter = 0; iter < 200 && log_hi - log_lo > 1e-15 * std::max(1.0, std::abs(log_lo)); ++iter) {
        const double mid = 0.5 * (log_lo + log_hi);
        if (volatility_cdf(std::exp(mid)) < p) log_lo = mid; else log_hi = mid;
    }
    return std::exp(0.5 * (log_lo + log_hi));
}

double PredictiveMixture::sample_volatility(RngStream& rng) const {
    if (components.empty()) throw std::domain_error("empty predictive mixture");
    const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(components.size()));
    const GammaBelief& c = components[std::min(j, components.size() - 1)];
    return std::exp(-sample_log_gamma_variate(c.shape, c.rate, rng));
}

PredictiveMixture latent_predictive_mixture(const PosteriorSamples& samples, const ReturnSeries& series,
                                            std::size_t horizon, const GammaBelief& init) {
    if (samples.draws.empty()) throw std::domain_error("latent_predictive_mixture: no posterior draws");
    if (horizon == 0) throw std::domain_error("latent_predictive_mixture: horizon must be positive");
    PredictiveMixture out;
    for (const StaticParams& p : samples.draws) {
        try {
            GammaBelief belief = run_filter(series, p, init).posteriors.back();
            for (std::size_t k = 0; k < horizon; ++k) belief = predict_state(belief, p);
            out.components.push_back(belief);
        } catch (const NumericFailure&) {
            ++out.skipped;
        }
    }
    if (out.components.empty()) throw NumericFailure("latent_predictive_mixture: the filter failed for every draw");
    return out;
}

}  // namespace gedsv
