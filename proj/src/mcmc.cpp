#include "gedsv/errors.hpp"
#include "gedsv/inference.hpp"
#include "gedsv/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

namespace gedsv {

namespace {

struct ChainState {
    StaticParams params;
    double log_post;
    double loglik;
};

struct ChainResult {
    std::vector<StaticParams> draws;
    std::vector<double> loglik;
    std::array<std::size_t, kParamCount> accepted{};
    std::array<std::size_t, kParamCount> proposed{};
    ChainState last;
    std::exception_ptr error;
};


class Sampler {
public:
    Sampler(const ReturnSeries& series, const PriorSpec& priors, const McmcConfig& config)
        : series_(series), priors_(priors), config_(config) {}

    // Same arithmetic as log_posterior, keeping the likelihood term.
    ChainState evaluate(const StaticParams& p) const {
        constexpr double kNegInf = -std::numeric_limits<double>::infinity();
        if (!p.valid() || !priors_.in_support(p)) return {p, kNegInf, kNegInf};
        const double log_prior = priors_.log_density(p);
        if (!std::isfinite(log_prior)) return {p, kNegInf, kNegInf};
        double loglik;
        try {
            loglik = marginal_loglik(series_, p, config_.init);
        } catch (const NumericFailure&) {
            return {p, kNegInf, kNegInf};
        } catch (const std::domain_error&) {
            return {p, kNegInf, kNegInf};
        }
        if (!std::isfinite(loglik)) return {p, kNegInf, kNegInf};
        return {p, loglik + log_prior, loglik};
    }

    // Runs `iterations` single-site sweeps from `start`, keeping sweeps at index >= keep_from.
    ChainResult run(ChainState state, std::size_t iterations, std::size_t keep_from,
                    const std::array<double, kParamCount>& sd, RngStream& rng) const {
        ChainResult out;
        std::array<std::size_t, kParamCount> stalled{};
        for (std::size_t it = 0; it < iterations; ++it) {
            for (std::size_t i = 0; i < kParamCount; ++i) {
                if (config_.fixed[i]) continue;
                const ParamPrior& prior = priors_.params[i];
                const double current = get(state.params, i);
                ChainState next = state;
                const MhStep step = truncated_normal_mh_step(
                    current, state.log_post,
                    [&](double v) {
                        StaticParams candidate = state.params;
                        set(candidate, i, v);
                        next = evaluate(candidate);
                        return next.log_post;
                    },
                    sd[i], prior.lower, prior.upper, rng);
                ++out.proposed[i];
                if (step.accepted) {
                    state = next;
                    ++out.accepted[i];
                    stalled[i] = 0;
                } else if (config_.stall_limit > 0 && ++stalled[i] >= config_.stall_limit) {
                    throw ConvergenceFailure("MCMC: " + std::string(kParamNames[i]) + " rejected " +
                                             std::to_string(config_.stall_limit) +
                                             " consecutive proposals; proposal scale is likely wrong");
                }
            }
            if (it >= keep_from) {
                out.draws.push_back(state.params);
                out.loglik.push_back(state.loglik);
            }
        }
        out.last = state;
        return out;
    }

private:
    const ReturnSeries& series_;
    const PriorSpec& priors_;
    const McmcConfig& config_;
};

StaticParams with_fixed(StaticParams p, const FixedParams& fixed) {
    for (std::size_t i = 0; i < kParamCount; ++i) {
        if (fixed[i]) set(p, i, *fixed[i]);
    }
    return p;
}

}  // namespace

MhStep truncated_normal_mh_step(double current, double current_log_target,
                                const std::function<double(double)>& log_target, double sd, double lower,
                                double upper, RngStream& rng) {
    const double proposed = sample_truncated_normal(current, sd, lower, upper, rng);
    const double lp = log_target(proposed);
    if (!std::isfinite(lp)) return {current, current_log_target, false};
    // Hastings correction: the truncated proposal's normalizer depends on its centre.
    const double log_ratio = lp - current_log_target +
                             log_normal_interval_mass((lower - current) / sd, (upper - current) / sd) -
                             log_normal_interval_mass((lower - proposed) / sd, (upper - proposed) / sd);
    if (std::log(rng.uniform()) < log_ratio) return {proposed, lp, true};
    return {current, current_log_target, false};
}

void McmcConfig::validate() const {
    if (chains == 0) throw std::domain_error("MCMC needs at least one chain");
    if (iterations == 0) throw std::domain_error("MCMC needs at least one iteration");
    if (burn_in >= iterations) throw std::domain_error("burn-in must be shorter than the run");
    for (double s : proposal_sd) {
        if (!(s > 0.0) || !std::isfinite(s)) throw std::domain_error("proposal sds must be positive");
    }
    init.validate();
}

PosteriorSamples run_mcmc(const ReturnSeries& series, const PriorSpec& priors, const McmcConfig& config,
                          const StaticParams& start) {
    config.validate();
    priors.validate();
    const Sampler sampler(series, priors, config);
    const StaticParams origin = with_fixed(start, config.fixed);
    if (!std::isfinite(sampler.evaluate(origin).log_post)) {
        throw std::domain_error("run_mcmc: starting point has zero posterior density");
    }

    std::vector<ChainResult> results(config.chains);
    auto run_chain = [&](std::size_t c) {
        try {
            RngStream rng(config.seed, c);
            StaticParams p = origin;
            if (c > 0) {
                // Overdispersed start; retried until the posterior density is positive.
                for (int attempt = 0; attempt < 100; ++attempt) {
                    StaticParams trial = origin;
                    for (std::size_t i = 0; i < kParamCount; ++i) {
                        if (config.fixed[i]) continue;
                        const ParamPrior& prior = priors.params[i];
                        set(trial, i,
                            sample_truncated_normal(get(origin, i), config.overdispersion * config.proposal_sd[i],
                                                    prior.lower, prior.upper, rng));
                    }
                    if (std::isfinite(sampler.evaluate(trial).log_post)) {
                        p = trial;
                        break;
                    }
                }
            }
            results[c] = sampler.run(sampler.evaluate(p), config.iterations, config.burn_in, config.proposal_sd, rng);
        } catch (...) {
            results[c].error = std::current_exception();
        }
    };

    if (config.parallel && config.chains > 1) {
        std::vector<std::jthread> workers;
        for (std::size_t c = 0; c < config.chains; ++c) workers.emplace_back(run_chain, c);
    } else {
        for (std::size_t c = 0; c < config.chains; ++c) run_chain(c);
    }

    PosteriorSamples out;
    out.chains = config.chains;
    std::array<std::size_t, kParamCount> accepted{};
    std::array<std::size_t, kParamCount> proposed{};
    for (std::size_t c = 0; c < config.chains; ++c) {
        if (results[c].error) std::rethrow_exception(results[c].error);
        out.draws.insert(out.draws.end(), results[c].draws.begin(), results[c].draws.end());
        out.loglik.insert(out.loglik.end(), results[c].loglik.begin(), results[c].loglik.end());
        out.chain.insert(out.chain.end(), results[c].draws.size(), c);
        for (std::size_t i = 0; i < kParamCount; ++i) {
            accepted[i] += results[c].accepted[i];
            proposed[i] += results[c].proposed[i];
        }
    }
    for (std::size_t i = 0; i < kParamCount; ++i) {
        out.acceptance_rate[i] =
            proposed[i] > 0 ? static_cast<double>(accepted[i]) / static_cast<double>(proposed[i]) : 0.0;
    }
    return out;
}

TuneResult tune_proposals(const ReturnSeries& series, const PriorSpec& priors, const McmcConfig& config,
                          const StaticParams& start, double target_rate, const TuneOptions& options) {
    if (!(target_rate > 0.1 && target_rate < 0.6)) throw std::domain_error("tune_proposals: target must lie in (0.1, 0.6)");
    config.validate();
    priors.validate();
    McmcConfig pilot = config;
    pilot.stall_limit = 0;
    const Sampler sampler(series, priors, pilot);

    TuneResult out;
    out.proposal_sd = config.proposal_sd;
    ChainState state = sampler.evaluate(with_fixed(start, config.fixed));
    if (!std::isfinite(state.log_post)) throw std::domain_error("tune_proposals: starting point has zero posterior density");
    // Pilot rounds use streams disjoint from the sampling chains.
    RngStream rng(config.seed, 0x7475'6e65ULL);

    const double target_z = normal_quantile(0.5 * target_rate);
    for (out.rounds = 1; out.rounds <= options.max_rounds; ++out.rounds) {
        const ChainResult pilot_run =
            sampler.run(state, options.pilot_iterations, options.pilot_iterations, out.proposal_sd, rng);
        state = pilot_run.last;
        bool in_band = true;
        for (std::size_t i = 0; i < kParamCount; ++i) {
            if (config.fixed[i]) continue;
            const double rate =
                static_cast<double>(pilot_run.accepted[i]) / static_cast<double>(pilot_run.proposed[i]);
            out.acceptance_rate[i] = rate;
            if (std::abs(rate - target_rate) <= 0.1) continue;
            in_band = false;
            // Random-walk acceptance behaves like 2Φ(-c·sd): rescale sd to hit the target.
            const double observed_z = normal_quantile(0.5 * std::clamp(rate, 0.01, 0.99));
            out.proposal_sd[i] *= std::clamp(target_z / observed_z, 0.1, 10.0);
        }
        out.last_state = state.params;
        if (in_band) return out;
    }
    throw ConvergenceFailure("tune_proposals: acceptance rates did not reach the target band in " +
                             std::to_string(options.max_rounds) + " rounds");
}

}  // namespace gedsv
