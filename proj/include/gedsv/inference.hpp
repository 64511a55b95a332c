#pragma once

#include "gedsv/filter.hpp"
#include "gedsv/model.hpp"
#include "gedsv/optimizer.hpp"
#include "gedsv/priors.hpp"
#include "gedsv/random.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace gedsv {

/// Coordinates held fixed during estimation; unset entries are estimated.
using FixedParams = std::array<std::optional<double>, kParamCount>;

/// Holds r at 2: the normal-Gamma special case.
inline FixedParams normal_errors() { return {std::nullopt, std::nullopt, std::nullopt, 2.0}; }

/// Log-likelihood plus log prior. -inf outside the prior support or when the filter fails.
double log_posterior(const StaticParams& params, const ReturnSeries& series, const PriorSpec& priors,
                     const GammaBelief& init = kDiffuseInitialBelief);

/// Optimizer start: phi = 0.9, sigma_eta2 = 0.05, r = 2, alpha = (1 - phi) ln var(y).
StaticParams default_start(const ReturnSeries& series);

struct ModeOptions {
    BfgsOptions bfgs;
    FixedParams fixed;
    /// Optimize over (alpha, logit phi, ln sigma_eta2, ln r); false searches the raw coordinates.
    bool unconstrained = true;
    GammaBelief init = kDiffuseInitialBelief;
};

struct ModeResult {
    StaticParams params;
    bool converged = false;
    double log_posterior = 0.0;
    double gradient_norm = 0.0;
    std::size_t iterations = 0;
    std::string message;
};

/// Maximizes log_posterior by BFGS. Never throws on non-convergence.
ModeResult posterior_mode(const ReturnSeries& series, const PriorSpec& priors, const StaticParams& start,
                          const ModeOptions& options = {});

/// Laplace approximation to ln p(Y) around a posterior mode, integrating over
/// the free coordinates in their natural scale.
double marginal_loglik_laplace(const ReturnSeries& series, const PriorSpec& priors, const StaticParams& mode,
                               const FixedParams& fixed = {}, const GammaBelief& init = kDiffuseInitialBelief);

struct McmcConfig {
    std::size_t chains = 2;
    std::size_t iterations = 5000;
    std::size_t burn_in = 4000;
    std::array<double, kParamCount> proposal_sd{0.05, 0.01, 0.01, 0.1};
    std::uint64_t seed = 1;
    FixedParams fixed;
    /// Consecutive rejections of one coordinate that abort the run; 0 disables the check.
    std::size_t stall_limit = 500;
    /// Chains after the first start from a truncated-normal jitter of this many proposal sds.
    double overdispersion = 5.0;
    bool parallel = true;
    GammaBelief init = kDiffuseInitialBelief;

    void validate() const;
};

/// Retained draws of all chains, in chain order.
struct PosteriorSamples {
    std::vector<StaticParams> draws;
    std::vector<double> loglik;
    std::vector<std::size_t> chain;
    std::size_t chains = 0;
    std::array<double, kParamCount> acceptance_rate{};

    std::size_t size() const { return draws.size(); }
    std::vector<double> column(std::size_t param) const;
    std::vector<double> chain_column(std::size_t param, std::size_t c) const;
};

struct ParamSummary {
    double mean;
    double median;
    double lower95;
    double upper95;
};

ParamSummary summarize(const PosteriorSamples& samples, std::size_t param);

/// Split-chain potential scale reduction for one coordinate.
double split_rhat(const PosteriorSamples& samples, std::size_t param);

struct MhStep {
    double value;
    double log_target;
    bool accepted;
};

/// One Metropolis-Hastings update of a scalar whose target has support (lower, upper),
/// proposing from a normal centred at `current` truncated to that interval.
/// `log_target` may return -inf; such proposals are rejected.
MhStep truncated_normal_mh_step(double current, double current_log_target,
                                const std::function<double(double)>& log_target, double sd, double lower,
                                double upper, RngStream& rng);

/// Single-site random-walk Metropolis-Hastings with truncated-normal proposals
/// confined to the prior support. Throws ConvergenceFailure when a coordinate
/// stalls for stall_limit consecutive iterations.
PosteriorSamples run_mcmc(const ReturnSeries& series, const PriorSpec& priors, const McmcConfig& config,
                          const StaticParams& start);

struct TuneResult {
    std::array<double, kParamCount> proposal_sd{};
    std::array<double, kParamCount> acceptance_rate{};
    std::size_t rounds = 0;
    StaticParams last_state;
};

struct TuneOptions {
    std::size_t pilot_iterations = 300;
    std::size_t max_rounds = 20;
};

/// Pilot-run scaling of the proposal sds until every free coordinate accepts
/// within target ± 0.1. Throws ConvergenceFailure after max_rounds.
TuneResult tune_proposals(const ReturnSeries& series, const PriorSpec& priors, const McmcConfig& config,
                          const StaticParams& start, double target_rate, const TuneOptions& options = {});

/// Equal-weight mixture of per-draw h-step-ahead Gamma beliefs for λ_{t+h}.
struct PredictiveMixture {
    std::vector<GammaBelief> components;
    std::size_t skipped = 0;

    /// E[h_{t+h}] averaged over components; empty if any component has shape <= 1.
    std::optional<double> mean_volatility() const;
    /// P(h_{t+h} <= q).
    double volatility_cdf(double q) const;
    /// Quantile of h_{t+h} by inverting the mixture CDF.
    double volatility_quantile(double p) const;
    /// One draw of h_{t+h}: pick a component, then λ from it.
    double sample_volatility(RngStream& rng) const;
};

PredictiveMixture latent_predictive_mixture(const PosteriorSamples& samples, const ReturnSeries& series,
                                            std::size_t horizon, const GammaBelief& init = kDiffuseInitialBelief);

}  // namespace gedsv
