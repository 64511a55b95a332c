#pragma once

#include "gedsv/inference.hpp"
#include "gedsv/model.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace gedsv {

/// Aggregated posterior-mode estimates for one simulation-design cell.
struct CellResult {
    SimulationDesign design;
    bool fit_r_free = true;
    StaticParams truth;
    std::array<double, kParamCount> mean{};
    /// Mean squared deviation from truth; empty for coordinates held fixed.
    std::array<std::optional<double>, kParamCount> mse{};
    std::size_t successes = 0;
    std::size_t failures = 0;
    /// Per-replication estimates in replication order; failed replications are absent.
    std::vector<StaticParams> estimates;
    std::vector<std::size_t> replication_index;

    std::size_t replications() const { return successes + failures; }
    /// More than 10% of replications failed.
    bool cell_failed() const { return failures * 10 > replications(); }
};

struct CellOptions {
    PriorSpec priors = PriorSpec::vague_uniform();
    BfgsOptions bfgs;
    GammaBelief init = kDiffuseInitialBelief;
    /// Worker threads; 0 picks the hardware concurrency.
    std::size_t threads = 0;
};

/// Simulates design.replications series (stationary start, stream = replication
/// index) and fits each by posterior mode, estimating r or holding it at 2.
CellResult run_table1_cell(const SimulationDesign& design, bool fit_r_free, const CellOptions& options = {});

/// The eighteen design cells of the full study grid: phi x CV x error shape.
std::vector<SimulationDesign> table1_grid(std::size_t replications, std::size_t n, std::uint64_t seed);

/// Writes the fixed-order table: design fields, fit, counts, then mean and MSE per parameter.
void write_cell_results(std::ostream& os, std::span<const CellResult> cells, char delimiter = ',');

/// Square root of the mean squared difference between proxy and estimate.
double srmse(std::span<const double> proxy, std::span<const double> estimate);

/// Mean absolute difference between proxy and estimate.
double mae(std::span<const double> proxy, std::span<const double> estimate);

/// Produces the one-step-ahead variance forecast for the observation after `training`.
using VarianceForecaster = std::function<double(const ReturnSeries& training)>;

struct ForecastScores {
    double srmse = 0.0;
    double mae = 0.0;
    std::vector<double> proxies;    ///< y² of the held-out observations
    std::vector<double> forecasts;  ///< σ̂² for the same observations
};

/// Leave-last-k evaluation: for k = k_max..1 train on the first n-k observations
/// and score the forecast of observation n-k+1 against its squared value.
ForecastScores out_of_sample_eval(const ReturnSeries& series, const VarianceForecaster& forecaster,
                                  std::size_t k_max = 5);

/// Forecaster that filters with fixed parameters and reports E[h] one step ahead.
VarianceForecaster filter_forecaster(const StaticParams& params, const GammaBelief& init = kDiffuseInitialBelief);

/// Forecaster that refits the posterior mode on each training prefix.
VarianceForecaster posterior_mode_forecaster(const PriorSpec& priors, const ModeOptions& options = {});

/// In-sample scores of the smoothed mean volatility against y².
ForecastScores in_sample_eval(const ReturnSeries& series, const StaticParams& params, std::size_t draws,
                              std::uint64_t seed, const GammaBelief& init = kDiffuseInitialBelief);

}  // namespace gedsv
