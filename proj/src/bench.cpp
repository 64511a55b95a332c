#include "gedsv/bench.hpp"

#include "gedsv/errors.hpp"
#include "gedsv/filter.hpp"
#include "gedsv/smoother.hpp"

#include <atomic>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace gedsv {

namespace {

struct Replication {
    bool ok = false;
    StaticParams estimate;
};

Replication fit_replication(const SimulationDesign& design, const StaticParams& truth, std::size_t index,
                            bool fit_r_free, const CellOptions& options) {
    Replication out;
    try {
        RngStream rng(design.seed, index);
        const Simulation sim = simulate(truth, design.n, options.init, rng, InitialState::Stationary);
        ModeOptions mode_options;
        mode_options.bfgs = options.bfgs;
        mode_options.init = options.init;
        if (!fit_r_free) mode_options.fixed = normal_errors();
        const ModeResult fit =
            posterior_mode(sim.series, options.priors, default_start(sim.series), mode_options);
        out.ok = fit.converged && fit.params.valid();
        out.estimate = fit.params;
    } catch (const std::exception&) {
        out.ok = false;
    }
    return out;
}

void check_lengths(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::domain_error("proxy and estimate lengths differ");
    if (a.empty()) throw std::domain_error("need at least one observation");
}

}  // namespace

CellResult run_table1_cell(const SimulationDesign& design, bool fit_r_free, const CellOptions& options) {
    design.validate();
    CellResult out;
    out.design = design;
    out.fit_r_free = fit_r_free;
    out.truth = params_from_design(design);

    std::vector<Replication> reps(design.replications);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < reps.size(); i = next++) {
            reps[i] = fit_replication(design, out.truth, i, fit_r_free, options);
        }
    };
    std::size_t threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, reps.size());
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    // Reduction in replication order, independent of completion order.
    std::array<double, kParamCount> sum{};
    std::array<double, kParamCount> sq{};
    for (std::size_t i = 0; i < reps.size(); ++i) {
        if (!reps[i].ok) {
            ++out.failures;
            continue;
        }
        ++out.successes;
        out.estimates.push_back(reps[i].estimate);
        out.replication_index.push_back(i);
        for (std::size_t k = 0; k < kParamCount; ++k) {
            const double e = get(reps[i].estimate, k);
            sum[k] += e;
            const double d = e - get(out.truth, k);
            sq[k] += d * d;
        }
    }
    for (std::size_t k = 0; k < kParamCount; ++k) {
        if (out.successes == 0) {
            out.mean[k] = std::nan("");
            continue;
        }
        const double count = static_cast<double>(out.successes);
        out.mean[k] = sum[k] / count;
        if (fit_r_free || k != 3) out.mse[k] = sq[k] / count;
    }
    return out;
}

std::vector<SimulationDesign> table1_grid(std::size_t replications, std::size_t n, std::uint64_t seed) {
    std::vector<SimulationDesign> grid;
    for (double r : {2.0, 1.0}) {
        for (double cv : {10.0, 1.0, 0.1}) {
            for (double phi : {0.90, 0.95, 0.98}) {
                grid.push_back(SimulationDesign{phi, cv, 0.0009, r, n, replications, seed});
            }
        }
    }
    return grid;
}

void write_cell_results(std::ostream& os, std::span<const CellResult> cells, char delimiter) {
    const char d = delimiter;
    os << "phi" << d << "cv" << d << "expected_var" << d << "r" << d << "n" << d << "replications" << d << "seed" << d
       << "fit" << d << "successes" << d << "failures";
    for (const char* name : kParamNames) os << d << name << "_mean" << d << name << "_mse";
    os << '\n';
    const auto old_precision = os.precision(17);
    for (const CellResult& c : cells) {
        os << c.design.phi << d << c.design.cv << d << c.design.expected_var << d << c.design.r << d << c.design.n
           << d << c.design.replications << d << c.design.seed << d << (c.fit_r_free ? "ged" : "normal") << d
           << c.successes << d << c.failures;
        for (std::size_t k = 0; k < kParamCount; ++k) {
            os << d << c.mean[k] << d;
            if (c.mse[k]) os << *c.mse[k]; else os << "NA";
        }
        os << '\n';
    }
    os.precision(old_precision);
}

double srmse(std::span<const double> proxy, std::span<const double> estimate) {
    check_lengths(proxy, estimate);
    double ss = 0.0;
    for (std::size_t i = 0; i < proxy.size(); ++i) ss += (proxy[i] - estimate[i]) * (proxy[i] - estimate[i]);
    return std::sqrt(ss / static_cast<double>(proxy.size()));
}

double mae(std::span<const double> proxy, std::span<const double> estimate) {
    check_lengths(proxy, estimate);
    double s = 0.0;
    for (std::size_t i = 0; i < proxy.size(); ++i) s += std::abs(proxy[i] - estimate[i]);
    return s / static_cast<double>(proxy.size());
}

ForecastScores out_of_sample_eval(const ReturnSeries& series, const VarianceForecaster& forecaster,
                                  std::size_t k_max) {
    if (k_max == 0) throw std::domain_error("out_of_sample_eval: k_max must be positive");
    if (series.size() <= k_max) throw std::domain_error("out_of_sample_eval: series shorter than k_max + 1");
    ForecastScores out;
    for (std::size_t k = k_max; k >= 1; --k) {
        const std::size_t train = series.size() - k;
        const double y = series.values[train];
        out.forecasts.push_back(forecaster(series.prefix(train)));
        out.proxies.push_back(y * y);
    }
    out.srmse = srmse(out.proxies, out.forecasts);
    out.mae = mae(out.proxies, out.forecasts);
    return out;
}

VarianceForecaster filter_forecaster(const StaticParams& params, const GammaBelief& init) {
    return [params, init](const ReturnSeries& training) {
        const FilterOutput f = run_filter(training, params, init);
        const VolatilityForecast fc = forecast_volatility(f.posteriors.back(), params, 1);
        if (!fc.means[0]) throw NumericFailure("one-step forecast has no finite mean (shape <= 1)");
        return *fc.means[0];
    };
}

VarianceForecaster posterior_mode_forecaster(const PriorSpec& priors, const ModeOptions& options) {
    return [priors, options](const ReturnSeries& training) {
        const ModeResult fit = posterior_mode(training, priors, default_start(training), options);
        if (!fit.converged) throw ConvergenceFailure("posterior mode did not converge: " + fit.message);
        return filter_forecaster(fit.params, options.init)(training);
    };
}

ForecastScores in_sample_eval(const ReturnSeries& series, const StaticParams& params, std::size_t draws,
                              std::uint64_t seed, const GammaBelief& init) {
    const SmoothedDraws sd = smooth(series, std::span<const StaticParams>(&params, 1), draws, seed, init);
    const VolatilitySummary summary = smoothed_volatility_summary(sd);
    ForecastScores out;
    out.forecasts = summary.mean;
    for (double y : series.values) out.proxies.push_back(y * y);
    out.srmse = srmse(out.proxies, out.forecasts);
    out.mae = mae(out.proxies, out.forecasts);
    return out;
}

}  // namespace gedsv
