#pragma once

#include "gedsv/random.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gedsv {

/// Static parameters of the GED-Gamma model.
///
/// The log-precision evolves as ln λ_t = -alpha + phi ln λ_{t-1} + η_t with
/// η_t ~ N(0, sigma_eta2); equivalently ln h_t = alpha + phi ln h_{t-1} + η*_t for
/// the volatility h_t = 1/λ_t. r is the GED shape (2 normal, 1 Laplace).
struct StaticParams {
    double alpha = 0.0;
    double phi = 0.0;
    double sigma_eta2 = 1.0;
    double r = 2.0;

    bool valid() const;
    /// Throws std::domain_error naming the first violated constraint.
    void validate() const;

    friend bool operator==(const StaticParams&, const StaticParams&) = default;
};

inline constexpr std::size_t kParamCount = 4;

/// Gamma(shape, rate) belief over a precision: density ∝ λ^{shape-1} e^{-rate λ}.
struct GammaBelief {
    double shape = 1.0;
    double rate = 1.0;

    bool valid() const;
    void validate() const;
    double mean() const { return shape / rate; }

    friend bool operator==(const GammaBelief&, const GammaBelief&) = default;
};

/// Diffuse starting belief λ_0 ~ Gamma(0.001, 0.001).
inline constexpr GammaBelief kDiffuseInitialBelief{0.001, 0.001};

/// Return observations y_1..y_n, optionally centered on the sample mean.
struct ReturnSeries {
    std::vector<double> values;
    bool centered = false;
    double original_mean = 0.0;

    std::size_t size() const { return values.size(); }

    /// Subtracts the sample mean and records it.
    static ReturnSeries centered_from(std::vector<double> raw);
    /// Takes values as they are.
    static ReturnSeries from_values(std::vector<double> values);

    /// Series of the first `count` observations (no re-centering).
    ReturnSeries prefix(std::size_t count) const;
};

/// A path of log-precisions ln λ_1..ln λ_n.
struct LatentPath {
    std::vector<double> log_precision;

    std::size_t size() const { return log_precision.size(); }
    std::vector<double> precision() const;
    std::vector<double> volatility() const;
};

/// One cell of the Monte Carlo design: persistence, target coefficient of
/// variation of h_t, and target E[h_t].
struct SimulationDesign {
    double phi = 0.95;
    double cv = 1.0;
    double expected_var = 0.0009;
    double r = 2.0;
    std::size_t n = 500;
    std::size_t replications = 50;
    std::uint64_t seed = 1;

    void validate() const;
};

/// How simulate() chooses ln λ_0.
enum class InitialState {
    FromBelief,  ///< draw λ_0 from the supplied Gamma belief, ln λ_0 clamped to [-50, 50]
    Stationary,  ///< draw ln λ_0 from the stationary law of the evolution
};

struct Simulation {
    ReturnSeries series;
    LatentPath path;
};

/// GED scale constant ψ(r) = [Γ(3/r) / Γ(1/r)]^{r/2}.
double psi_r(double r);

/// ln[ r Γ(3/r)^{1/2} / (2 Γ(1/r)^{3/2}) ], the GED normalizing constant.
double ged_log_normalizer(double r);

/// ln p(y | λ, r) for the GED observation density.
double ged_log_density(double y, double lambda, double r);

/// Forward simulation of y_1..y_n together with the true latent path.
Simulation simulate(const StaticParams& params, std::size_t n, const GammaBelief& init, RngStream& rng,
                    InitialState start = InitialState::FromBelief);

/// Maps a design cell to model parameters: σ²_η from the CV target, α from E[h].
StaticParams params_from_design(const SimulationDesign& design);

/// (α, logit φ, ln σ²_η, ln r). Throws std::domain_error for φ on the boundary.
std::array<double, kParamCount> to_unconstrained(const StaticParams& params);
StaticParams from_unconstrained(std::span<const double, kParamCount> v);

}  // namespace gedsv
