#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace gedsv {

/// Counter-based Philox4x64-10 stream keyed by (seed, stream_id).
///
/// Distinct stream ids select distinct keys, so streams never overlap and a
/// stream can be created for any id in O(1). Satisfies UniformRandomBitGenerator.
/// Single owner: move it between threads, never share it.
class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Uniform on the open interval (0, 1), 53 bits of resolution.
    double uniform();

    /// Standard normal by inversion.
    double normal();

    std::uint64_t seed() const { return key_[0]; }
    std::uint64_t stream_id() const { return key_[1]; }

private:
    void refill();

    std::array<std::uint64_t, 2> key_;
    std::uint64_t counter_ = 0;
    std::array<std::uint64_t, 4> block_{};
    int used_ = 4;
};

/// Gamma(shape, rate) draw, density ∝ x^{shape-1} e^{-rate x}.
double sample_gamma(double shape, double rate, RngStream& rng);

/// ln of a Gamma(shape, rate) draw. Stays finite for tiny shapes where the draw itself underflows.
double sample_log_gamma_variate(double shape, double rate, RngStream& rng);

/// Normal(mean, sd^2) restricted to (lower, upper); either bound may be infinite.
double sample_truncated_normal(double mean, double sd, double lower, double upper, RngStream& rng);

/// Log-density of the truncated normal above at x (-inf outside the interval).
double truncated_normal_log_density(double x, double mean, double sd, double lower, double upper);

/// ln(Φ(upper) - Φ(lower)) for standardized bounds, accurate in both tails.
double log_normal_interval_mass(double lower, double upper);

/// Draw from the generalized error distribution with shape r and precision lambda.
double sample_ged(double r, double lambda, RngStream& rng);

}  // namespace gedsv
