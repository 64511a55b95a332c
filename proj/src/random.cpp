#include "gedsv/random.hpp"

#include "gedsv/model.hpp"
#include "gedsv/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gedsv {

namespace {

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    __extension__ using u128 = unsigned __int128;
    const u128 product = static_cast<u128>(a) * b;
    hi = static_cast<std::uint64_t>(product >> 64);
    lo = static_cast<std::uint64_t>(product);
}

// Marsaglia-Tsang squeeze for shape >= 1, unit rate.
double gamma_unit_rate(double shape, RngStream& rng) {
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

void check_gamma_args(double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate)) {
        throw std::domain_error("gamma sampler: shape and rate must be positive and finite");
    }
}

// Standard normal restricted to [lo, hi] with lo > 30: the CDF underflows, so sample by rejection.
double deep_tail_normal(double lo, double hi, RngStream& rng) {
    if (hi - lo < 1.0 / lo) {
        // Narrow window: uniform proposal, envelope exp(-lo^2/2).
        for (;;) {
            const double z = lo + (hi - lo) * rng.uniform();
            if (std::log(rng.uniform()) < 0.5 * (lo * lo - z * z)) return z;
        }
    }
    // Exponential proposal (Robert 1995).
    const double rate = 0.5 * (lo + std::sqrt(lo * lo + 4.0));
    for (;;) {
        const double z = lo - std::log(rng.uniform()) / rate;
        if (z > hi) continue;
        const double diff = z - rate;
        if (std::log(rng.uniform()) < -0.5 * diff * diff) return z;
    }
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) : key_{seed, stream_id} {}

void RngStream::refill() {
    std::array<std::uint64_t, 4> ctr{counter_++, 0, 0, 0};
    std::array<std::uint64_t, 2> key = key_;
    for (int round = 0; round < 10; ++round) {
        std::uint64_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    block_ = ctr;
    used_ = 0;
}

RngStream::result_type RngStream::operator()() {
    if (used_ == 4) refill();
    return block_[used_++];
}

double RngStream::uniform() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() { return normal_quantile(uniform()); }

double sample_gamma(double shape, double rate, RngStream& rng) {
    check_gamma_args(shape, rate);
    if (shape >= 1.0) return gamma_unit_rate(shape, rng) / rate;
    // Shape boost: Gamma(a) = Gamma(a + 1) * U^{1/a}.
    const double g = gamma_unit_rate(shape + 1.0, rng);
    return g * std::pow(rng.uniform(), 1.0 / shape) / rate;
}

double sample_log_gamma_variate(double shape, double rate, RngStream& rng) {
    check_gamma_args(shape, rate);
    if (shape >= 1.0) return std::log(gamma_unit_rate(shape, rng)) - std::log(rate);
    const double g = gamma_unit_rate(shape + 1.0, rng);
    return std::log(g) + std::log(rng.uniform()) / shape - std::log(rate);
}

double log_normal_interval_mass(double lower, double upper) {
    if (!(lower < upper)) return -std::numeric_limits<double>::infinity();
    if (lower > 0.0) return log_normal_interval_mass(-upper, -lower);
    // Now lower <= 0: Φ(lower) is computed without cancellation.
    if (upper > 0.0) return std::log(normal_cdf(upper) - normal_cdf(lower));
    const double log_hi = log_normal_cdf(upper);
    if (std::isinf(lower)) return log_hi;
    const double log_lo = log_normal_cdf(lower);
    return log_hi + std::log1p(-std::exp(log_lo - log_hi));
}

double sample_truncated_normal(double mean, double sd, double lower, double upper, RngStream& rng) {
    if (!(sd > 0.0) || !std::isfinite(sd) || !std::isfinite(mean)) {
        throw std::domain_error("sample_truncated_normal: sd must be positive and mean finite");
    }
    if (!(lower < upper)) throw std::domain_error("sample_truncated_normal: lower must be below upper");

    double za = (lower - mean) / sd;
    double zb = (upper - mean) / sd;
    // Reflect so the interval sits where Φ is computed accurately.
    const bool flipped = za > 0.0;
    if (flipped) {
        const double tmp = za;
        za = -zb;
        zb = -tmp;
    }

    double z;
    if (zb < -30.0) {
        z = -deep_tail_normal(-zb, -za, rng);
    } else {
        const double pa = normal_cdf(za);
        const double pb = normal_cdf(zb);
        const double u = pa + (pb - pa) * rng.uniform();
        z = normal_quantile(std::min(std::max(u, std::numeric_limits<double>::min()), 1.0 - 0x1.0p-53));
        z = std::min(std::max(z, za), zb);
    }
    if (flipped) z = -z;
    double x = mean + sd * z;
    // Guard against rounding onto or past a bound.
    if (!(x > lower)) x = std::nextafter(lower, upper);
    if (!(x < upper)) x = std::nextafter(upper, lower);
    return x;
}

double truncated_normal_log_density(double x, double mean, double sd, double lower, double upper) {
    if (!(sd > 0.0)) throw std::domain_error("truncated_normal_log_density: sd must be positive");
    if (!(lower < upper)) throw std::domain_error("truncated_normal_log_density: lower must be below upper");
    if (!(x > lower && x < upper)) return -std::numeric_limits<double>::infinity();
    const double z = (x - mean) / sd;
    return -0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi) - std::log(sd) -
           log_normal_interval_mass((lower - mean) / sd, (upper - mean) / sd);
}

double sample_ged(double r, double lambda, RngStream& rng) {
    if (!(r > 0.0) || !(lambda > 0.0) || !std::isfinite(r) || !std::isfinite(lambda)) {
        throw std::domain_error("sample_ged: r and lambda must be positive and finite");
    }
    const double w = sample_gamma(1.0 / r, 1.0, rng);
    const double magnitude = std::pow(w / (lambda * psi_r(r)), 1.0 / r);
    return (rng() >> 63) ? magnitude : -magnitude;
}

}  // namespace gedsv
