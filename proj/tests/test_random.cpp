#include "catch_amalgamated.hpp"

#include "gedsv/model.hpp"
#include "gedsv/random.hpp"
#include "oracles.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

using namespace gedsv;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class Draw>
std::vector<double> draws(std::size_t n, Draw&& draw) {
    std::vector<double> out(n);
    for (auto& x : out) x = draw();
    return out;
}

}  // namespace

TEST_CASE("streams are reproducible and distinct", "[random]") {
    RngStream a(42, 7);
    RngStream b(42, 7);
    RngStream c(42, 8);
    RngStream d(43, 7);
    int same_c = 0;
    int same_d = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto x = a();
        REQUIRE(x == b());
        same_c += x == c();
        same_d += x == d();
    }
    CHECK(same_c == 0);
    CHECK(same_d == 0);
    CHECK(a.seed() == 42);
    CHECK(a.stream_id() == 7);
}

TEST_CASE("uniforms lie in the open unit interval and look uniform", "[random]") {
    RngStream rng(1, 0);
    auto u = draws(200000, [&] { return rng.uniform(); });
    for (double x : u) REQUIRE((x > 0.0 && x < 1.0));
    CHECK(oracle::ks_statistic(u, [](double x) { return x; }) < oracle::ks_critical_1pct(u.size()));
}

TEST_CASE("neighbouring streams are uncorrelated", "[random]") {
    RngStream a(9, 100);
    RngStream b(9, 101);
    std::vector<double> x(100000);
    std::vector<double> y(100000);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = a.normal();
        y[i] = b.normal();
    }
    CHECK(std::abs(oracle::pearson(x, y)) < 4.0 / std::sqrt(static_cast<double>(x.size())));
}

TEST_CASE("normal variates pass KS", "[random]") {
    RngStream rng(3, 1);
    auto z = draws(200000, [&] { return rng.normal(); });
    boost::math::normal_distribution<double> n01;
    CHECK(oracle::ks_statistic(z, [&](double x) { return boost::math::cdf(n01, x); }) <
          oracle::ks_critical_1pct(z.size()));
}

TEST_CASE("gamma sampler moments for shape 5, rate 2", "[random]") {
    RngStream rng(11, 0);
    const auto x = draws(1000000, [&] { return sample_gamma(5.0, 2.0, rng); });
    const auto m = oracle::sample_moments(x);
    CHECK(std::abs(m.mean - 2.5) < 3.0 * m.mean_se);
    CHECK(std::abs(m.variance - 1.25) < 3.0 * m.variance_se);
}

TEST_CASE("gamma sampler passes KS for shape 0.5", "[random]") {
    RngStream rng(12, 0);
    auto x = draws(1000000, [&] { return sample_gamma(0.5, 1.0, rng); });
    CHECK(oracle::ks_statistic(x, [](double v) { return oracle::gamma_cdf(0.5, 1.0, v); }) <
          oracle::ks_critical_1pct(x.size()));
}

TEST_CASE("log-gamma variate is finite for tiny shapes", "[random]") {
    RngStream rng(13, 0);
    for (int i = 0; i < 1000; ++i) {
        const double v = sample_log_gamma_variate(1e-3, 1e-3, rng);
        REQUIRE(std::isfinite(v));
    }
    // For moderate shapes it is the log of a Gamma draw: compare against the CDF.
    auto x = draws(100000, [&] { return std::exp(sample_log_gamma_variate(0.7, 3.0, rng)); });
    CHECK(oracle::ks_statistic(x, [](double v) { return oracle::gamma_cdf(0.7, 3.0, v); }) <
          oracle::ks_critical_1pct(x.size()));
}

TEST_CASE("gamma sampler rejects invalid parameters", "[random]") {
    RngStream rng(1, 1);
    CHECK_THROWS_AS(sample_gamma(0.0, 1.0, rng), std::domain_error);
    CHECK_THROWS_AS(sample_gamma(1.0, -1.0, rng), std::domain_error);
    CHECK_THROWS_AS(sample_ged(0.0, 1.0, rng), std::domain_error);
    CHECK_THROWS_AS(sample_ged(2.0, 0.0, rng), std::domain_error);
}

TEST_CASE("truncated normal without truncation", "[random]") {
    RngStream rng(20, 0);
    const auto x = draws(1000000, [&] { return sample_truncated_normal(0.0, 1.0, -kInf, kInf, rng); });
    const auto m = oracle::sample_moments(x);
    CHECK(std::abs(m.mean) < 3.0 * m.mean_se);
}

TEST_CASE("truncated normal on the positive half line", "[random]") {
    RngStream rng(21, 0);
    const auto x = draws(1000000, [&] { return sample_truncated_normal(0.0, 1.0, 0.0, kInf, rng); });
    for (double v : x) REQUIRE(v > 0.0);
    const auto m = oracle::sample_moments(x);
    CHECK(std::abs(m.mean - std::sqrt(2.0 / std::numbers::pi)) < 3.0 * m.mean_se);
}

TEST_CASE("truncated normal far outside its interval stays inside", "[random]") {
    RngStream rng(22, 0);
    for (int i = 0; i < 100000; ++i) {
        const double v = sample_truncated_normal(5.0, 2.0, 0.0, 1.0, rng);
        REQUIRE((v > 0.0 && v < 1.0));
    }
    for (int i = 0; i < 10000; ++i) {
        const double v = sample_truncated_normal(0.0, 1.0, 40.0, kInf, rng);
        REQUIRE(v > 40.0);
        REQUIRE(std::isfinite(v));
    }
    CHECK_THROWS_AS(sample_truncated_normal(0.0, 1.0, 1.0, 1.0, rng), std::domain_error);
    CHECK_THROWS_AS(sample_truncated_normal(0.0, 0.0, 0.0, 1.0, rng), std::domain_error);
}

TEST_CASE("truncated normal draws follow the truncated CDF", "[random]") {
    RngStream rng(23, 0);
    const double mu = 0.3;
    const double sd = 0.8;
    const double lo = -0.2;
    const double hi = 2.5;
    auto x = draws(200000, [&] { return sample_truncated_normal(mu, sd, lo, hi, rng); });
    boost::math::normal_distribution<double> n(mu, sd);
    const double flo = boost::math::cdf(n, lo);
    const double mass = boost::math::cdf(n, hi) - flo;
    CHECK(oracle::ks_statistic(x, [&](double v) { return (boost::math::cdf(n, v) - flo) / mass; }) <
          oracle::ks_critical_1pct(x.size()));
}

TEST_CASE("truncated normal log density integrates the interval mass", "[random]") {
    boost::math::normal_distribution<double> n01;
    const double expected = std::log(boost::math::cdf(n01, 1.5) - boost::math::cdf(n01, -0.5));
    CHECK(log_normal_interval_mass(-0.5, 1.5) == Catch::Approx(expected).epsilon(1e-13));
    // Deep tails where the direct difference cancels.
    CHECK(log_normal_interval_mass(30.0, kInf) == Catch::Approx(-454.32124395634319711).epsilon(1e-12));
    CHECK(log_normal_interval_mass(-kInf, -40.0) == Catch::Approx(-804.60844201375378817).epsilon(1e-12));
    const double lp = truncated_normal_log_density(0.2, 0.0, 1.0, -0.5, 1.5);
    CHECK(lp == Catch::Approx(std::log(boost::math::pdf(n01, 0.2)) - expected).epsilon(1e-13));
    CHECK(truncated_normal_log_density(2.0, 0.0, 1.0, -0.5, 1.5) == -kInf);
}

TEST_CASE("GED sample mean is zero and variance is lambda^(-2/r)", "[random]") {
    for (const auto [r, lambda] : {std::pair{2.0, 1.0}, std::pair{1.0, 2.0}, std::pair{0.7, 3.0}}) {
        INFO("r = " << r << " lambda = " << lambda);
        RngStream rng(30, static_cast<std::uint64_t>(r * 10 + lambda));
        const auto y = draws(1000000, [&] { return sample_ged(r, lambda, rng); });
        const auto m = oracle::sample_moments(y);
        CHECK(std::abs(m.mean) < 3.0 * m.mean_se);
        CHECK(std::abs(m.variance - std::pow(lambda, -2.0 / r)) < 3.0 * m.variance_se);
    }
}

TEST_CASE("GED draws transform to Gamma(1/r, 1)", "[random][property]") {
    for (double r : {0.8, 1.0, 1.5, 2.0, 3.0}) {
        INFO("r = " << r);
        RngStream rng(31, static_cast<std::uint64_t>(r * 100));
        const double lambda = 1.7;
        const double psi = oracle::ged_psi(r);
        auto w = draws(100000, [&] { return lambda * psi * std::pow(std::abs(sample_ged(r, lambda, rng)), r); });
        CHECK(oracle::ks_statistic(w, [&](double v) { return oracle::gamma_cdf(1.0 / r, 1.0, v); }) <
              oracle::ks_critical_1pct(w.size()));
    }
}

TEST_CASE("samplers are bit-reproducible", "[random][property]") {
    auto run = [] {
        RngStream rng(77, 5);
        std::vector<double> out;
        for (int i = 0; i < 200; ++i) {
            out.push_back(sample_gamma(0.3 + i * 0.01, 1.0, rng));
            out.push_back(sample_truncated_normal(0.0, 1.0, -0.1, 0.2, rng));
            out.push_back(sample_ged(1.3, 2.0, rng));
            out.push_back(sample_log_gamma_variate(0.01, 2.0, rng));
        }
        return out;
    };
    CHECK(run() == run());
}
