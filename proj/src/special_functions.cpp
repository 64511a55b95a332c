#include "gedsv/special_functions.hpp"

#include <math.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gedsv {

namespace {

void require_positive(double x, const char* fn) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw std::domain_error(std::string(fn) + ": argument must be positive and finite");
    }
}

// Below this the shift loop runs before the asymptotic series is applied.
constexpr double kAsymptoticThreshold = 10.0;

// P(a, x) by its power series; valid and fast for x < a + 1.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 100000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17) break;
    }
    return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
}

// Q(a, x) by Lentz's continued fraction; valid for x >= a + 1.
double gamma_q_fraction(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 100000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
}

// ln Γ(x) - [(x - ½) ln x - x + ½ ln 2π], x >= kAsymptoticThreshold.
double stirling_correction(double x) {
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    return inv * (1.0 / 12.0 -
                  inv2 * (1.0 / 360.0 -
                          inv2 * (1.0 / 1260.0 -
                                  inv2 * (1.0 / 1680.0 -
                                          inv2 * (1.0 / 1188.0 -
                                                  inv2 * (691.0 / 360360.0 -
                                                          inv2 * (1.0 / 156.0 - inv2 * 3617.0 / 122400.0)))))));
}

}  // namespace

double log_gamma(double x) {
    require_positive(x, "log_gamma");
#if defined(__GLIBC__)
    int sign = 0;
    return ::lgamma_r(x, &sign);  // reentrant: std::lgamma writes the global signgam
#else
    return std::lgamma(x);
#endif
}

double log_beta(double x, double y) {
    require_positive(x, "log_beta");
    require_positive(y, "log_beta");
    const double small = std::min(x, y);
    const double big = std::max(x, y);
    if (big < kAsymptoticThreshold) return log_gamma(x) + log_gamma(y) - log_gamma(x + y);
    // ln Γ(big + small) - ln Γ(big) with the leading Stirling terms cancelled by hand.
    const double sum = big + small;
    const double ratio = (big - 0.5) * std::log1p(small / big) + small * std::log(sum) - small +
                         stirling_correction(sum) - stirling_correction(big);
    return log_gamma(small) - ratio;
}

double digamma(double x) {
    require_positive(x, "digamma");
    double shift = 0.0;
    while (x < kAsymptoticThreshold) {
        shift -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // B_{2k} / (2k) for k = 1..8
    const double series =
        inv2 * (1.0 / 12 -
                inv2 * (1.0 / 120 -
                        inv2 * (1.0 / 252 -
                                inv2 * (1.0 / 240 -
                                        inv2 * (1.0 / 132 -
                                                inv2 * (691.0 / 32760 -
                                                         inv2 * (1.0 / 12 - inv2 * 3617.0 / 8160)))))));
    return shift + std::log(x) - 0.5 * inv - series;
}

double trigamma(double x) {
    require_positive(x, "trigamma");
    double shift = 0.0;
    while (x < kAsymptoticThreshold) {
        shift += 1.0 / (x * x);
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // B_{2k} for k = 1..8
    const double series =
        inv2 * inv *
        (1.0 / 6 -
         inv2 * (1.0 / 30 -
                 inv2 * (1.0 / 42 -
                         inv2 * (1.0 / 30 -
                                 inv2 * (5.0 / 66 -
                                         inv2 * (691.0 / 2730 - inv2 * (7.0 / 6 - inv2 * 3617.0 / 510)))))));
    return shift + inv + 0.5 * inv2 + series;
}

double gamma_p(double a, double x) {
    require_positive(a, "gamma_p");
    if (x < 0.0 || std::isnan(x)) throw std::domain_error("gamma_p: x must be non-negative");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_fraction(a, x);
}

double gamma_q(double a, double x) {
    require_positive(a, "gamma_q");
    if (x < 0.0 || std::isnan(x)) throw std::domain_error("gamma_q: x must be non-negative");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_fraction(a, x);
}

double gamma_quantile(double shape, double rate, double p) {
    require_positive(shape, "gamma_quantile");
    require_positive(rate, "gamma_quantile");
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("gamma_quantile: p must lie in (0, 1)");

    // Work on u = ln z with z the unit-rate quantile. The tail-side function keeps precision.
    const bool upper = p > 0.5;
    auto residual = [&](double u) {
        const double z = std::exp(u);
        return upper ? (1.0 - p) - gamma_q(shape, z) : gamma_p(shape, z) - p;
    };

    // Bracket: residual is increasing in u.
    double lo = std::log(shape) - 1.0;
    double hi = lo + 2.0;
    while (residual(lo) > 0.0) {
        lo -= 2.0 + std::abs(lo);
        if (lo < -745.0) return 0.0;  // the quantile underflows
    }
    while (residual(hi) < 0.0) hi += 2.0 + std::abs(hi);

    // Safeguarded Newton in u; dP/du = z^a e^{-z} / Γ(a).
    double u = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double f = residual(u);
        if (f == 0.0) break;
        if (f < 0.0) lo = u; else hi = u;
        const double z = std::exp(u);
        const double log_deriv = shape * u - z - log_gamma(shape);
        double step = f / std::exp(log_deriv);
        double next = u - step;
        if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
        if (std::abs(next - u) < 1e-15 * std::max(1.0, std::abs(u))) {
            u = next;
            break;
        }
        u = next;
        if (hi - lo < 1e-15 * std::max(1.0, std::abs(u))) break;
    }
    return std::exp(u) / rate;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double log_normal_cdf(double z) {
    if (z > -37.0) return std::log(normal_cdf(z));
    // Asymptotic Mills-ratio expansion of the lower tail.
    const double z2 = z * z;
    const double inv = 1.0 / z2;
    const double series = 1.0 - inv * (1.0 - 3.0 * inv * (1.0 - 5.0 * inv * (1.0 - 7.0 * inv)));
    return -0.5 * z2 - std::log(-z) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must lie in (0, 1)");
    if (p > 0.5) return -normal_quantile(1.0 - p);

    // Acklam's rational approximation followed by one Halley step.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};

    double x;
    if (p < 0.02425) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace gedsv
