#include "gedsv/optimizer.hpp"

#include "gedsv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace gedsv {

namespace {

double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Replaces NaN with +inf so comparisons order invalid points last.
double safe_eval(const Objective& f, std::span<const double> x) {
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
}

void reset_identity(std::vector<double>& h, std::size_t d, double scale) {
    std::fill(h.begin(), h.end(), 0.0);
    for (std::size_t i = 0; i < d; ++i) h[i * d + i] = scale;
}

// Inverts a symmetric positive-definite matrix through its Cholesky factor.
bool invert_spd(std::vector<double> m, std::size_t d, std::vector<double>& out) {
    for (std::size_t j = 0; j < d; ++j) {
        double diag = m[j * d + j];
        for (std::size_t k = 0; k < j; ++k) diag -= m[j * d + k] * m[j * d + k];
        if (!(diag > 0.0) || !std::isfinite(diag)) return false;
        m[j * d + j] = std::sqrt(diag);
        for (std::size_t i = j + 1; i < d; ++i) {
            double v = m[i * d + j];
            for (std::size_t k = 0; k < j; ++k) v -= m[i * d + k] * m[j * d + k];
            m[i * d + j] = v / m[j * d + j];
        }
    }
    // Solve L Lᵀ X = I column by column.
    std::vector<double> col(d);
    for (std::size_t c = 0; c < d; ++c) {
        for (std::size_t i = 0; i < d; ++i) {
            double v = i == c ? 1.0 : 0.0;
            for (std::size_t k = 0; k < i; ++k) v -= m[i * d + k] * col[k];
            col[i] = v / m[i * d + i];
        }
        for (std::size_t i = d; i-- > 0;) {
            double v = col[i];
            for (std::size_t k = i + 1; k < d; ++k) v -= m[k * d + i] * col[k];
            col[i] = v / m[i * d + i];
        }
        for (std::size_t i = 0; i < d; ++i) out[i * d + c] = col[i];
    }
    return true;
}

}  // namespace

std::vector<double> central_gradient(const Objective& f, std::span<const double> x, double relative_step) {
    std::vector<double> g(x.size());
    std::vector<double> probe(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double h = relative_step * std::max(std::abs(x[i]), 1.0);
        probe[i] = x[i] + h;
        const double up = safe_eval(f, probe);
        probe[i] = x[i] - h;
        const double down = safe_eval(f, probe);
        probe[i] = x[i];
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

std::vector<double> central_hessian(const Objective& f, std::span<const double> x, std::span<const double> steps) {
    const std::size_t d = x.size();
    std::vector<double> hess(d * d);
    std::vector<double> p(x.begin(), x.end());
    const double f0 = safe_eval(f, x);
    for (std::size_t i = 0; i < d; ++i) {
        const double hi = steps[i];
        p[i] = x[i] + hi;
        const double up = safe_eval(f, p);
        p[i] = x[i] - hi;
        const double down = safe_eval(f, p);
        p[i] = x[i];
        hess[i * d + i] = (up - 2.0 * f0 + down) / (hi * hi);
        for (std::size_t j = 0; j < i; ++j) {
            const double hj = steps[j];
            auto at = [&](double si, double sj) {
                p[i] = x[i] + si * hi;
                p[j] = x[j] + sj * hj;
                const double v = safe_eval(f, p);
                p[i] = x[i];
                p[j] = x[j];
                return v;
            };
            const double v = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * hi * hj);
            hess[i * d + j] = v;
            hess[j * d + i] = v;
        }
    }
    return hess;
}

BfgsResult bfgs_minimize(const Objective& f, std::vector<double> x0, const BfgsOptions& options) {
    const std::size_t d = x0.size();
    BfgsResult result;
    result.x = std::move(x0);
    result.value = safe_eval(f, result.x);
    if (!std::isfinite(result.value)) {
        result.message = "objective is not finite at the starting point";
        return result;
    }

    std::vector<double> g = central_gradient(f, result.x, options.relative_step);
    std::vector<double> h(d * d);
    reset_identity(h, d, 1.0);
    std::vector<double> dir(d), x_new(d), s(d), y(d), hy(d);
    bool fresh_restart = true;
    bool hessian_refreshed = false;

    for (result.iterations = 0; result.iterations < options.max_iterations; ++result.iterations) {
        result.gradient_norm = inf_norm(g);
        if (result.gradient_norm < options.gradient_tolerance) {
            result.converged = true;
            result.message = "gradient tolerance met";
            return result;
        }

        for (std::size_t i = 0; i < d; ++i) {
            dir[i] = 0.0;
            for (std::size_t j = 0; j < d; ++j) dir[i] -= h[i * d + j] * g[j];
        }
        double slope = dot(dir, g);
        if (!(slope < 0.0)) {
            // Lost descent: fall back to steepest descent.
            reset_identity(h, d, 1.0);
            for (std::size_t i = 0; i < d; ++i) dir[i] = -g[i];
            slope = dot(dir, g);
        }

        // Backtracking Armijo search.
        double step = 1.0;
        double f_new = std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int k = 0; k < 60; ++k) {
            for (std::size_t i = 0; i < d; ++i) x_new[i] = result.x[i] + step * dir[i];
            if (x_new == result.x) break;
            f_new = safe_eval(f, x_new);
            if (f_new <= result.value + 1e-4 * step * slope && f_new < result.value) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        std::vector<double> g_new;
        if (!accepted) {
            // Near the optimum the predicted decrease falls below the rounding noise of f.
            // Accept the full step when f is flat to within that noise and the gradient shrinks.
            for (std::size_t i = 0; i < d; ++i) x_new[i] = result.x[i] + dir[i];
            const double f_full = safe_eval(f, x_new);
            const double noise = 1e-11 * std::max(1.0, std::abs(result.value));
            if (std::abs(f_full - result.value) <= noise) {
                g_new = central_gradient(f, x_new, options.relative_step);
                if (inf_norm(g_new) < inf_norm(g)) {
                    f_new = f_full;
                    accepted = true;
                }
            }
        }
        if (!accepted) {
            if (!hessian_refreshed) {
                // Replace the secant approximation with the inverse of a finite-difference Hessian.
                std::vector<double> steps(d);
                for (std::size_t i = 0; i < d; ++i) steps[i] = 10.0 * options.relative_step * std::max(std::abs(result.x[i]), 1.0);
                if (invert_spd(central_hessian(f, result.x, steps), d, h)) {
                    hessian_refreshed = true;
                    fresh_restart = false;
                    continue;
                }
            }
            if (fresh_restart) {
                result.message = "line search failed";
                return result;
            }
            reset_identity(h, d, 1.0);
            fresh_restart = true;
            continue;
        }
        hessian_refreshed = false;

        if (g_new.empty()) g_new = central_gradient(f, x_new, options.relative_step);
        for (std::size_t i = 0; i < d; ++i) {
            s[i] = x_new[i] - result.x[i];
            y[i] = g_new[i] - g[i];
        }
        const double sy = dot(s, y);
        if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(y, y))) {
            if (fresh_restart) reset_identity(h, d, sy / dot(y, y));
            // H <- (I - ρ s yᵀ) H (I - ρ y sᵀ) + ρ s sᵀ
            const double rho = 1.0 / sy;
            for (std::size_t i = 0; i < d; ++i) {
                hy[i] = 0.0;
                for (std::size_t j = 0; j < d; ++j) hy[i] += h[i * d + j] * y[j];
            }
            const double yhy = dot(y, hy);
            for (std::size_t i = 0; i < d; ++i) {
                for (std::size_t j = 0; j < d; ++j) {
                    h[i * d + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
            fresh_restart = false;
        }
        result.x = x_new;
        result.value = f_new;
        g = std::move(g_new);
    }
    result.gradient_norm = inf_norm(g);
    result.converged = result.gradient_norm < options.gradient_tolerance;
    result.message = result.converged ? "gradient tolerance met" : "iteration limit reached";
    return result;
}

double log_det_spd(std::vector<double> m, std::size_t d) {
    double log_det = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        double diag = m[j * d + j];
        for (std::size_t k = 0; k < j; ++k) diag -= m[j * d + k] * m[j * d + k];
        if (!(diag > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        const double ljj = std::sqrt(diag);
        m[j * d + j] = ljj;
        log_det += 2.0 * std::log(ljj);
        for (std::size_t i = j + 1; i < d; ++i) {
            double v = m[i * d + j];
            for (std::size_t k = 0; k < j; ++k) v -= m[i * d + k] * m[j * d + k];
            m[i * d + j] = v / ljj;
        }
    }
    return log_det;
}

double laplace_log_integral(const Objective& log_integrand, std::span<const double> mode,
                            std::span<const double> steps) {
    const std::size_t d = mode.size();
    const Objective negated = [&](std::span<const double> x) { return -log_integrand(x); };
    const std::vector<double> curvature = central_hessian(negated, mode, steps);
    const double log_det = log_det_spd(curvature, d);
    if (std::isnan(log_det)) throw NumericFailure("Laplace approximation: negative Hessian is not positive definite");
    return log_integrand(mode) + 0.5 * static_cast<double>(d) * std::log(2.0 * std::numbers::pi) - 0.5 * log_det;
}

}  // namespace gedsv
