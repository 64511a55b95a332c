#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace gedsv {

/// Objective to minimize. May return +inf or NaN outside its domain.
using Objective = std::function<double(std::span<const double>)>;

struct BfgsOptions {
    double gradient_tolerance = 1e-6;  ///< on the ∞-norm of the gradient
    std::size_t max_iterations = 500;
    double relative_step = 1e-5;       ///< central-difference step, relative to max(|x_i|, 1)
};

struct BfgsResult {
    std::vector<double> x;
    double value = 0.0;
    double gradient_norm = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::string message;
};

/// Central-difference gradient with step relative_step * max(|x_i|, 1).
std::vector<double> central_gradient(const Objective& f, std::span<const double> x, double relative_step);

/// Central-difference Hessian with per-coordinate steps; row-major d x d.
std::vector<double> central_hessian(const Objective& f, std::span<const double> x, std::span<const double> steps);

/// Quasi-Newton minimization with an inverse-Hessian BFGS update and a
/// backtracking Armijo line search. When the search stalls the secant matrix is
/// replaced once by an inverted finite-difference Hessian. Never throws on non-convergence: the best
/// iterate is returned with converged = false.
BfgsResult bfgs_minimize(const Objective& f, std::vector<double> x0, const BfgsOptions& options = {});

/// ln of the Cholesky determinant of a symmetric positive-definite matrix, or
/// NaN when the matrix is not positive definite.
double log_det_spd(std::vector<double> matrix, std::size_t dim);

/// Laplace approximation of ln ∫ exp(g(x)) dx around a maximizer `mode` of g.
/// Throws NumericFailure when -∇²g is not positive definite.
double laplace_log_integral(const Objective& log_integrand, std::span<const double> mode,
                            std::span<const double> steps);

}  // namespace gedsv
