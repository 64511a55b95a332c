#include "gedsv/model.hpp"

#include "gedsv/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gedsv {

namespace {

void require_shape(double r, const char* fn) {
    if (!(r > 0.0) || !std::isfinite(r)) throw std::domain_error(std::string(fn) + ": r must be positive");
}

}  // namespace

bool StaticParams::valid() const {
    return std::isfinite(alpha) && std::isfinite(phi) && std::isfinite(sigma_eta2) && std::isfinite(r) &&
           phi >= 0.0 && phi < 1.0 && sigma_eta2 > 0.0 && r > 0.0;
}

void StaticParams::validate() const {
    if (!std::isfinite(alpha)) throw std::domain_error("alpha must be finite");
    if (!(phi >= 0.0 && phi < 1.0)) throw std::domain_error("phi must lie in [0, 1)");
    if (!(sigma_eta2 > 0.0) || !std::isfinite(sigma_eta2)) throw std::domain_error("sigma_eta2 must be positive");
    if (!(r > 0.0) || !std::isfinite(r)) throw std::domain_error("r must be positive");
}

bool GammaBelief::valid() const {
    return shape > 0.0 && rate > 0.0 && std::isfinite(shape) && std::isfinite(rate);
}

void GammaBelief::validate() const {
    if (!valid()) throw std::domain_error("Gamma belief needs positive finite shape and rate");
}

ReturnSeries ReturnSeries::centered_from(std::vector<double> raw) {
    if (raw.empty()) throw std::domain_error("return series must be non-empty");
    const double mean = std::accumulate(raw.begin(), raw.end(), 0.0) / static_cast<double>(raw.size());
    for (double& v : raw) v -= mean;
    return ReturnSeries{std::move(raw), true, mean};
}

ReturnSeries ReturnSeries::from_values(std::vector<double> values) {
    if (values.empty()) throw std::domain_error("return series must be non-empty");
    return ReturnSeries{std::move(values), false, 0.0};
}

ReturnSeries ReturnSeries::prefix(std::size_t count) const {
    if (count == 0 || count > values.size()) throw std::domain_error("prefix length out of range");
    return ReturnSeries{std::vector<double>(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(count)),
                        centered, original_mean};
}

std::vector<double> LatentPath::precision() const {
    std::vector<double> out(log_precision.size());
    std::transform(log_precision.begin(), log_precision.end(), out.begin(), [](double l) { return std::exp(l); });
    return out;
}

std::vector<double> LatentPath::volatility() const {
    std::vector<double> out(log_precision.size());
    std::transform(log_precision.begin(), log_precision.end(), out.begin(), [](double l) { return std::exp(-l); });
    return out;
}

void SimulationDesign::validate() const {
    if (!(phi >= 0.0 && phi < 1.0)) throw std::domain_error("design phi must lie in [0, 1)");
    if (!(cv > 0.0) || !std::isfinite(cv)) throw std::domain_error("design cv must be positive");
    if (!(expected_var > 0.0) || !std::isfinite(expected_var)) {
        throw std::domain_error("design expected_var must be positive");
    }
    if (!(r > 0.0) || !std::isfinite(r)) throw std::domain_error("design r must be positive");
    if (n == 0) throw std::domain_error("design n must be positive");
    if (replications == 0) throw std::domain_error("design replications must be positive");
}

double psi_r(double r) {
    require_shape(r, "psi_r");
    return std::exp(0.5 * r * (log_gamma(3.0 / r) - log_gamma(1.0 / r)));
}

double ged_log_normalizer(double r) {
    require_shape(r, "ged_log_normalizer");
    return std::log(r) + 0.5 * log_gamma(3.0 / r) - std::log(2.0) - 1.5 * log_gamma(1.0 / r);
}

double ged_log_density(double y, double lambda, double r) {
    require_shape(r, "ged_log_density");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::domain_error("ged_log_density: lambda must be positive");
    return ged_log_normalizer(r) + std::log(lambda) / r - lambda * psi_r(r) * std::pow(std::abs(y), r);
}

Simulation simulate(const StaticParams& params, std::size_t n, const GammaBelief& init, RngStream& rng,
                    InitialState start) {
    params.validate();
    init.validate();
    if (n == 0) throw std::domain_error("simulate: n must be positive");

    double log_lambda;
    if (start == InitialState::Stationary) {
        const double mean = -params.alpha / (1.0 - params.phi);
        const double var = params.sigma_eta2 / (1.0 - params.phi * params.phi);
        log_lambda = mean + std::sqrt(var) * rng.normal();
    } else {
        log_lambda = std::clamp(sample_log_gamma_variate(init.shape, init.rate, rng), -50.0, 50.0);
    }

    const double sd = std::sqrt(params.sigma_eta2);
    Simulation out;
    out.path.log_precision.reserve(n);
    std::vector<double> y;
    y.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
        log_lambda = -params.alpha + params.phi * log_lambda + sd * rng.normal();
        out.path.log_precision.push_back(log_lambda);
        y.push_back(sample_ged(params.r, std::exp(log_lambda), rng));
    }
    out.series = ReturnSeries::from_values(std::move(y));
    return out;
}

StaticParams params_from_design(const SimulationDesign& design) {
    design.validate();
    // Stationary variance of ln h implied by the CV target.
    const double log_h_var = std::log1p(design.cv);
    StaticParams p;
    p.phi = design.phi;
    p.sigma_eta2 = (1.0 - design.phi * design.phi) * log_h_var;
    p.alpha = (1.0 - design.phi) * (std::log(design.expected_var) - 0.5 * log_h_var);
    p.r = design.r;
    return p;
}

std::array<double, kParamCount> to_unconstrained(const StaticParams& params) {
    params.validate();
    if (params.phi <= 0.0) throw std::domain_error("to_unconstrained: phi on the boundary");
    return {params.alpha, std::log(params.phi / (1.0 - params.phi)), std::log(params.sigma_eta2),
            std::log(params.r)};
}

StaticParams from_unconstrained(std::span<const double, kParamCount> v) {
    for (double x : v) {
        if (!std::isfinite(x)) throw std::domain_error("from_unconstrained: non-finite coordinate");
    }
    StaticParams p;
    p.alpha = v[0];
    p.phi = 1.0 / (1.0 + std::exp(-v[1]));
    p.sigma_eta2 = std::exp(v[2]);
    p.r = std::exp(v[3]);
    if (!p.valid()) throw std::domain_error("from_unconstrained: coordinates map outside the parameter space");
    return p;
}

}  // namespace gedsv
