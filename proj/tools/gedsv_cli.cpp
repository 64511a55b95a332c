// gedsv: command-line front end.
//
// Every run is first resolved into a JSON config (all defaults filled in), and
// the subcommand reads nothing but that config. Outputs embed it, so
// `gedsv --config <previous output>` repeats a run byte for byte.

#include "gedsv/bench.hpp"
#include "gedsv/errors.hpp"
#include "gedsv/filter.hpp"
#include "gedsv/inference.hpp"
#include "gedsv/io.hpp"
#include "gedsv/smoother.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifndef GEDSV_VERSION
#define GEDSV_VERSION "unknown"
#endif

using namespace gedsv;
using json = nlohmann::ordered_json;

namespace {

enum ExitCode { kOk = 0, kInputError = 2, kNumericFailure = 3, kNotConverged = 4 };

// Raised when a fit the subcommand depends on did not converge.
struct NotConverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Cell {
    std::string text;
    bool numeric;
};

Cell num(double v) { return {format_number(v), true}; }
Cell num(std::size_t v) { return {std::to_string(v), true}; }
Cell num(const std::optional<double>& v) { return v ? num(*v) : Cell{"NA", true}; }
Cell str(std::string s) { return {std::move(s), false}; }

struct Output {
    std::vector<std::pair<std::string, Cell>> summary;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    int exit_code = kOk;
    std::string exit_detail;
};

// ---------------------------------------------------------------------------
// config -> library types

std::vector<std::string> data_subcommands() {
    return {"fit-mode", "fit-mcmc", "filter", "smooth", "forecast", "evaluate"};
}

bool uses_data(const std::string& sub) {
    for (const auto& s : data_subcommands())
        if (s == sub) return true;
    return false;
}

char single_char(const json& j, const char* what) {
    const auto s = j.get<std::string>();
    if (s.size() != 1) throw InputError(std::string(what) + " must be a single character");
    return s[0];
}

ReturnSeries load_series(const json& in) {
    ColumnMapping m;
    if (!in["date"].is_null()) m.date = in["date"].get<std::string>();
    if (!in["price"].is_null()) m.price = in["price"].get<std::string>();
    if (!in["return"].is_null()) m.returns = in["return"].get<std::string>();
    m.delimiter = single_char(in["delimiter"], "input delimiter");
    m.center = in["center"].get<bool>();
    m.validate();
    return ingest(std::filesystem::path(in["path"].get<std::string>()), m).series;
}

ParamPrior make_prior(const json& j) {
    const auto kind = prior_kind_from_string(j["kind"].get<std::string>());
    const double p1 = j["p1"].get<double>();
    const double p2 = j["p2"].get<double>();
    switch (kind) {
        case PriorKind::Uniform: return ParamPrior::uniform(p1, p2);
        case PriorKind::Normal: return ParamPrior::normal(p1, p2);
        case PriorKind::ShiftedBeta: return ParamPrior::shifted_beta(p1, p2);
        case PriorKind::InverseGamma: return ParamPrior::inverse_gamma(p1, p2);
        case PriorKind::Gamma: return ParamPrior::gamma(p1, p2);
    }
    throw InputError("unknown prior kind");
}

PriorSpec make_priors(const json& j) {
    PriorSpec spec;
    for (std::size_t i = 0; i < kParamCount; ++i) spec.params[i] = make_prior(j[kParamNames[i]]);
    spec.validate();
    return spec;
}

FixedParams make_fixed(const json& cfg) {
    FixedParams fixed;
    if (!cfg["fixed_r"].is_null()) fixed[3] = cfg["fixed_r"].get<double>();
    return fixed;
}

ModeOptions make_mode_options(const json& cfg) {
    ModeOptions o;
    const auto& opt = cfg["optimizer"];
    o.bfgs.gradient_tolerance = opt["gradient_tolerance"].get<double>();
    o.bfgs.max_iterations = opt["max_iterations"].get<std::size_t>();
    o.bfgs.relative_step = opt["relative_step"].get<double>();
    o.fixed = make_fixed(cfg);
    return o;
}

std::optional<StaticParams> given_params(const json& cfg) {
    if (cfg["params"].is_null()) return std::nullopt;
    const auto& p = cfg["params"];
    StaticParams out{p["alpha"].get<double>(), p["phi"].get<double>(), p["sigma_eta2"].get<double>(),
                     p["r"].get<double>()};
    out.validate();
    return out;
}

ModeResult fit_mode(const ReturnSeries& series, const json& cfg) {
    return posterior_mode(series, make_priors(cfg["priors"]), default_start(series), make_mode_options(cfg));
}

void add_params(Output& out, const StaticParams& p) {
    for (std::size_t i = 0; i < kParamCount; ++i) out.summary.emplace_back(kParamNames[i], num(get(p, i)));
}

// Parameters given in the config, or the posterior mode of the series.
StaticParams resolve_params(const ReturnSeries& series, const json& cfg, Output& out) {
    if (auto p = given_params(cfg)) {
        out.summary.emplace_back("params", str("given"));
        add_params(out, *p);
        return *p;
    }
    const auto mode = fit_mode(series, cfg);
    if (!mode.converged) throw NotConverged("posterior mode: " + mode.message);
    out.summary.emplace_back("params", str("posterior-mode"));
    add_params(out, mode.params);
    return mode.params;
}

// ---------------------------------------------------------------------------
// subcommands

SimulationDesign make_design(const json& d, std::uint64_t seed) {
    SimulationDesign design{d["phi"].get<double>(), d["cv"].get<double>(), d["expected_var"].get<double>(),
                            d["r"].get<double>(),   d["n"].get<std::size_t>(), 1, seed};
    design.validate();
    return design;
}

Output run_simulate(const json& cfg) {
    const auto design = make_design(cfg["design"], cfg["seed"].get<std::uint64_t>());
    const auto params = params_from_design(design);
    RngStream rng(design.seed, 0);
    const auto sim = simulate(params, design.n, kDiffuseInitialBelief, rng, InitialState::Stationary);
    Output out;
    add_params(out, params);
    out.columns = {"t", "y", "h"};
    const auto h = sim.path.volatility();
    for (std::size_t t = 0; t < sim.series.size(); ++t) out.rows.push_back({num(t + 1), num(sim.series.values[t]), num(h[t])});
    return out;
}

Output run_fit_mode(const json& cfg) {
    const auto series = load_series(cfg["input"]);
    const auto priors = make_priors(cfg["priors"]);
    const auto options = make_mode_options(cfg);
    const auto mode = posterior_mode(series, priors, default_start(series), options);
    Output out;
    out.summary.emplace_back("n", num(series.size()));
    out.summary.emplace_back("converged", str(mode.converged ? "true" : "false"));
    out.summary.emplace_back("iterations", num(mode.iterations));
    out.summary.emplace_back("log_posterior", num(mode.log_posterior));
    out.summary.emplace_back("gradient_norm", num(mode.gradient_norm));
    std::optional<double> laplace;
    if (mode.converged) {
        try {
            laplace = marginal_loglik_laplace(series, priors, mode.params, options.fixed);
        } catch (const NumericFailure&) {
        }
    }
    out.summary.emplace_back("log_marginal_laplace", num(laplace));
    out.columns = {"parameter", "estimate", "fixed"};
    for (std::size_t i = 0; i < kParamCount; ++i)
        out.rows.push_back({str(kParamNames[i]), num(get(mode.params, i)), str(options.fixed[i] ? "true" : "false")});
    if (!mode.converged) {
        out.exit_code = kNotConverged;
        out.exit_detail = "posterior mode: " + mode.message;
    }
    return out;
}

Output run_fit_mcmc(const json& cfg) {
    const auto series = load_series(cfg["input"]);
    const auto priors = make_priors(cfg["priors"]);
    const auto mode = fit_mode(series, cfg);
    if (!mode.converged) throw NotConverged("posterior mode: " + mode.message);

    const auto& m = cfg["mcmc"];
    McmcConfig mc;
    mc.chains = m["chains"].get<std::size_t>();
    mc.iterations = m["iterations"].get<std::size_t>();
    mc.burn_in = m["burn_in"].get<std::size_t>();
    mc.proposal_sd = m["proposal_sd"].get<std::array<double, kParamCount>>();
    mc.stall_limit = m["stall_limit"].get<std::size_t>();
    mc.overdispersion = m["overdispersion"].get<double>();
    mc.seed = cfg["seed"].get<std::uint64_t>();
    mc.fixed = make_fixed(cfg);
    mc.parallel = false;
    mc.validate();

    Output out;
    out.summary.emplace_back("n", num(series.size()));
    if (!m["tune_target"].is_null()) {
        const auto tuned = tune_proposals(series, priors, mc, mode.params, m["tune_target"].get<double>());
        mc.proposal_sd = tuned.proposal_sd;
        out.summary.emplace_back("tuning_rounds", num(tuned.rounds));
    }
    const auto samples = run_mcmc(series, priors, mc, mode.params);
    out.summary.emplace_back("draws", num(samples.size()));
    out.columns = {"parameter", "mode", "mean", "median", "lower95", "upper95", "rhat", "acceptance"};
    for (std::size_t i = 0; i < kParamCount; ++i) {
        const auto s = summarize(samples, i);
        const bool fixed = mc.fixed[i].has_value();
        out.rows.push_back({str(kParamNames[i]), num(get(mode.params, i)), num(s.mean), num(s.median),
                            num(s.lower95), num(s.upper95),
                            fixed ? num(std::nullopt) : num(split_rhat(samples, i)),
                            fixed ? num(std::nullopt) : num(samples.acceptance_rate[i])});
    }
    return out;
}

Output run_filter_cmd(const json& cfg) {
    const auto series = load_series(cfg["input"]);
    Output out;
    const auto params = resolve_params(series, cfg, out);
    const auto f = run_filter(series, params);
    out.summary.emplace_back("loglik", num(f.total_loglik));
    out.columns = {"t", "y", "prior_shape", "prior_rate", "posterior_shape", "posterior_rate", "log_predictive"};
    for (std::size_t t = 0; t < f.size(); ++t) {
        out.rows.push_back({num(t + 1), num(series.values[t]), num(f.priors[t].shape), num(f.priors[t].rate),
                            num(f.posteriors[t].shape), num(f.posteriors[t].rate), num(f.log_predictive[t])});
    }
    return out;
}

Output run_smooth(const json& cfg) {
    const auto series = load_series(cfg["input"]);
    Output out;
    const auto params = resolve_params(series, cfg, out);
    const auto draws = smooth(series, std::span<const StaticParams>(&params, 1), cfg["draws"].get<std::size_t>(),
                              cfg["seed"].get<std::uint64_t>());
    const auto s = smoothed_volatility_summary(draws);
    out.columns = {"t", "mean", "lower95", "upper95"};
    for (std::size_t t = 0; t < s.mean.size(); ++t)
        out.rows.push_back({num(t + 1), num(s.mean[t]), num(s.lower95[t]), num(s.upper95[t])});
    return out;
}

Output run_forecast(const json& cfg) {
    const auto series = load_series(cfg["input"]);
    Output out;
    const auto params = resolve_params(series, cfg, out);
    const auto f = forecast_volatility(run_filter(series, params).posteriors.back(), params,
                                       cfg["horizon"].get<std::size_t>());
    out.columns = {"horizon", "shape", "rate", "mean", "lower95", "upper95"};
    for (std::size_t h = 0; h < f.horizon; ++h) {
        out.rows.push_back({num(h + 1), num(f.beliefs[h].shape), num(f.beliefs[h].rate), num(f.means[h]),
                            num(f.lower95[h]), num(f.upper95[h])});
    }
    return out;
}

Output run_evaluate(const json& cfg) {
    const auto series = load_series(cfg["input"]);
    const auto given = given_params(cfg);
    const auto forecaster = given ? filter_forecaster(*given)
                                  : posterior_mode_forecaster(make_priors(cfg["priors"]), make_mode_options(cfg));
    const auto folds = cfg["folds"].get<std::size_t>();
    const auto oos = out_of_sample_eval(series, forecaster, folds);
    Output out;
    const auto params = resolve_params(series, cfg, out);
    const auto ins = in_sample_eval(series, params, cfg["draws"].get<std::size_t>(), cfg["seed"].get<std::uint64_t>());
    out.columns = {"sample", "points", "srmse", "mae"};
    out.rows.push_back({str("in"), num(ins.proxies.size()), num(ins.srmse), num(ins.mae)});
    out.rows.push_back({str("out"), num(oos.proxies.size()), num(oos.srmse), num(oos.mae)});
    return out;
}

std::vector<std::string> split(const std::string& line, char delimiter) {
    std::vector<std::string> parts;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, delimiter)) parts.push_back(field);
    return parts;
}

Output run_bench(const json& cfg) {
    const auto& b = cfg["bench"];
    const auto seed = cfg["seed"].get<std::uint64_t>();
    const auto reps = b["replications"].get<std::size_t>();
    std::vector<SimulationDesign> designs;
    if (b["grid"].get<bool>()) {
        designs = table1_grid(reps, cfg["design"]["n"].get<std::size_t>(), seed);
    } else {
        auto d = make_design(cfg["design"], seed);
        d.replications = reps;
        designs.push_back(d);
    }
    const auto fit = b["fit"].get<std::string>();
    CellOptions options;
    options.priors = make_priors(cfg["priors"]);
    options.bfgs = make_mode_options(cfg).bfgs;
    options.threads = b["threads"].get<std::size_t>();
    std::vector<CellResult> cells;
    for (const auto& d : designs) {
        if (fit != "normal") cells.push_back(run_table1_cell(d, true, options));
        if (fit != "ged") cells.push_back(run_table1_cell(d, false, options));
    }
    std::ostringstream table;
    write_cell_results(table, cells, ',');
    Output out;
    std::size_t failed = 0;
    for (const auto& c : cells) failed += c.cell_failed();
    out.summary.emplace_back("cells", num(cells.size()));
    out.summary.emplace_back("failed_cells", num(failed));
    std::istringstream lines(table.str());
    std::string line;
    std::getline(lines, line);
    out.columns = split(line, ',');
    while (std::getline(lines, line)) {
        std::vector<Cell> row;
        for (auto& field : split(line, ',')) {
            const bool text = field == "normal" || field == "ged";
            row.push_back({std::move(field), !text});
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

Output execute(const json& cfg) {
    const auto sub = cfg["subcommand"].get<std::string>();
    if (sub == "simulate") return run_simulate(cfg);
    if (sub == "fit-mode") return run_fit_mode(cfg);
    if (sub == "fit-mcmc") return run_fit_mcmc(cfg);
    if (sub == "filter") return run_filter_cmd(cfg);
    if (sub == "smooth") return run_smooth(cfg);
    if (sub == "forecast") return run_forecast(cfg);
    if (sub == "evaluate") return run_evaluate(cfg);
    if (sub == "bench") return run_bench(cfg);
    throw InputError("unknown subcommand '" + sub + "'");
}

// ---------------------------------------------------------------------------
// output

std::string json_cell(const Cell& c) {
    if (!c.numeric) return json(c.text).dump();
    if (c.text == "NA" || c.text == "inf" || c.text == "-inf" || c.text == "nan") return "null";
    return c.text;
}

std::string render(const json& cfg, const Output& out) {
    std::ostringstream os;
    const std::string seed = std::to_string(cfg["seed"].get<std::uint64_t>());
    if (cfg["format"] == "json") {
        os << "{\n  \"version\": " << json(GEDSV_VERSION).dump() << ",\n  \"seed\": " << seed
           << ",\n  \"config\": " << cfg.dump() << ",\n  \"summary\": {";
        for (std::size_t i = 0; i < out.summary.size(); ++i)
            os << (i ? ", " : "") << json(out.summary[i].first).dump() << ": " << json_cell(out.summary[i].second);
        os << "},\n  \"columns\": [";
        for (std::size_t i = 0; i < out.columns.size(); ++i) os << (i ? ", " : "") << json(out.columns[i]).dump();
        os << "],\n  \"rows\": [";
        for (std::size_t r = 0; r < out.rows.size(); ++r) {
            os << (r ? ",\n    [" : "\n    [");
            for (std::size_t i = 0; i < out.rows[r].size(); ++i) os << (i ? ", " : "") << json_cell(out.rows[r][i]);
            os << "]";
        }
        os << (out.rows.empty() ? "]\n}\n" : "\n  ]\n}\n");
        return os.str();
    }
    const char d = cfg["delimiter"].get<std::string>()[0];
    os << "# version " << GEDSV_VERSION << "\n# seed " << seed << "\n# config " << cfg.dump() << "\n";
    for (const auto& [key, value] : out.summary) os << "# " << key << " " << value.text << "\n";
    for (std::size_t i = 0; i < out.columns.size(); ++i) os << (i ? std::string(1, d) : "") << out.columns[i];
    os << "\n";
    for (const auto& row : out.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? std::string(1, d) : "") << row[i].text;
        os << "\n";
    }
    return os.str();
}

// Accepts a bare config object, a JSON output document or a delimited output file.
json read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '#') {
        std::istringstream lines(text);
        std::string line;
        std::size_t number = 0;
        while (std::getline(lines, line)) {
            ++number;
            if (line.rfind("# config ", 0) == 0) {
                try {
                    return json::parse(line.substr(9));
                } catch (const json::exception& e) {
                    throw InputError(std::string("malformed config: ") + e.what(), number);
                }
            }
            if (line.empty() || line[0] != '#') break;
        }
        throw InputError("no '# config' line in '" + path + "'");
    }
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed config: ") + e.what());
    }
    if (j.contains("config") && j.contains("version")) return j["config"];
    return j;
}

// ---------------------------------------------------------------------------
// command line -> config

struct Options {
    std::uint64_t seed = 1;
    std::string format = "csv";
    std::string delimiter = ",";
    // input
    std::string input;
    std::string date_col;
    std::string price_col;
    std::string return_col;
    std::string input_delimiter = ",";
    bool no_center = false;
    // model
    std::optional<double> alpha, phi, sigma_eta2, r;
    std::vector<std::string> priors;
    bool normal = false;
    double gradient_tolerance = 1e-6;
    std::size_t max_iterations = 500;
    double relative_step = 1e-5;
    // design
    double design_phi = 0.95, cv = 1.0, expected_var = 0.0009, design_r = 2.0;
    std::size_t n = 500;
    // mcmc
    std::size_t chains = 2, iterations = 5000, burn_in = 4000, stall_limit = 500;
    std::vector<double> proposal_sd{0.05, 0.01, 0.01, 0.1};
    double overdispersion = 5.0;
    std::optional<double> tune;
    // misc
    std::size_t draws = 1000, horizon = 10, folds = 5, replications = 50, threads = 0;
    bool grid = false;
    std::string fit = "both";
};

json prior_json(const ParamPrior& p) { return {{"kind", to_string(p.kind)}, {"p1", p.p1}, {"p2", p.p2}}; }

json priors_json(const Options& o) {
    const auto defaults = PriorSpec::vague_uniform();
    json j;
    for (std::size_t i = 0; i < kParamCount; ++i) j[kParamNames[i]] = prior_json(defaults.params[i]);
    for (const auto& spec : o.priors) {
        const auto eq = spec.find('=');
        const auto parts = split(eq == std::string::npos ? "" : spec.substr(eq + 1), ':');
        if (eq == std::string::npos || parts.size() != 3)
            throw InputError("prior '" + spec + "' is not NAME=KIND:P1:P2");
        const auto name = spec.substr(0, eq);
        if (!j.contains(name)) throw InputError("unknown parameter '" + name + "' in prior");
        try {
            j[name] = {{"kind", parts[0]}, {"p1", std::stod(parts[1])}, {"p2", std::stod(parts[2])}};
        } catch (const std::exception&) {
            throw InputError("prior '" + spec + "' has a non-numeric bound");
        }
    }
    return j;
}

json build_config(const std::string& sub, const Options& o) {
    json cfg;
    cfg["subcommand"] = sub;
    cfg["seed"] = o.seed;
    cfg["format"] = o.format;
    cfg["delimiter"] = o.delimiter;
    auto optional_string = [](const std::string& s) { return s.empty() ? json(nullptr) : json(s); };
    if (uses_data(sub)) {
        cfg["input"] = {{"path", o.input},
                        {"date", optional_string(o.date_col)},
                        {"price", optional_string(o.price_col)},
                        {"return", optional_string(o.return_col)},
                        {"delimiter", o.input_delimiter},
                        {"center", !o.no_center}};
    }
    if (sub == "simulate" || sub == "bench") {
        cfg["design"] = {{"phi", o.design_phi}, {"cv", o.cv}, {"expected_var", o.expected_var}, {"r", o.design_r},
                         {"n", o.n}};
    }
    if (sub != "simulate") {
        cfg["priors"] = priors_json(o);
        cfg["fixed_r"] = o.normal ? json(2.0) : json(nullptr);
        cfg["optimizer"] = {{"gradient_tolerance", o.gradient_tolerance},
                            {"max_iterations", o.max_iterations},
                            {"relative_step", o.relative_step}};
    }
    if (sub == "filter" || sub == "smooth" || sub == "forecast" || sub == "evaluate") {
        const int given = o.alpha.has_value() + o.phi.has_value() + o.sigma_eta2.has_value() + o.r.has_value();
        if (given != 0 && given != kParamCount)
            throw InputError("give all of --alpha, --phi, --sigma-eta2, --r or none of them");
        cfg["params"] = given ? json{{"alpha", *o.alpha}, {"phi", *o.phi}, {"sigma_eta2", *o.sigma_eta2}, {"r", *o.r}}
                              : json(nullptr);
    }
    if (sub == "fit-mcmc") {
        if (o.proposal_sd.size() != kParamCount) throw InputError("--proposal-sd takes four values");
        cfg["mcmc"] = {{"chains", o.chains},
                       {"iterations", o.iterations},
                       {"burn_in", o.burn_in},
                       {"proposal_sd", o.proposal_sd},
                       {"stall_limit", o.stall_limit},
                       {"overdispersion", o.overdispersion},
                       {"tune_target", o.tune ? json(*o.tune) : json(nullptr)}};
    }
    if (sub == "smooth" || sub == "evaluate") cfg["draws"] = o.draws;
    if (sub == "forecast") cfg["horizon"] = o.horizon;
    if (sub == "evaluate") cfg["folds"] = o.folds;
    if (sub == "bench") cfg["bench"] = {{"grid", o.grid}, {"replications", o.replications}, {"fit", o.fit}, {"threads", o.threads}};
    return cfg;
}

void add_output_options(CLI::App* app, Options& o) {
    app->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    app->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app->add_option("--delimiter", o.delimiter, "Output delimiter for csv")->capture_default_str();
}

void add_input_options(CLI::App* app, Options& o) {
    app->add_option("--input", o.input, "Delimited data file with a header row")->required();
    app->add_option("--date-col", o.date_col, "Date column");
    app->add_option("--price-col", o.price_col, "Price column (returns are 100 ln P_t/P_{t-1})");
    app->add_option("--return-col", o.return_col, "Return column");
    app->add_option("--input-delimiter", o.input_delimiter, "Input delimiter")->capture_default_str();
    app->add_flag("--no-center", o.no_center, "Do not subtract the sample mean");
}

void add_fit_options(CLI::App* app, Options& o) {
    app->add_option("--prior", o.priors, "NAME=KIND:P1:P2, e.g. phi=beta:20:1.5 (repeatable)");
    app->add_flag("--normal", o.normal, "Hold r at 2");
    app->add_option("--gradient-tolerance", o.gradient_tolerance)->capture_default_str();
    app->add_option("--max-iterations", o.max_iterations)->capture_default_str();
    app->add_option("--relative-step", o.relative_step)->capture_default_str();
}

void add_param_options(CLI::App* app, Options& o) {
    app->add_option("--alpha", o.alpha, "Fixed parameters; when omitted the posterior mode is used");
    app->add_option("--phi", o.phi);
    app->add_option("--sigma-eta2", o.sigma_eta2);
    app->add_option("--r", o.r);
}

void add_design_options(CLI::App* app, Options& o) {
    app->add_option("--phi", o.design_phi, "Persistence")->capture_default_str();
    app->add_option("--cv", o.cv, "Coefficient of variation of h")->capture_default_str();
    app->add_option("--expected-var", o.expected_var, "E[h]")->capture_default_str();
    app->add_option("--r", o.design_r, "GED shape")->capture_default_str();
    app->add_option("--n", o.n, "Series length")->capture_default_str();
}

int fail(const char* category, const std::string& detail, int code) {
    std::string flat = detail;
    for (char& c : flat)
        if (c == '\n' || c == '\r') c = ' ';
    std::cerr << "error: " << category << ": " << flat << "\n";
    return code;
}

int run(int argc, char** argv) {
    CLI::App app{"Bayesian GED-Gamma stochastic volatility"};
    app.set_version_flag("--version", GEDSV_VERSION);
    Options o;
    std::string config_path;
    std::string output_path;
    app.add_option("--config", config_path, "Replay the config embedded in a previous output (or a JSON config)");
    app.add_option("--output", output_path, "Output file (default stdout)");
    app.require_subcommand(0, 1);
    app.fallthrough();

    auto* simulate_cmd = app.add_subcommand("simulate", "Simulate returns and volatilities from a design cell");
    add_output_options(simulate_cmd, o);
    add_design_options(simulate_cmd, o);

    auto* fit_mode_cmd = app.add_subcommand("fit-mode", "Posterior mode of the static parameters");
    auto* fit_mcmc_cmd = app.add_subcommand("fit-mcmc", "Posterior summaries by MCMC");
    auto* filter_cmd = app.add_subcommand("filter", "Per-step filtered beliefs and predictive densities");
    auto* smooth_cmd = app.add_subcommand("smooth", "Smoothed volatility with a 95% band");
    auto* forecast_cmd = app.add_subcommand("forecast", "Volatility forecasts");
    auto* evaluate_cmd = app.add_subcommand("evaluate", "In-sample and out-of-sample SRMSE and MAE");
    for (auto* cmd : {fit_mode_cmd, fit_mcmc_cmd, filter_cmd, smooth_cmd, forecast_cmd, evaluate_cmd}) {
        add_output_options(cmd, o);
        add_input_options(cmd, o);
        add_fit_options(cmd, o);
    }
    for (auto* cmd : {filter_cmd, smooth_cmd, forecast_cmd, evaluate_cmd}) add_param_options(cmd, o);
    for (auto* cmd : {smooth_cmd, evaluate_cmd})
        cmd->add_option("--draws", o.draws, "Smoothed paths")->capture_default_str();
    forecast_cmd->add_option("--horizon", o.horizon)->capture_default_str();
    evaluate_cmd->add_option("--folds", o.folds, "Held-out observations")->capture_default_str();
    fit_mcmc_cmd->add_option("--chains", o.chains)->capture_default_str();
    fit_mcmc_cmd->add_option("--iterations", o.iterations)->capture_default_str();
    fit_mcmc_cmd->add_option("--burn-in", o.burn_in)->capture_default_str();
    fit_mcmc_cmd->add_option("--proposal-sd", o.proposal_sd, "Four values: alpha phi sigma_eta2 r")->expected(4);
    fit_mcmc_cmd->add_option("--stall-limit", o.stall_limit)->capture_default_str();
    fit_mcmc_cmd->add_option("--overdispersion", o.overdispersion)->capture_default_str();
    fit_mcmc_cmd->add_option("--tune", o.tune, "Tune proposals to this acceptance rate first");

    auto* bench_cmd = app.add_subcommand("bench", "Posterior-mode simulation study");
    add_output_options(bench_cmd, o);
    add_design_options(bench_cmd, o);
    add_fit_options(bench_cmd, o);
    bench_cmd->add_option("--replications", o.replications)->capture_default_str();
    bench_cmd->add_flag("--grid", o.grid, "Run all eighteen design cells");
    bench_cmd->add_option("--fit", o.fit, "ged, normal or both")->check(CLI::IsMember({"ged", "normal", "both"}))->capture_default_str();
    bench_cmd->add_option("--threads", o.threads, "Worker threads, 0 for all cores")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), kInputError);
    }

    try {
        json cfg;
        const auto subs = app.get_subcommands();
        if (!config_path.empty()) {
            if (!subs.empty()) throw InputError("--config replays a run; do not combine it with a subcommand");
            cfg = read_config(config_path);
        } else if (subs.empty()) {
            throw InputError("a subcommand or --config is required");
        } else {
            const std::string sub = subs.front()->get_name();
            if (o.delimiter.size() != 1) throw InputError("--delimiter must be a single character");
            if (uses_data(sub) && (o.price_col.empty() == o.return_col.empty()))
                throw InputError("give exactly one of --price-col and --return-col");
            cfg = build_config(sub, o);
        }
        Output out;
        try {
            out = execute(cfg);
        } catch (const json::exception& e) {
            throw InputError(std::string("config: ") + e.what());
        }
        const std::string text = render(cfg, out);
        if (output_path.empty()) {
            std::cout << text << std::flush;
        } else {
            std::ofstream file(output_path, std::ios::binary);
            if (!(file << text)) throw InputError("cannot write '" + output_path + "'");
        }
        if (out.exit_code != kOk) return fail("convergence", out.exit_detail, out.exit_code);
        return kOk;
    } catch (const InputError& e) {
        return fail("input", e.what(), kInputError);
    } catch (const NotConverged& e) {
        return fail("convergence", e.what(), kNotConverged);
    } catch (const ConvergenceFailure& e) {
        return fail("convergence", e.what(), kNotConverged);
    } catch (const NumericFailure& e) {
        return fail("numeric", e.what(), kNumericFailure);
    } catch (const std::domain_error& e) {
        return fail("input", e.what(), kInputError);
    } catch (const std::invalid_argument& e) {
        return fail("input", e.what(), kInputError);
    }
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        return fail("internal", e.what(), 1);
    }
}
