// Command-line front end: every subcommand reads a JSON run configuration,
// writes its artifacts under the output directory with fixed file names and
// echoes the resolved configuration there as resolved_config.json.
//
// Exit codes: 0 success, 1 input error, 2 numerical failure or non-convergence
// (artifacts are still written where possible).

#include <ppm/ppm.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_input = 1;
constexpr int exit_numerical = 2;

struct CliError : std::runtime_error {
    CliError(int code, const std::string& message) : std::runtime_error(message), code(code) {}
    int code;
};

[[noreturn]] void input_error(const std::string& message) { throw CliError(exit_input, message); }

void check(ppm_status status, const std::string& context) {
    if (status == PPM_OK) return;
    const int code = status == PPM_ERROR_NUMERICAL ? exit_numerical : exit_input;
    throw CliError(code, context + ": " + ppm_last_error());
}

template <class T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const { Free(p); }
};

template <class T, void (*Free)(T*)>
using Handle = std::unique_ptr<T, Deleter<T, Free>>;

using Region = Handle<ppm_region, ppm_region_free>;
using Points = Handle<ppm_points, ppm_points_free>;
using Raster = Handle<ppm_raster, ppm_raster_free>;
using Stack = Handle<ppm_stack, ppm_stack_free>;
using Model = Handle<ppm_model, ppm_model_free>;
using Fit = Handle<ppm_fit, ppm_fit_free>;
using Refinement = Handle<ppm_refinement, ppm_refinement_free>;
using Selection = Handle<ppm_selection, ppm_selection_free>;
using KFunction = Handle<ppm_kfunction, ppm_kfunction_free>;
using Experiment = Handle<ppm_experiment, ppm_experiment_free>;

// ---- configuration --------------------------------------------------------

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
    if (!obj.is_object()) input_error(where + " must be a JSON object");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.count(key)) input_error("unknown key '" + key + "' in " + where);
    }
}

template <class T>
T get_or(const json& obj, const std::string& key, T fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        input_error("invalid value for '" + key + "' in " + where);
    }
}

struct Covariate {
    std::string name;
    std::string path;
};

struct ModelConfig {
    std::vector<std::string> variables;
    bool quadratic = false;
    bool standardize = true;
};

struct QuadratureConfig {
    double spacing = 0.0;
    bool refine = false;
    double tol = 1.0;
    std::size_t max_steps = 6;
};

struct SelectConfig {
    std::vector<std::string> variables;
    std::optional<bool> quadratic;
};

struct DiagnoseConfig {
    std::size_t n_sim = 99;
    double level = 0.95;
    std::optional<double> r_max;
    std::size_t n_r = 51;
    std::string fit;
};

struct CompareConfig {
    std::string mode = "grid";
    std::vector<double> spacings;
    std::vector<std::uint64_t> pseudo_absences;
    std::size_t replicates = 1;
};

struct SimulateConfig {
    std::string intensity;
    std::string fit;
    std::optional<double> lambda;
};

struct RunConfig {
    std::string presences;
    std::string mask;
    std::vector<Covariate> covariates;
    ModelConfig model;
    std::optional<QuadratureConfig> quadrature;
    std::uint64_t seed = 0;
    std::string output;
    SelectConfig select;
    DiagnoseConfig diagnose;
    CompareConfig compare;
    SimulateConfig simulate;
    std::string predict_fit;
};

std::string resolve(const fs::path& base, const std::string& p) {
    if (p.empty()) return p;
    const fs::path path(p);
    return (path.is_absolute() ? path : base / path).lexically_normal().string();
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) input_error("cannot open config " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        input_error("config " + path + ": " + e.what());
    }
    reject_unknown(j,
                   {"presences", "mask", "covariates", "model", "quadrature", "seed", "output",
                    "select", "diagnose", "compare_logistic", "simulate", "predict"},
                   "config");
    const fs::path base = fs::absolute(fs::path(path)).parent_path();
    RunConfig c;
    c.presences = resolve(base, get_or<std::string>(j, "presences", "", "config"));
    c.mask = resolve(base, get_or<std::string>(j, "mask", "", "config"));
    c.output = resolve(base, get_or<std::string>(j, "output", "", "config"));
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) input_error("seed must be a non-negative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }

    if (j.contains("covariates")) {
        if (!j["covariates"].is_array()) input_error("covariates must be an array");
        std::set<std::string> seen;
        for (const auto& item : j["covariates"]) {
            reject_unknown(item, {"name", "path"}, "covariates entry");
            if (!item.contains("name") || !item.contains("path"))
                input_error("each covariate needs 'name' and 'path'");
            Covariate cov{get_or<std::string>(item, "name", "", "covariates entry"),
                          resolve(base, get_or<std::string>(item, "path", "", "covariates entry"))};
            if (cov.name.empty()) input_error("covariate name is empty");
            if (!seen.insert(cov.name).second) input_error("duplicate covariate '" + cov.name + "'");
            c.covariates.push_back(std::move(cov));
        }
    }

    if (j.contains("model")) {
        const auto& m = j["model"];
        reject_unknown(m, {"variables", "quadratic", "standardize"}, "model");
        c.model.variables = get_or<std::vector<std::string>>(m, "variables", {}, "model");
        c.model.quadratic = get_or<bool>(m, "quadratic", false, "model");
        c.model.standardize = get_or<bool>(m, "standardize", true, "model");
    }
    if (c.model.variables.empty())
        for (const auto& cov : c.covariates) c.model.variables.push_back(cov.name);

    if (j.contains("quadrature")) {
        const auto& q = j["quadrature"];
        reject_unknown(q, {"spacing", "refine", "tol", "max_steps"}, "quadrature");
        QuadratureConfig qc;
        qc.spacing = get_or<double>(q, "spacing", 0.0, "quadrature");
        if (!(qc.spacing > 0.0)) input_error("quadrature.spacing must be positive");
        qc.refine = get_or<bool>(q, "refine", false, "quadrature");
        qc.tol = get_or<double>(q, "tol", 1.0, "quadrature");
        if (!(qc.tol > 0.0)) input_error("quadrature.tol must be positive");
        qc.max_steps = get_or<std::size_t>(q, "max_steps", 6, "quadrature");
        if (qc.max_steps == 0) input_error("quadrature.max_steps must be at least 1");
        c.quadrature = qc;
    }

    if (j.contains("select")) {
        const auto& s = j["select"];
        reject_unknown(s, {"variables", "family"}, "select");
        c.select.variables = get_or<std::vector<std::string>>(s, "variables", {}, "select");
        const auto family = get_or<std::string>(s, "family", "", "select");
        if (family == "linear") c.select.quadratic = false;
        else if (family == "quadratic") c.select.quadratic = true;
        else if (!family.empty()) input_error("select.family must be 'linear' or 'quadratic'");
    }

    if (j.contains("diagnose")) {
        const auto& d = j["diagnose"];
        reject_unknown(d, {"n_sim", "level", "r_max", "n_r", "fit"}, "diagnose");
        c.diagnose.n_sim = get_or<std::size_t>(d, "n_sim", 99, "diagnose");
        c.diagnose.level = get_or<double>(d, "level", 0.95, "diagnose");
        if (d.contains("r_max")) c.diagnose.r_max = get_or<double>(d, "r_max", 0.0, "diagnose");
        c.diagnose.n_r = get_or<std::size_t>(d, "n_r", 51, "diagnose");
        c.diagnose.fit = resolve(base, get_or<std::string>(d, "fit", "", "diagnose"));
    }

    if (j.contains("compare_logistic")) {
        const auto& e = j["compare_logistic"];
        reject_unknown(e, {"mode", "spacings", "pseudo_absences", "replicates"}, "compare_logistic");
        c.compare.mode = get_or<std::string>(e, "mode", "grid", "compare_logistic");
        if (c.compare.mode != "grid" && c.compare.mode != "random" && c.compare.mode != "both")
            input_error("compare_logistic.mode must be 'grid', 'random' or 'both'");
        c.compare.spacings = get_or<std::vector<double>>(e, "spacings", {}, "compare_logistic");
        c.compare.pseudo_absences =
            get_or<std::vector<std::uint64_t>>(e, "pseudo_absences", {}, "compare_logistic");
        c.compare.replicates = get_or<std::size_t>(e, "replicates", 1, "compare_logistic");
    }

    if (j.contains("simulate")) {
        const auto& s = j["simulate"];
        reject_unknown(s, {"intensity", "fit", "lambda"}, "simulate");
        c.simulate.intensity = resolve(base, get_or<std::string>(s, "intensity", "", "simulate"));
        c.simulate.fit = resolve(base, get_or<std::string>(s, "fit", "", "simulate"));
        if (s.contains("lambda")) c.simulate.lambda = get_or<double>(s, "lambda", 0.0, "simulate");
    }

    if (j.contains("predict")) {
        const auto& p = j["predict"];
        reject_unknown(p, {"fit"}, "predict");
        c.predict_fit = resolve(base, get_or<std::string>(p, "fit", "", "predict"));
    }
    return c;
}

ordered_json config_echo(const std::string& command, const RunConfig& c) {
    ordered_json j;
    j["command"] = command;
    j["presences"] = c.presences;
    j["mask"] = c.mask;
    j["covariates"] = ordered_json::array();
    for (const auto& cov : c.covariates) j["covariates"].push_back({{"name", cov.name}, {"path", cov.path}});
    j["model"] = {{"variables", c.model.variables},
                  {"quadratic", c.model.quadratic},
                  {"standardize", c.model.standardize}};
    if (c.quadrature)
        j["quadrature"] = {{"spacing", c.quadrature->spacing},
                           {"refine", c.quadrature->refine},
                           {"tol", c.quadrature->tol},
                           {"max_steps", c.quadrature->max_steps}};
    j["seed"] = c.seed;
    if (command == "select")
        j["select"] = {{"variables", c.select.variables.empty() ? c.model.variables : c.select.variables},
                       {"family", c.select.quadratic.value_or(c.model.quadratic) ? "quadratic" : "linear"}};
    if (command == "diagnose") {
        j["diagnose"] = {{"n_sim", c.diagnose.n_sim}, {"level", c.diagnose.level},
                         {"n_r", c.diagnose.n_r}, {"fit", c.diagnose.fit}};
        if (c.diagnose.r_max) j["diagnose"]["r_max"] = *c.diagnose.r_max;
    }
    if (command == "compare-logistic")
        j["compare_logistic"] = {{"mode", c.compare.mode},
                                 {"spacings", c.compare.spacings},
                                 {"pseudo_absences", c.compare.pseudo_absences},
                                 {"replicates", c.compare.replicates}};
    if (command == "simulate") {
        j["simulate"] = {{"intensity", c.simulate.intensity}, {"fit", c.simulate.fit}};
        if (c.simulate.lambda) j["simulate"]["lambda"] = *c.simulate.lambda;
    }
    if (command == "predict") j["predict"] = {{"fit", c.predict_fit}};
    return j;
}

// ---- shared pipeline ------------------------------------------------------

struct Inputs {
    Region region;
    Stack stack;
};

void require_file(const std::string& path, const std::string& what) {
    if (path.empty()) input_error("config does not name " + what);
    if (!fs::is_regular_file(path)) input_error(what + " not found: " + path);
}

Stack load_stack(const RunConfig& c) {
    ppm_stack* s = nullptr;
    check(ppm_stack_create(&s), "covariates");
    Stack stack(s);
    for (const auto& cov : c.covariates) {
        require_file(cov.path, "covariate '" + cov.name + "'");
        check(ppm_stack_add_ascii(stack.get(), cov.name.c_str(), cov.path.c_str()), cov.path);
    }
    return stack;
}

Region load_region(const RunConfig& c) {
    ppm_region* r = nullptr;
    if (!c.mask.empty()) {
        require_file(c.mask, "mask");
        check(ppm_region_read_ascii(c.mask.c_str(), &r), c.mask);
    } else if (!c.covariates.empty()) {
        require_file(c.covariates.front().path, "covariate");
        check(ppm_region_read_ascii(c.covariates.front().path.c_str(), &r),
              c.covariates.front().path);
    } else {
        input_error("config needs a mask or at least one covariate to define the region");
    }
    return Region(r);
}

Inputs load_inputs(const RunConfig& c) {
    if (c.covariates.empty()) input_error("config lists no covariates");
    Inputs in{load_region(c), load_stack(c)};
    return in;
}

Points load_presences(const RunConfig& c, const ppm_region* region) {
    require_file(c.presences, "presence file");
    ppm_points* p = nullptr;
    check(ppm_points_load_presences(c.presences.c_str(), region, &p), c.presences);
    return Points(p);
}

std::vector<const char*> c_strings(const std::vector<std::string>& v) {
    std::vector<const char*> out;
    for (const auto& s : v) out.push_back(s.c_str());
    return out;
}

Model build_model(const RunConfig& c, const Inputs& in) {
    if (c.model.variables.empty()) input_error("model has no variables");
    const auto names = c_strings(c.model.variables);
    ppm_model* m = nullptr;
    check(ppm_model_create(names.data(), names.size(), c.model.quadratic ? 1 : 0, &m), "model");
    Model model(m);
    if (c.model.standardize)
        check(ppm_model_standardize(model.get(), in.stack.get(), in.region.get()), "standardize");
    return model;
}

const QuadratureConfig& quadrature(const RunConfig& c) {
    if (!c.quadrature) input_error("config has no quadrature section");
    return *c.quadrature;
}

struct FitOutcome {
    Fit fit;
    Refinement trace;
};

FitOutcome run_fit(const RunConfig& c, const Inputs& in, const ppm_points* presences) {
    const auto& q = quadrature(c);
    const Model model = build_model(c, in);
    FitOutcome out;
    ppm_fit* f = nullptr;
    if (q.refine) {
        ppm_refinement* t = nullptr;
        check(ppm_fit_refine(in.region.get(), in.stack.get(), model.get(), presences, q.spacing,
                             q.tol, q.max_steps, &f, &t),
              "fit");
        out.trace.reset(t);
        if (const char* failure = ppm_refinement_failure(t))
            std::cerr << "warning: refinement stopped early: " << failure << '\n';
        else if (!ppm_refinement_converged(t))
            std::cerr << "warning: log-likelihood change stayed above tol after "
                      << ppm_refinement_steps(t) << " refinement steps\n";
    } else {
        check(ppm_fit_grid(in.region.get(), in.stack.get(), model.get(), presences, q.spacing, &f),
              "fit");
    }
    out.fit.reset(f);
    return out;
}

Fit read_fit(const std::string& path) {
    require_file(path, "fit file");
    ppm_fit* f = nullptr;
    check(ppm_fit_read_json(path.c_str(), &f), path);
    return Fit(f);
}

// Fit named in the config, or a fresh fit of the configured model.
Fit fit_for(const RunConfig& c, const std::string& path, const Inputs& in) {
    if (!path.empty()) return read_fit(path);
    const Points presences = load_presences(c, in.region.get());
    return std::move(run_fit(c, in, presences.get()).fit);
}

std::string out_file(const fs::path& dir, const char* name) { return (dir / name).string(); }

void write_prediction(const ppm_fit* fit, const Inputs& in, const fs::path& dir) {
    ppm_raster* r = nullptr;
    check(ppm_predict(fit, in.stack.get(), in.region.get(), &r), "predict");
    Raster raster(r);
    const auto path = out_file(dir, "prediction.asc");
    check(ppm_raster_write_ascii(raster.get(), path.c_str()), path);
}

int fit_status(const ppm_fit* fit) {
    if (ppm_fit_converged(fit)) return exit_ok;
    std::cerr << "error: the point process fit did not converge\n";
    return exit_numerical;
}

// ---- commands -------------------------------------------------------------

int cmd_fit(const RunConfig& c, const fs::path& dir, unsigned) {
    const Inputs in = load_inputs(c);
    const Points presences = load_presences(c, in.region.get());
    const FitOutcome outcome = run_fit(c, in, presences.get());
    if (outcome.trace) {
        const auto path = out_file(dir, "refinement_trace.csv");
        check(ppm_refinement_write_csv(outcome.trace.get(), path.c_str()), path);
    }
    const auto path = out_file(dir, "fit.json");
    check(ppm_fit_write_json(outcome.fit.get(), path.c_str()), path);
    write_prediction(outcome.fit.get(), in, dir);
    int status = fit_status(outcome.fit.get());
    if (outcome.trace && ppm_refinement_failure(outcome.trace.get())) status = exit_numerical;
    return status;
}

int cmd_predict(const RunConfig& c, const fs::path& dir, unsigned) {
    const Inputs in = load_inputs(c);
    const Fit fit = fit_for(c, c.predict_fit, in);
    write_prediction(fit.get(), in, dir);
    return fit_status(fit.get());
}

int cmd_select(const RunConfig& c, const fs::path& dir, unsigned threads) {
    const Inputs in = load_inputs(c);
    const Points presences = load_presences(c, in.region.get());
    const auto& q = quadrature(c);
    const auto& variables = c.select.variables.empty() ? c.model.variables : c.select.variables;
    const auto names = c_strings(variables);
    const bool quadratic = c.select.quadratic.value_or(c.model.quadratic);
    // With refinement on, every subset is fitted at the spacing where the
    // largest candidate model converged.
    double spacing = q.spacing;
    if (q.refine) {
        RunConfig full = c;
        full.model.variables = variables;
        full.model.quadratic = quadratic;
        spacing = ppm_fit_spacing(run_fit(full, in, presences.get()).fit.get());
    }
    ppm_selection* s = nullptr;
    check(ppm_select(in.region.get(), in.stack.get(), presences.get(), names.data(), names.size(),
                     quadratic ? 1 : 0, c.model.standardize ? 1 : 0, spacing, threads, &s),
          "select");
    const Selection table(s);
    const auto path = out_file(dir, "selection.csv");
    check(ppm_selection_write_csv(table.get(), path.c_str()), path);
    std::size_t failed = 0;
    for (std::size_t i = 0; i < ppm_selection_rows(table.get()); ++i) {
        int converged = 0;
        check(ppm_selection_row(table.get(), i, nullptr, nullptr, nullptr, nullptr, &converged),
              "select");
        if (!converged) ++failed;
    }
    if (failed == 0) return exit_ok;
    std::cerr << "error: " << failed << " candidate model(s) did not converge\n";
    return exit_numerical;
}

int cmd_diagnose(const RunConfig& c, const fs::path& dir, unsigned threads) {
    const Inputs in = load_inputs(c);
    const Points presences = load_presences(c, in.region.get());
    const Fit fit = fit_for(c, c.diagnose.fit, in);
    double x0, y0, x1, y1;
    ppm_region_bounds(in.region.get(), &x0, &y0, &x1, &y1);
    const double r_max = c.diagnose.r_max.value_or(0.25 * std::min(x1 - x0, y1 - y0));
    ppm_kfunction* k = nullptr;
    check(ppm_diagnose(fit.get(), in.stack.get(), in.region.get(), presences.get(), r_max,
                       c.diagnose.n_r, c.diagnose.n_sim, c.diagnose.level, c.seed, threads, &k),
          "diagnose");
    const KFunction result(k);
    const auto path = out_file(dir, "kfunction.csv");
    check(ppm_kfunction_write_csv(result.get(), path.c_str()), path);
    return fit_status(fit.get());
}

int cmd_compare_logistic(const RunConfig& c, const fs::path& dir, unsigned threads) {
    const Inputs in = load_inputs(c);
    const Points presences = load_presences(c, in.region.get());
    const Model model = build_model(c, in);
    const auto& cmp = c.compare;

    std::vector<double> spacings = cmp.spacings;
    if (spacings.empty()) {
        const auto& q = quadrature(c);
        for (std::size_t i = 0; i < q.max_steps; ++i)
            spacings.push_back(q.spacing / std::ldexp(1.0, static_cast<int>(i)));
    }
    std::vector<double> counts(cmp.pseudo_absences.begin(), cmp.pseudo_absences.end());

    auto run = [&](ppm_pseudo_mode mode, const std::vector<double>& values) {
        if (values.empty())
            input_error(mode == PPM_PSEUDO_GRID ? "no spacings for grid mode"
                                                : "compare_logistic.pseudo_absences is empty");
        ppm_experiment* e = nullptr;
        check(ppm_compare_logistic(in.region.get(), in.stack.get(), model.get(), presences.get(),
                                   mode, values.data(), values.size(), cmp.replicates, c.seed,
                                   threads, &e),
              "compare-logistic");
        return Experiment(e);
    };

    Experiment trace;
    if (cmp.mode == "grid" || cmp.mode == "both") trace = run(PPM_PSEUDO_GRID, spacings);
    if (cmp.mode == "random" || cmp.mode == "both") {
        Experiment random = run(PPM_PSEUDO_RANDOM, counts);
        if (trace) check(ppm_experiment_append(trace.get(), random.get()), "compare-logistic");
        else trace = std::move(random);
    }
    const auto path = out_file(dir, "logistic_trace.csv");
    check(ppm_experiment_write_csv(trace.get(), path.c_str()), path);
    const std::size_t flagged = ppm_experiment_flagged(trace.get());
    if (flagged == 0) return exit_ok;
    std::cerr << "error: " << flagged << " experiment row(s) have a failed or unconverged fit\n";
    return exit_numerical;
}

int cmd_simulate(const RunConfig& c, const fs::path& dir, unsigned) {
    const auto& s = c.simulate;
    const int sources = !s.intensity.empty() + !s.fit.empty() + s.lambda.has_value();
    if (sources != 1) input_error("simulate needs exactly one of 'intensity', 'fit' or 'lambda'");
    ppm_points* p = nullptr;
    if (!s.fit.empty()) {
        const Inputs in = load_inputs(c);
        const Fit fit = read_fit(s.fit);
        check(ppm_simulate_fit(fit.get(), in.stack.get(), in.region.get(), c.seed, &p), "simulate");
    } else {
        Raster intensity;
        ppm_raster* r = nullptr;
        Region region;
        if (!s.intensity.empty()) {
            require_file(s.intensity, "intensity raster");
            check(ppm_raster_read_ascii(s.intensity.c_str(), &r), s.intensity);
            intensity.reset(r);
            if (!c.mask.empty() || !c.covariates.empty()) {
                region = load_region(c);
            } else {
                ppm_region* g = nullptr;
                check(ppm_region_from_raster(intensity.get(), &g), s.intensity);
                region.reset(g);
            }
        } else {
            region = load_region(c);
            check(ppm_raster_fill(region.get(), *s.lambda, &r), "simulate");
            intensity.reset(r);
        }
        check(ppm_simulate_raster(intensity.get(), region.get(), c.seed, &p), "simulate");
    }
    const Points points(p);
    const auto path = out_file(dir, "simulated.csv");
    check(ppm_points_write_csv(points.get(), path.c_str()), path);
    return exit_ok;
}

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    unsigned threads = 1;
    bool refine = false;
};

using Command = int (*)(const RunConfig&, const fs::path&, unsigned);

int run_command(const std::string& name, Command command, const Options& opt) {
    RunConfig c = load_config(opt.config);
    if (opt.seed) c.seed = *opt.seed;
    if (opt.refine) {
        if (!c.quadrature) input_error("--refine needs a quadrature section in the config");
        c.quadrature->refine = true;
    }
    if (!opt.out.empty()) c.output = fs::absolute(opt.out).lexically_normal().string();
    if (c.output.empty()) input_error("no output directory: set 'output' in the config or pass --out");
    const fs::path dir(c.output);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) input_error("cannot create output directory " + dir.string() + ": " + ec.message());
    {
        std::ofstream echo(dir / "resolved_config.json", std::ios::binary);
        if (!echo) input_error("cannot write to " + dir.string());
        echo << config_echo(name, c).dump(2) << '\n';
    }
    return command(c, dir, opt.threads);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Presence-only species distribution modelling with Poisson point processes"};
    app.require_subcommand(1);
    app.set_version_flag("--version", ppm_version());

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"fit", "fit the configured model; writes fit.json, prediction.asc and refinement_trace.csv"},
        {"predict", "write prediction.asc from a saved or freshly computed fit"},
        {"select", "rank all covariate subsets by AIC; writes selection.csv"},
        {"diagnose", "inhomogeneous K-function with simulation envelope; writes kfunction.csv"},
        {"compare-logistic", "point process vs pseudo-absence logistic fits; writes logistic_trace.csv"},
        {"simulate", "simulate a Poisson pattern; writes simulated.csv"},
    };
    Options opt;
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opt.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", opt.seed, "override the configured seed");
        sub->add_option("--out", opt.out, "override the configured output directory");
        sub->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
        if (name == "fit") sub->add_flag("--refine", opt.refine, "refine the quadrature grid until the log-likelihood converges");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_input;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    Command command = nullptr;
    if (name == "fit") command = cmd_fit;
    else if (name == "predict") command = cmd_predict;
    else if (name == "select") command = cmd_select;
    else if (name == "diagnose") command = cmd_diagnose;
    else if (name == "compare-logistic") command = cmd_compare_logistic;
    else command = cmd_simulate;

    try {
        return run_command(name, command, opt);
    } catch (const CliError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_input;
    }
}
