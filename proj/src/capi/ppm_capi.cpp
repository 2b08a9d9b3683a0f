#include "ppm/ppm.h"

#include "core/covariates.hpp"
#include "core/diagnostics.hpp"
#include "core/error.hpp"
#include "core/fit_io.hpp"
#include "core/ppm_core.hpp"
#include "core/pseudo_absence.hpp"
#include "core/region_grid.hpp"
#include "core/selection.hpp"
#include "core/simulate.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <new>
#include <optional>
#include <string>
#include <utility>
#include <vector>

struct ppm_region {
    ppm::Region region;
};

struct ppm_points {
    ppm::PointSet points;
};

struct ppm_raster {
    ppm::RasterGrid grid;
};

struct ppm_stack {
    ppm::CovariateStack stack;
};

struct ppm_model {
    ppm::ModelSpec spec;
    std::vector<std::string> names;
};

struct ppm_fit {
    ppm::FitRecord record;
    std::vector<std::string> names;
    Eigen::VectorXd beta_raw;
    Eigen::VectorXd se_raw;
};

struct ppm_refinement {
    ppm::RefinementTrace trace;
    std::optional<std::string> failure;
};

struct ppm_selection {
    ppm::SelectionTable table;
    std::vector<std::string> labels;
};

struct ppm_kfunction {
    ppm::KFunctionResult result;
};

struct ppm_experiment {
    ppm::ExperimentTrace trace;
};

namespace {

thread_local std::string last_error;

ppm_status fail(ppm_status code, const std::string& message) {
    last_error = message;
    return code;
}

// Runs body and converts any exception into a status code.
template <class Body>
ppm_status guarded(Body&& body) {
    try {
        body();
        return PPM_OK;
    } catch (const ppm::InputError& e) {
        return fail(PPM_ERROR_INPUT, e.what());
    } catch (const ppm::NumericalError& e) {
        return fail(PPM_ERROR_NUMERICAL, e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(PPM_ERROR_INPUT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(PPM_ERROR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(PPM_ERROR_INTERNAL, e.what());
    } catch (...) {
        return fail(PPM_ERROR_INTERNAL, "unknown error");
    }
}

void require(bool condition, const char* message) {
    if (!condition) throw ppm::InputError(message);
}

template <class Write>
void write_file(const char* path, Write&& write) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ppm::InputError(std::string("cannot open ") + path + " for writing");
    write(out);
    out.flush();
    if (!out) throw ppm::InputError(std::string("failed writing ") + path);
}

ppm_fit* make_fit(ppm::FitRecord record) {
    auto* f = new ppm_fit{std::move(record), {}, {}, {}};
    f->names = f->record.spec.term_names();
    auto [beta_raw, cov_raw] =
        ppm::destandardize_coefficients(f->record.spec, f->record.fit.beta, f->record.fit.covariance());
    f->beta_raw = std::move(beta_raw);
    f->se_raw = cov_raw.diagonal().cwiseMax(0.0).cwiseSqrt();
    return f;
}

ppm::FitMetadata metadata_of(const ppm::GridScheme& g) {
    return {g.spacing, g.scheme.n_presence, g.scheme.n_quadrature(), g.scheme.area};
}

std::vector<std::string> string_list(const char* const* items, std::size_t k) {
    require(k == 0 || items != nullptr, "variable list is null");
    std::vector<std::string> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        require(items[i] != nullptr, "variable name is null");
        out.emplace_back(items[i]);
    }
    return out;
}

}  // namespace

extern "C" {

const char* ppm_version(void) { return "0.1.0"; }

const char* ppm_last_error(void) { return last_error.c_str(); }

ppm_status ppm_region_create(double x_min, double y_min, size_t n_cols, size_t n_rows,
                             double cell_size, const uint8_t* mask, ppm_region** out) {
    return guarded([&] {
        require(out != nullptr, "output pointer is null");
        std::vector<uint8_t> m(n_cols * n_rows, 1);
        if (mask != nullptr) m.assign(mask, mask + n_cols * n_rows);
        *out = new ppm_region{ppm::Region(x_min, y_min, n_cols, n_rows, cell_size, std::move(m))};
    });
}

ppm_status ppm_region_read_ascii(const char* path, ppm_region** out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "null argument");
        *out = new ppm_region{ppm::region_from_raster(ppm::read_ascii_grid(std::string(path)))};
    });
}

ppm_status ppm_region_from_raster(const ppm_raster* raster, ppm_region** out) {
    return guarded([&] {
        require(raster != nullptr && out != nullptr, "null argument");
        *out = new ppm_region{ppm::region_from_raster(raster->grid)};
    });
}

double ppm_region_area(const ppm_region* region) {
    return region ? ppm::region_area(region->region) : 0.0;
}

void ppm_region_bounds(const ppm_region* region, double* x_min, double* y_min, double* x_max,
                       double* y_max) {
    if (!region) return;
    if (x_min) *x_min = region->region.x_min();
    if (y_min) *y_min = region->region.y_min();
    if (x_max) *x_max = region->region.x_max();
    if (y_max) *y_max = region->region.y_max();
}

void ppm_region_free(ppm_region* region) { delete region; }

ppm_status ppm_points_create(const double* xy, size_t n, ppm_points** out) {
    return guarded([&] {
        require(out != nullptr, "output pointer is null");
        require(n == 0 || xy != nullptr, "coordinate array is null");
        ppm::PointSet pts(n);
        for (size_t i = 0; i < n; ++i) {
            pts[i] = {xy[2 * i], xy[2 * i + 1]};
            require(std::isfinite(pts[i].x) && std::isfinite(pts[i].y), "non-finite coordinate");
        }
        *out = new ppm_points{std::move(pts)};
    });
}

ppm_status ppm_points_read_csv(const char* path, ppm_points** out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "null argument");
        *out = new ppm_points{ppm::read_points_csv(std::string(path))};
    });
}

ppm_status ppm_points_load_presences(const char* path, const ppm_region* region,
                                     ppm_points** out) {
    return guarded([&] {
        require(path != nullptr && region != nullptr && out != nullptr, "null argument");
        *out = new ppm_points{ppm::load_presences(path, region->region)};
    });
}

ppm_status ppm_points_write_csv(const ppm_points* points, const char* path) {
    return guarded([&] {
        require(points != nullptr && path != nullptr, "null argument");
        ppm::write_points_csv(std::string(path), points->points);
    });
}

size_t ppm_points_count(const ppm_points* points) { return points ? points->points.size() : 0; }

ppm_status ppm_points_get(const ppm_points* points, size_t i, double* x, double* y) {
    return guarded([&] {
        require(points != nullptr, "null argument");
        require(i < points->points.size(), "point index out of range");
        if (x) *x = points->points[i].x;
        if (y) *y = points->points[i].y;
    });
}

void ppm_points_free(ppm_points* points) { delete points; }

ppm_status ppm_quadrature_grid(const ppm_region* region, double spacing, ppm_points** out) {
    return guarded([&] {
        require(region != nullptr && out != nullptr, "null argument");
        *out = new ppm_points{ppm::generate_quadrature_grid(region->region, spacing)};
    });
}

ppm_status ppm_tile_weights(const ppm_region* region, const ppm_points* presences,
                            const ppm_points* quadrature, double tile_size, double* weights,
                            size_t capacity, size_t* orphan_tiles) {
    return guarded([&] {
        require(region && presences && quadrature && weights, "null argument");
        const size_t needed = presences->points.size() + quadrature->points.size();
        require(capacity >= needed, "weight buffer is too small");
        const auto tw = ppm::compute_tile_weights(region->region, presences->points,
                                                  quadrature->points, tile_size);
        std::copy(tw.weights.begin(), tw.weights.end(), weights);
        if (orphan_tiles) *orphan_tiles = tw.orphan_tiles;
    });
}

ppm_status ppm_raster_create(size_t n_cols, size_t n_rows, double x_ll, double y_ll,
                             double cell_size, double nodata, const double* values,
                             ppm_raster** out) {
    return guarded([&] {
        require(values != nullptr && out != nullptr, "null argument");
        ppm::GridHeader h{n_cols, n_rows, x_ll, y_ll, cell_size, nodata};
        *out = new ppm_raster{ppm::RasterGrid(h, std::vector<double>(values, values + n_cols * n_rows))};
    });
}

ppm_status ppm_raster_read_ascii(const char* path, ppm_raster** out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "null argument");
        *out = new ppm_raster{ppm::read_ascii_grid(std::string(path))};
    });
}

ppm_status ppm_raster_write_ascii(const ppm_raster* raster, const char* path) {
    return guarded([&] {
        require(raster != nullptr && path != nullptr, "null argument");
        ppm::write_ascii_grid(std::string(path), raster->grid);
    });
}

void ppm_raster_dims(const ppm_raster* raster, size_t* n_cols, size_t* n_rows) {
    if (!raster) return;
    if (n_cols) *n_cols = raster->grid.n_cols();
    if (n_rows) *n_rows = raster->grid.n_rows();
}

int ppm_raster_value(const ppm_raster* raster, size_t row, size_t col, double* value) {
    if (!raster || row >= raster->grid.n_rows() || col >= raster->grid.n_cols()) return 0;
    if (raster->grid.is_nodata(row, col)) return 0;
    if (value) *value = raster->grid.at(row, col);
    return 1;
}

ppm_status ppm_raster_fill(const ppm_region* region, double value, ppm_raster** out) {
    return guarded([&] {
        require(region && out, "null argument");
        require(std::isfinite(value), "fill value must be finite");
        const auto& r = region->region;
        ppm::GridHeader h{r.n_cols(), r.n_rows(), r.x_min(), r.y_min(), r.cell_size(), -9999.0};
        require(value != h.nodata, "fill value collides with the nodata marker");
        auto grid = ppm::RasterGrid::filled(h, h.nodata);
        for (size_t row = 0; row < r.n_rows(); ++row)
            for (size_t col = 0; col < r.n_cols(); ++col)
                if (r.active(row, col)) grid.set(row, col, value);
        *out = new ppm_raster{std::move(grid)};
    });
}

void ppm_raster_free(ppm_raster* raster) { delete raster; }

ppm_status ppm_stack_create(ppm_stack** out) {
    return guarded([&] {
        require(out != nullptr, "output pointer is null");
        *out = new ppm_stack{};
    });
}

ppm_status ppm_stack_add(ppm_stack* stack, const char* name, const ppm_raster* raster) {
    return guarded([&] {
        require(stack && name && raster, "null argument");
        stack->stack.add(name, raster->grid);
    });
}

ppm_status ppm_stack_add_ascii(ppm_stack* stack, const char* name, const char* path) {
    return guarded([&] {
        require(stack && name && path, "null argument");
        stack->stack.add(name, ppm::read_ascii_grid(std::string(path)));
    });
}

size_t ppm_stack_size(const ppm_stack* stack) { return stack ? stack->stack.size() : 0; }

void ppm_stack_free(ppm_stack* stack) { delete stack; }

ppm_status ppm_model_create(const char* const* variables, size_t k, int quadratic,
                            ppm_model** out) {
    return guarded([&] {
        require(out != nullptr, "output pointer is null");
        auto vars = string_list(variables, k);
        auto spec = quadratic ? ppm::ModelSpec::quadratic(std::move(vars))
                              : ppm::ModelSpec::linear(std::move(vars));
        auto names = spec.term_names();
        *out = new ppm_model{std::move(spec), std::move(names)};
    });
}

ppm_status ppm_model_standardize(ppm_model* model, const ppm_stack* stack,
                                 const ppm_region* region) {
    return guarded([&] {
        require(model && stack && region, "null argument");
        model->spec = model->spec.with_standardization(ppm::estimate_standardization(
            stack->stack, region->region, model->spec.variables()));
    });
}

ppm_status ppm_model_set_standardization(ppm_model* model, const double* center,
                                         const double* scale) {
    return guarded([&] {
        require(model && center && scale, "null argument");
        const size_t k = model->spec.variables().size();
        model->spec = model->spec.with_standardization(
            {std::vector<double>(center, center + k), std::vector<double>(scale, scale + k)});
    });
}

size_t ppm_model_num_terms(const ppm_model* model) { return model ? model->names.size() : 0; }

const char* ppm_model_term_name(const ppm_model* model, size_t i) {
    if (!model || i >= model->names.size()) return nullptr;
    return model->names[i].c_str();
}

void ppm_model_free(ppm_model* model) { delete model; }

ppm_status ppm_fit_grid(const ppm_region* region, const ppm_stack* stack, const ppm_model* model,
                        const ppm_points* presences, double spacing, ppm_fit** out) {
    return guarded([&] {
        require(region && stack && model && presences && out, "null argument");
        const auto g = ppm::build_grid_scheme(region->region, stack->stack, model->spec,
                                              presences->points, spacing);
        auto fit = ppm::fit_ppm(g.scheme);
        *out = make_fit({model->spec, std::move(fit), metadata_of(g)});
    });
}

ppm_status ppm_fit_refine(const ppm_region* region, const ppm_stack* stack,
                          const ppm_model* model, const ppm_points* presences,
                          double initial_spacing, double tol, size_t max_steps, ppm_fit** fit_out,
                          ppm_refinement** trace_out) {
    return guarded([&] {
        require(region && stack && model && presences && fit_out && trace_out, "null argument");
        auto r = ppm::refine_until_converged(region->region, stack->stack, model->spec,
                                             presences->points, initial_spacing, tol, max_steps);
        auto* trace = new ppm_refinement{std::move(r.trace), std::move(r.failure)};
        try {
            *fit_out = make_fit({model->spec, std::move(r.fit), metadata_of(r.scheme)});
        } catch (...) {
            delete trace;
            throw;
        }
        *trace_out = trace;
    });
}

int ppm_fit_converged(const ppm_fit* fit) { return fit && fit->record.fit.converged ? 1 : 0; }

size_t ppm_fit_num_coef(const ppm_fit* fit) { return fit ? fit->names.size() : 0; }

const char* ppm_fit_coef_name(const ppm_fit* fit, size_t i) {
    if (!fit || i >= fit->names.size()) return nullptr;
    return fit->names[i].c_str();
}

ppm_status ppm_fit_coef(const ppm_fit* fit, size_t i, double* beta, double* se) {
    return guarded([&] {
        require(fit != nullptr, "null argument");
        require(i < fit->names.size(), "coefficient index out of range");
        if (beta) *beta = fit->record.fit.beta[static_cast<Eigen::Index>(i)];
        if (se) *se = fit->record.fit.se[static_cast<Eigen::Index>(i)];
    });
}

ppm_status ppm_fit_coef_raw(const ppm_fit* fit, size_t i, double* beta, double* se) {
    return guarded([&] {
        require(fit != nullptr, "null argument");
        require(i < fit->names.size(), "coefficient index out of range");
        if (beta) *beta = fit->beta_raw[static_cast<Eigen::Index>(i)];
        if (se) *se = fit->se_raw[static_cast<Eigen::Index>(i)];
    });
}

double ppm_fit_log_lik(const ppm_fit* fit) { return fit ? fit->record.fit.log_lik : NAN; }

double ppm_fit_aic(const ppm_fit* fit) { return fit ? fit->record.fit.aic : NAN; }

int ppm_fit_iterations(const ppm_fit* fit) { return fit ? fit->record.fit.iterations : 0; }

double ppm_fit_spacing(const ppm_fit* fit) { return fit ? fit->record.meta.spacing : NAN; }

ppm_status ppm_fit_write_json(const ppm_fit* fit, const char* path) {
    return guarded([&] {
        require(fit && path, "null argument");
        ppm::write_fit_json(path, fit->record);
    });
}

ppm_status ppm_fit_read_json(const char* path, ppm_fit** out) {
    return guarded([&] {
        require(path && out, "null argument");
        *out = make_fit(ppm::read_fit_json(path));
    });
}

void ppm_fit_free(ppm_fit* fit) { delete fit; }

size_t ppm_refinement_steps(const ppm_refinement* trace) {
    return trace ? trace->trace.steps.size() : 0;
}

int ppm_refinement_converged(const ppm_refinement* trace) {
    return trace && trace->trace.converged_spacing ? 1 : 0;
}

const char* ppm_refinement_failure(const ppm_refinement* trace) {
    return trace && trace->failure ? trace->failure->c_str() : nullptr;
}

ppm_status ppm_refinement_write_csv(const ppm_refinement* trace, const char* path) {
    return guarded([&] {
        require(trace && path, "null argument");
        write_file(path, [&](std::ostream& o) { ppm::write_refinement_csv(o, trace->trace); });
    });
}

void ppm_refinement_free(ppm_refinement* trace) { delete trace; }

ppm_status ppm_predict(const ppm_fit* fit, const ppm_stack* stack, const ppm_region* region,
                       ppm_raster** out) {
    return guarded([&] {
        require(fit && stack && out, "null argument");
        *out = new ppm_raster{ppm::predict_intensity(fit->record.fit.beta, fit->record.spec,
                                                     stack->stack,
                                                     region ? &region->region : nullptr)};
    });
}

ppm_status ppm_simulate_raster(const ppm_raster* intensity, const ppm_region* region,
                               uint64_t seed, ppm_points** out) {
    return guarded([&] {
        require(intensity && region && out, "null argument");
        const ppm::IntensitySurface surface(intensity->grid);
        *out = new ppm_points{ppm::simulate_poisson(surface, region->region, seed)};
    });
}

ppm_status ppm_simulate_fit(const ppm_fit* fit, const ppm_stack* stack, const ppm_region* region,
                            uint64_t seed, ppm_points** out) {
    return guarded([&] {
        require(fit && stack && region && out, "null argument");
        const auto surface = ppm::IntensitySurface::from_fit(fit->record.fit.beta, fit->record.spec,
                                                             stack->stack, region->region);
        *out = new ppm_points{ppm::simulate_poisson(surface, region->region, seed)};
    });
}

ppm_status ppm_select(const ppm_region* region, const ppm_stack* stack,
                      const ppm_points* presences, const char* const* variables, size_t k,
                      int quadratic, int standardize, double spacing, unsigned threads,
                      ppm_selection** out) {
    return guarded([&] {
        require(region && stack && presences && out, "null argument");
        const auto vars = string_list(variables, k);
        std::optional<ppm::Standardization> standardization;
        if (standardize)
            standardization = ppm::estimate_standardization(stack->stack, region->region, vars);
        auto table = ppm::all_subsets_aic(region->region, stack->stack, presences->points, vars,
                                          quadratic != 0, standardization, spacing, threads);
        std::vector<std::string> labels;
        for (const auto& row : table.rows) {
            std::string s;
            for (const auto& v : row.subset) s += (s.empty() ? "" : "+") + v;
            labels.push_back(s.empty() ? "(intercept)" : s);
        }
        *out = new ppm_selection{std::move(table), std::move(labels)};
    });
}

size_t ppm_selection_rows(const ppm_selection* table) {
    return table ? table->table.rows.size() : 0;
}

const char* ppm_selection_subset(const ppm_selection* table, size_t i) {
    if (!table || i >= table->labels.size()) return nullptr;
    return table->labels[i].c_str();
}

ppm_status ppm_selection_row(const ppm_selection* table, size_t i, size_t* p, double* log_lik,
                             double* aic, double* delta_aic, int* converged) {
    return guarded([&] {
        require(table != nullptr, "null argument");
        require(i < table->table.rows.size(), "row index out of range");
        const auto& row = table->table.rows[i];
        if (p) *p = row.p;
        if (log_lik) *log_lik = row.log_lik;
        if (aic) *aic = row.aic;
        if (delta_aic) *delta_aic = row.delta_aic;
        if (converged) *converged = row.converged ? 1 : 0;
    });
}

ppm_status ppm_selection_write_csv(const ppm_selection* table, const char* path) {
    return guarded([&] {
        require(table && path, "null argument");
        write_file(path, [&](std::ostream& o) { ppm::write_selection_csv(o, table->table); });
    });
}

void ppm_selection_free(ppm_selection* table) { delete table; }

ppm_status ppm_k_inhom(const ppm_points* points, const double* lambda, const ppm_region* region,
                       const double* r, size_t n_r, double* k_out) {
    return guarded([&] {
        require(points && region && r && k_out, "null argument");
        require(points->points.empty() || lambda != nullptr, "intensity array is null");
        const auto k = ppm::k_inhom(points->points, {lambda, points->points.size()}, region->region,
                                    {r, n_r});
        std::copy(k.k_hat.begin(), k.k_hat.end(), k_out);
    });
}

ppm_status ppm_diagnose(const ppm_fit* fit, const ppm_stack* stack, const ppm_region* region,
                        const ppm_points* data, double r_max, size_t n_r, size_t n_sim,
                        double level, uint64_t seed, unsigned threads, ppm_kfunction** out) {
    return guarded([&] {
        require(fit && stack && region && data && out, "null argument");
        const auto surface = ppm::IntensitySurface::from_fit(fit->record.fit.beta, fit->record.spec,
                                                             stack->stack, region->region);
        const auto r = ppm::make_r_grid(r_max, n_r);
        ppm::EnvelopeOptions options{n_sim, level, seed, threads};
        *out = new ppm_kfunction{ppm::k_envelope(surface, region->region, data->points, r, options)};
    });
}

size_t ppm_kfunction_size(const ppm_kfunction* k) { return k ? k->result.r.size() : 0; }

ppm_status ppm_kfunction_get(const ppm_kfunction* k, size_t i, double* r, double* k_hat,
                             double* theoretical, double* lo, double* hi) {
    return guarded([&] {
        require(k != nullptr, "null argument");
        const auto& res = k->result;
        require(i < res.r.size(), "distance index out of range");
        if (r) *r = res.r[i];
        if (k_hat) *k_hat = res.k_hat[i];
        if (theoretical) *theoretical = res.theoretical[i];
        if (lo) *lo = res.lo.empty() ? NAN : res.lo[i];
        if (hi) *hi = res.hi.empty() ? NAN : res.hi[i];
    });
}

ppm_status ppm_kfunction_write_csv(const ppm_kfunction* k, const char* path) {
    return guarded([&] {
        require(k && path, "null argument");
        write_file(path, [&](std::ostream& o) { ppm::write_kfunction_csv(o, k->result); });
    });
}

void ppm_kfunction_free(ppm_kfunction* k) { delete k; }

ppm_status ppm_compare_logistic(const ppm_region* region, const ppm_stack* stack,
                                const ppm_model* model, const ppm_points* presences,
                                ppm_pseudo_mode mode, const double* values, size_t n_values,
                                size_t replicates, uint64_t seed, unsigned threads,
                                ppm_experiment** out) {
    return guarded([&] {
        require(region && stack && model && presences && out, "null argument");
        require(n_values > 0 && values != nullptr, "no experiment steps given");
        ppm::ExperimentConfig config;
        config.seed = seed;
        config.threads = threads;
        config.replicates = replicates;
        if (mode == PPM_PSEUDO_GRID) {
            config.mode = ppm::PseudoAbsenceMode::grid;
            config.spacings.assign(values, values + n_values);
        } else if (mode == PPM_PSEUDO_RANDOM) {
            config.mode = ppm::PseudoAbsenceMode::random;
            for (size_t i = 0; i < n_values; ++i) {
                require(values[i] >= 1 && values[i] == std::floor(values[i]),
                        "pseudo-absence counts must be positive integers");
                config.pseudo_absences.push_back(static_cast<size_t>(values[i]));
            }
        } else {
            throw ppm::InputError("unknown pseudo-absence mode");
        }
        *out = new ppm_experiment{ppm::convergence_experiment(region->region, stack->stack,
                                                              model->spec, presences->points,
                                                              config)};
    });
}

size_t ppm_experiment_rows(const ppm_experiment* trace) {
    return trace ? trace->trace.rows.size() : 0;
}

size_t ppm_experiment_flagged(const ppm_experiment* trace) {
    if (!trace) return 0;
    size_t n = 0;
    for (const auto& row : trace->trace.rows)
        if (!row.ppm_converged || !row.logit_converged) ++n;
    return n;
}

ppm_status ppm_experiment_append(ppm_experiment* dst, const ppm_experiment* src) {
    return guarded([&] {
        require(dst && src, "null argument");
        require(dst != src, "cannot append a trace to itself");
        require(dst->trace.coefficient_names == src->trace.coefficient_names,
                "traces have different coefficients");
        dst->trace.rows.insert(dst->trace.rows.end(), src->trace.rows.begin(), src->trace.rows.end());
    });
}

ppm_status ppm_experiment_write_csv(const ppm_experiment* trace, const char* path) {
    return guarded([&] {
        require(trace && path, "null argument");
        write_file(path, [&](std::ostream& o) { ppm::write_experiment_csv(o, trace->trace); });
    });
}

void ppm_experiment_free(ppm_experiment* trace) { delete trace; }

}  // extern "C"
