/*
 * ppm.h - C interface to the presence-only point process modelling library.
 *
 * Every object is an opaque handle created by a ppm_*_create / ppm_*_read /
 * computing function and released with the matching ppm_*_free. Functions
 * that can fail return a ppm_status; on failure ppm_last_error() describes
 * the problem (the message is per thread and valid until the next failing
 * call on that thread). Output handles are only written on success.
 *
 * Coordinates are in the units of the input rasters. Raster rows are
 * indexed from the south (row 0 is the southernmost row).
 */
#ifndef PPM_PPM_H
#define PPM_PPM_H

#include <stddef.h>
#include <stdint.h>

#if defined(PPM_BUILDING_LIBRARY)
#define PPM_API __attribute__((visibility("default")))
#else
#define PPM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ppm_status {
    PPM_OK = 0,
    /* Malformed files, invalid arguments, points outside the region. */
    PPM_ERROR_INPUT = 1,
    /* Overflow, rank-deficient designs and other numerical failures. */
    PPM_ERROR_NUMERICAL = 2,
    PPM_ERROR_INTERNAL = 3
} ppm_status;

typedef enum ppm_pseudo_mode {
    PPM_PSEUDO_GRID = 0,
    PPM_PSEUDO_RANDOM = 1
} ppm_pseudo_mode;

typedef struct ppm_region ppm_region;
typedef struct ppm_points ppm_points;
typedef struct ppm_raster ppm_raster;
typedef struct ppm_stack ppm_stack;
typedef struct ppm_model ppm_model;
typedef struct ppm_fit ppm_fit;
typedef struct ppm_refinement ppm_refinement;
typedef struct ppm_selection ppm_selection;
typedef struct ppm_kfunction ppm_kfunction;
typedef struct ppm_experiment ppm_experiment;

PPM_API const char* ppm_version(void);
PPM_API const char* ppm_last_error(void);

/* ---- regions ---------------------------------------------------------- */

/* mask: n_rows * n_cols bytes, row-major from the south; NULL = all inside. */
PPM_API ppm_status ppm_region_create(double x_min, double y_min, size_t n_cols, size_t n_rows,
                                     double cell_size, const uint8_t* mask, ppm_region** out);
/* Non-nodata cells of an ESRI ASCII grid form the region. */
PPM_API ppm_status ppm_region_read_ascii(const char* path, ppm_region** out);
PPM_API ppm_status ppm_region_from_raster(const ppm_raster* raster, ppm_region** out);
PPM_API double ppm_region_area(const ppm_region* region);
PPM_API void ppm_region_bounds(const ppm_region* region, double* x_min, double* y_min,
                               double* x_max, double* y_max);
PPM_API void ppm_region_free(ppm_region* region);

/* ---- point sets ------------------------------------------------------- */

/* xy: 2*n interleaved coordinates. */
PPM_API ppm_status ppm_points_create(const double* xy, size_t n, ppm_points** out);
PPM_API ppm_status ppm_points_read_csv(const char* path, ppm_points** out);
/* Fails naming every CSV line whose point lies outside the region mask. */
PPM_API ppm_status ppm_points_load_presences(const char* path, const ppm_region* region,
                                             ppm_points** out);
PPM_API ppm_status ppm_points_write_csv(const ppm_points* points, const char* path);
PPM_API size_t ppm_points_count(const ppm_points* points);
PPM_API ppm_status ppm_points_get(const ppm_points* points, size_t i, double* x, double* y);
PPM_API void ppm_points_free(ppm_points* points);

/* Cell-centre lattice of the given pitch, restricted to the region mask. */
PPM_API ppm_status ppm_quadrature_grid(const ppm_region* region, double spacing,
                                       ppm_points** out);
/* Tile weights, presences first. `weights` must hold count(presences) +
 * count(quadrature) values. `orphan_tiles` (nullable) receives the number
 * of tiles holding presences but no quadrature point. */
PPM_API ppm_status ppm_tile_weights(const ppm_region* region, const ppm_points* presences,
                                    const ppm_points* quadrature, double tile_size,
                                    double* weights, size_t capacity, size_t* orphan_tiles);

/* ---- rasters and covariate stacks -------------------------------------- */

/* values: n_rows * n_cols, row-major from the south. */
PPM_API ppm_status ppm_raster_create(size_t n_cols, size_t n_rows, double x_ll, double y_ll,
                                     double cell_size, double nodata, const double* values,
                                     ppm_raster** out);
PPM_API ppm_status ppm_raster_read_ascii(const char* path, ppm_raster** out);
PPM_API ppm_status ppm_raster_write_ascii(const ppm_raster* raster, const char* path);
PPM_API void ppm_raster_dims(const ppm_raster* raster, size_t* n_cols, size_t* n_rows);
/* Returns 1 and stores the value when the cell holds data, 0 for nodata or
 * an out-of-range index. */
PPM_API int ppm_raster_value(const ppm_raster* raster, size_t row, size_t col, double* value);
/* Raster on the region lattice holding `value` inside the mask, nodata outside. */
PPM_API ppm_status ppm_raster_fill(const ppm_region* region, double value, ppm_raster** out);
PPM_API void ppm_raster_free(ppm_raster* raster);

PPM_API ppm_status ppm_stack_create(ppm_stack** out);
/* Copies the raster; all layers must share one lattice and names are unique. */
PPM_API ppm_status ppm_stack_add(ppm_stack* stack, const char* name, const ppm_raster* raster);
PPM_API ppm_status ppm_stack_add_ascii(ppm_stack* stack, const char* name, const char* path);
PPM_API size_t ppm_stack_size(const ppm_stack* stack);
PPM_API void ppm_stack_free(ppm_stack* stack);

/* ---- model specifications --------------------------------------------- */

/* Linear (quadratic = 0) or full quadratic log-intensity over `variables`. */
PPM_API ppm_status ppm_model_create(const char* const* variables, size_t k, int quadratic,
                                    ppm_model** out);
/* Centre and scale each covariate by its mean and standard deviation over
 * the stack cells inside the region. */
PPM_API ppm_status ppm_model_standardize(ppm_model* model, const ppm_stack* stack,
                                         const ppm_region* region);
PPM_API ppm_status ppm_model_set_standardization(ppm_model* model, const double* center,
                                                 const double* scale);
PPM_API size_t ppm_model_num_terms(const ppm_model* model);
PPM_API const char* ppm_model_term_name(const ppm_model* model, size_t i);
PPM_API void ppm_model_free(ppm_model* model);

/* ---- fitting ---------------------------------------------------------- */

/* Poisson point process fit on one quadrature grid. A fit that did not
 * converge is still returned (see ppm_fit_converged). */
PPM_API ppm_status ppm_fit_grid(const ppm_region* region, const ppm_stack* stack,
                                const ppm_model* model, const ppm_points* presences,
                                double spacing, ppm_fit** out);
/* Halves the spacing until the maximized log-likelihood changes by less
 * than tol or max_steps fits were made. Both outputs are required. */
PPM_API ppm_status ppm_fit_refine(const ppm_region* region, const ppm_stack* stack,
                                  const ppm_model* model, const ppm_points* presences,
                                  double initial_spacing, double tol, size_t max_steps,
                                  ppm_fit** fit_out, ppm_refinement** trace_out);
PPM_API int ppm_fit_converged(const ppm_fit* fit);
PPM_API size_t ppm_fit_num_coef(const ppm_fit* fit);
PPM_API const char* ppm_fit_coef_name(const ppm_fit* fit, size_t i);
/* Coefficient i in the fitted (possibly standardized) parameterization. */
PPM_API ppm_status ppm_fit_coef(const ppm_fit* fit, size_t i, double* beta, double* se);
/* Coefficient i in raw covariate units. */
PPM_API ppm_status ppm_fit_coef_raw(const ppm_fit* fit, size_t i, double* beta, double* se);
PPM_API double ppm_fit_log_lik(const ppm_fit* fit);
PPM_API double ppm_fit_aic(const ppm_fit* fit);
PPM_API int ppm_fit_iterations(const ppm_fit* fit);
/* Quadrature spacing the fit was computed on. */
PPM_API double ppm_fit_spacing(const ppm_fit* fit);
PPM_API ppm_status ppm_fit_write_json(const ppm_fit* fit, const char* path);
PPM_API ppm_status ppm_fit_read_json(const char* path, ppm_fit** out);
PPM_API void ppm_fit_free(ppm_fit* fit);

PPM_API size_t ppm_refinement_steps(const ppm_refinement* trace);
/* 1 when the tolerance was met, 0 when the step budget ran out first. */
PPM_API int ppm_refinement_converged(const ppm_refinement* trace);
/* NULL unless an inner fit failed and refinement stopped early. */
PPM_API const char* ppm_refinement_failure(const ppm_refinement* trace);
PPM_API ppm_status ppm_refinement_write_csv(const ppm_refinement* trace, const char* path);
PPM_API void ppm_refinement_free(ppm_refinement* trace);

/* Fitted intensity per stack cell; cells outside `region` (nullable) or
 * with missing covariates are nodata. */
PPM_API ppm_status ppm_predict(const ppm_fit* fit, const ppm_stack* stack,
                               const ppm_region* region, ppm_raster** out);

/* ---- simulation ------------------------------------------------------- */

PPM_API ppm_status ppm_simulate_raster(const ppm_raster* intensity, const ppm_region* region,
                                       uint64_t seed, ppm_points** out);
PPM_API ppm_status ppm_simulate_fit(const ppm_fit* fit, const ppm_stack* stack,
                                    const ppm_region* region, uint64_t seed, ppm_points** out);

/* ---- model selection -------------------------------------------------- */

/* All 2^k subsets of `variables` fitted on one grid, sorted by AIC. */
PPM_API ppm_status ppm_select(const ppm_region* region, const ppm_stack* stack,
                              const ppm_points* presences, const char* const* variables,
                              size_t k, int quadratic, int standardize, double spacing,
                              unsigned threads, ppm_selection** out);
PPM_API size_t ppm_selection_rows(const ppm_selection* table);
/* Variables joined by '+', or "(intercept)" for the empty subset. */
PPM_API const char* ppm_selection_subset(const ppm_selection* table, size_t i);
PPM_API ppm_status ppm_selection_row(const ppm_selection* table, size_t i, size_t* p,
                                     double* log_lik, double* aic, double* delta_aic,
                                     int* converged);
PPM_API ppm_status ppm_selection_write_csv(const ppm_selection* table, const char* path);
PPM_API void ppm_selection_free(ppm_selection* table);

/* ---- diagnostics ------------------------------------------------------ */

/* Inhomogeneous K-function of `points` with intensities `lambda`, written
 * to k_out[0..n_r). */
PPM_API ppm_status ppm_k_inhom(const ppm_points* points, const double* lambda,
                               const ppm_region* region, const double* r, size_t n_r,
                               double* k_out);
/* K-function of `data` under the fitted intensity with a pointwise
 * envelope from n_sim simulated patterns, on n_r distances 0..r_max. */
PPM_API ppm_status ppm_diagnose(const ppm_fit* fit, const ppm_stack* stack,
                                const ppm_region* region, const ppm_points* data, double r_max,
                                size_t n_r, size_t n_sim, double level, uint64_t seed,
                                unsigned threads, ppm_kfunction** out);
PPM_API size_t ppm_kfunction_size(const ppm_kfunction* k);
PPM_API ppm_status ppm_kfunction_get(const ppm_kfunction* k, size_t i, double* r, double* k_hat,
                                     double* theoretical, double* lo, double* hi);
PPM_API ppm_status ppm_kfunction_write_csv(const ppm_kfunction* k, const char* path);
PPM_API void ppm_kfunction_free(ppm_kfunction* k);

/* ---- pseudo-absence comparison ---------------------------------------- */

/* Grid mode: `values` are decreasing spacings. Random mode: `values` are
 * increasing pseudo-absence counts, each drawn `replicates` times. */
PPM_API ppm_status ppm_compare_logistic(const ppm_region* region, const ppm_stack* stack,
                                        const ppm_model* model, const ppm_points* presences,
                                        ppm_pseudo_mode mode, const double* values,
                                        size_t n_values, size_t replicates, uint64_t seed,
                                        unsigned threads, ppm_experiment** out);
PPM_API size_t ppm_experiment_rows(const ppm_experiment* trace);
/* Number of rows where either fit failed or did not converge. */
PPM_API size_t ppm_experiment_flagged(const ppm_experiment* trace);
/* Appends the rows of `src` to `dst`; both must share coefficient names. */
PPM_API ppm_status ppm_experiment_append(ppm_experiment* dst, const ppm_experiment* src);
PPM_API ppm_status ppm_experiment_write_csv(const ppm_experiment* trace, const char* path);
PPM_API void ppm_experiment_free(ppm_experiment* trace);

#ifdef __cplusplus
}
#endif

#endif /* PPM_PPM_H */
