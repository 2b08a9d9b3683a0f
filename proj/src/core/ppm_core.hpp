#pragma once

#include "core/covariates.hpp"
#include "core/newton.hpp"
#include "core/region_grid.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

namespace ppm {

/// Berman-Turner dataset: presences occupy the first n_presence rows.
struct QuadratureScheme {
    Eigen::MatrixXd design;
    Eigen::VectorXd weights;
    /// z_i = 1/w_i for presences, 0 for quadrature points.
    Eigen::VectorXd response;
    std::size_t n_presence = 0;
    double area = 0.0;

    std::size_t size() const { return static_cast<std::size_t>(design.rows()); }
    std::size_t n_quadrature() const { return size() - n_presence; }
};

/// Validates inputs and fills in the pseudo-response.
QuadratureScheme make_scheme(Eigen::MatrixXd design, Eigen::VectorXd weights,
                             std::size_t n_presence, double area);

/// Copy of `scheme` with every weight replaced by `weight`.
QuadratureScheme with_constant_weights(const QuadratureScheme& scheme, double weight);

struct FitResult {
    Eigen::VectorXd beta;
    Eigen::MatrixXd fisher;
    Eigen::VectorXd se;
    double log_lik = 0.0;
    double aic = 0.0;
    int iterations = 0;
    bool converged = false;
    double max_abs_score = 0.0;
    /// Objective value after each accepted iteration, starting point first.
    std::vector<double> loglik_trace;
    std::string diagnostic;

    Eigen::MatrixXd covariance() const;
};

/// Linear predictor X*beta; throws NumericalError where exp() would overflow.
Eigen::VectorXd linear_predictor(const Eigen::VectorXd& beta, const Eigen::MatrixXd& design);

/// sum_i w_i (z_i log(lambda_i) - lambda_i), log(lambda) = X*beta.
double ppm_loglik(const Eigen::VectorXd& beta, const QuadratureScheme& scheme);
/// X^T (w .* (z - lambda)).
Eigen::VectorXd ppm_score(const Eigen::VectorXd& beta, const QuadratureScheme& scheme);
/// X^T diag(w .* lambda) X.
Eigen::MatrixXd ppm_fisher(const Eigen::VectorXd& beta, const QuadratureScheme& scheme);

/// Throws NumericalError naming the columns found to be linearly dependent
/// (column-pivoted QR, relative pivot threshold 1e-10).
void check_full_rank(const Eigen::MatrixXd& design);

/// Weighted Poisson maximum likelihood by Newton/IRLS with step halving.
/// Default start: zeros except intercept = log(n / sum w).
FitResult fit_ppm(const QuadratureScheme& scheme, const std::optional<Eigen::VectorXd>& init = {},
                  const FitOptions& options = {});

/// Quadrature scheme on a regular grid together with the raw covariates
/// sampled at every row, so other model specs can reuse the same points.
struct GridScheme {
    QuadratureScheme scheme;
    PointSet quadrature;
    Eigen::MatrixXd raw;
    double spacing = 0.0;
    std::size_t orphan_tiles = 0;
};

/// Quadrature grid of the given spacing, tile weights with tile = spacing,
/// nearest-cell covariates for spec.variables(), and the spec's design.
GridScheme build_grid_scheme(const Region& region, const CovariateStack& stack,
                             const ModelSpec& spec, const PointSet& presences, double spacing);

/// Per-cell exp(x(cell)^T beta) on the stack lattice. Cells with nodata in
/// any model covariate, or whose center is outside `region` when given,
/// are nodata in the output.
RasterGrid predict_intensity(const Eigen::VectorXd& beta, const ModelSpec& spec,
                             const CovariateStack& stack, const Region* region = nullptr);

}  // namespace ppm
