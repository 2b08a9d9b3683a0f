#pragma once

#include "core/covariates.hpp"
#include "core/ppm_core.hpp"
#include "core/region_grid.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ppm {

struct RefinementStep {
    double spacing = 0.0;
    std::size_t m = 0;
    double log_lik = 0.0;
    Eigen::VectorXd beta;
    Eigen::VectorXd se;
    bool converged = false;
};

struct RefinementTrace {
    std::vector<std::string> coefficient_names;
    std::vector<RefinementStep> steps;
    /// Spacing at which the log-likelihood change first fell below tol.
    std::optional<double> converged_spacing;
};

struct RefinementResult {
    /// Fit at the finest spacing reached.
    FitResult fit;
    GridScheme scheme;
    RefinementTrace trace;
    /// Set when an inner fit failed; the trace holds the steps before it.
    std::optional<std::string> failure;
};

/// Fits on grids of spacing s, s/2, s/4, ... (4x the quadrature points per
/// step) until the maximized log-likelihood changes by less than `tol` or
/// `max_steps` fits have been made.
RefinementResult refine_until_converged(const Region& region, const CovariateStack& stack,
                                        const ModelSpec& spec, const PointSet& presences,
                                        double initial_spacing, double tol = 1.0,
                                        std::size_t max_steps = 6);

void write_refinement_csv(std::ostream& out, const RefinementTrace& trace);

struct SelectionRow {
    std::vector<std::string> subset;
    /// Bit j set when variable j of the candidate list is included.
    std::uint32_t mask = 0;
    std::size_t p = 0;
    double log_lik = 0.0;
    double aic = 0.0;
    double delta_aic = 0.0;
    bool converged = false;
    std::string note;
};

struct SelectionTable {
    std::vector<std::string> variables;
    bool quadratic = false;
    /// Sorted by AIC; unconverged rows last.
    std::vector<SelectionRow> rows;
};

/// Fits every subset of `variables` (2^k models, empty subset = intercept
/// only) on one shared quadrature grid. Quadratic family uses the full
/// quadratic over each subset. `standardization`, when given, holds one
/// center/scale per candidate variable.
SelectionTable all_subsets_aic(const Region& region, const CovariateStack& stack,
                               const PointSet& presences, const std::vector<std::string>& variables,
                               bool quadratic, const std::optional<Standardization>& standardization,
                               double spacing, unsigned threads = 1);

void write_selection_csv(std::ostream& out, const SelectionTable& table);

}  // namespace ppm
