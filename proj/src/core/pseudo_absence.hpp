#pragma once

#include "core/covariates.hpp"
#include "core/ppm_core.hpp"
#include "core/region_grid.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ppm {

/// Presence/pseudo-absence logistic regression fit. `gamma` is the
/// free-intercept parameterization; `gamma0` adds back log(m - n) so that
/// logit(p) = gamma0 - log(m - n) + slopes.
struct LogisticFit {
    Eigen::VectorXd gamma;
    double gamma0 = 0.0;
    Eigen::MatrixXd fisher;
    Eigen::VectorXd se;
    double log_lik = 0.0;
    std::size_t m = 0;
    std::size_t n = 0;
    int iterations = 0;
    bool converged = false;
    double max_abs_score = 0.0;
    std::string diagnostic;
};

/// sum_{presences} log p_i + sum_{others} log(1 - p_i), logit(p) = X*gamma.
double logistic_loglik(const Eigen::VectorXd& gamma, const Eigen::MatrixXd& design,
                       std::span<const std::uint8_t> labels);

/// Bernoulli maximum likelihood by Newton with step halving. Fits whose
/// coefficients pass 1e3 while the likelihood still increases are returned
/// unconverged with a separation diagnostic.
LogisticFit fit_logistic(const Eigen::MatrixXd& design, std::span<const std::uint8_t> labels,
                         const FitOptions& options = {});

/// Labels for a scheme: presences first, then zeros.
std::vector<std::uint8_t> presence_labels(const QuadratureScheme& scheme);

/// |l_bin(gamma) - l_ppm(gamma - (log m, 0, ...); w = 1)| on the scheme's
/// design, with logit(p) = X*gamma - log(m - n). Column 0 must be the
/// intercept.
double logistic_ppm_gap(const QuadratureScheme& scheme, const Eigen::VectorXd& gamma);

/// Comparison of the fit with all weights |A|/m against the fit with
/// unit weights on the same points.
struct WeightInvarianceReport {
    FitResult weighted;
    FitResult unweighted;
    double max_slope_rel_dev = 0.0;
    double max_se_rel_dev = 0.0;
    /// |(unweighted intercept - weighted intercept) - log(|A|/m)|.
    double intercept_dev = 0.0;
};

/// Requires every weight to equal scheme.area / m.
WeightInvarianceReport check_weight_invariance(const QuadratureScheme& scheme);

enum class PseudoAbsenceMode { grid, random };

struct ExperimentConfig {
    PseudoAbsenceMode mode = PseudoAbsenceMode::grid;
    /// Grid mode: decreasing spacings.
    std::vector<double> spacings;
    /// Random mode: increasing pseudo-absence counts (m - n).
    std::vector<std::size_t> pseudo_absences;
    /// Random mode: independent draws per count.
    std::size_t replicates = 1;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

struct ExperimentRow {
    std::size_t step = 0;
    std::size_t replicate = 0;
    PseudoAbsenceMode mode = PseudoAbsenceMode::grid;
    /// Spacing (grid mode) or pseudo-absence count (random mode).
    double resolution = 0.0;
    std::size_t m = 0;
    Eigen::VectorXd ppm_beta;
    Eigen::VectorXd ppm_se;
    double l_ppm = 0.0;
    bool ppm_converged = false;
    Eigen::VectorXd logit_gamma;
    Eigen::VectorXd logit_se;
    double logit_gamma0 = 0.0;
    double l_bin = 0.0;
    bool logit_converged = false;
    std::string note;
};

struct ExperimentTrace {
    std::vector<std::string> coefficient_names;
    std::vector<ExperimentRow> rows;
};

/// Fits the point-process model and the pseudo-absence logistic model on the
/// same points at each step. Grid mode uses tile weights; random mode draws
/// pseudo-absences uniformly over the mask and gives every point weight
/// |A|/m. Random replicate r of step s uses seed + s * replicates + r.
ExperimentTrace convergence_experiment(const Region& region, const CovariateStack& stack,
                                       const ModelSpec& spec, const PointSet& presences,
                                       const ExperimentConfig& config);

void write_experiment_csv(std::ostream& out, const ExperimentTrace& trace);

}  // namespace ppm
