#include "core/pseudo_absence.hpp"

#include "core/error.hpp"
#include "core/numeric.hpp"
#include "core/parallel.hpp"
#include "core/simulate.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace ppm {

namespace {

// log(1 + e^t) without overflow.
double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

void check_labels(const Eigen::MatrixXd& design, std::span<const std::uint8_t> labels) {
    if (static_cast<std::size_t>(design.rows()) != labels.size())
        throw InputError("label vector length does not match the design");
}

double relative_deviation(double a, double b) {
    const double denom = std::max(std::fabs(a), std::numeric_limits<double>::min());
    return std::fabs(a - b) / denom;
}

}  // namespace

double logistic_loglik(const Eigen::VectorXd& gamma, const Eigen::MatrixXd& design,
                       std::span<const std::uint8_t> labels) {
    check_labels(design, labels);
    if (gamma.size() != design.cols()) throw InputError("coefficient vector does not match design");
    const Eigen::VectorXd eta = design * gamma;
    return pairwise_sum(labels.size(), [&](std::size_t k) {
        const double t = eta[static_cast<Eigen::Index>(k)];
        return labels[k] ? -softplus(-t) : -softplus(t);
    });
}

std::vector<std::uint8_t> presence_labels(const QuadratureScheme& scheme) {
    std::vector<std::uint8_t> labels(scheme.size(), 0);
    for (std::size_t i = 0; i < scheme.n_presence; ++i) labels[i] = 1;
    return labels;
}

LogisticFit fit_logistic(const Eigen::MatrixXd& design, std::span<const std::uint8_t> labels,
                         const FitOptions& options) {
    check_labels(design, labels);
    std::size_t n = 0;
    for (auto l : labels) n += l ? 1 : 0;
    const std::size_t m = labels.size();
    if (n == 0 || n == m) throw InputError("logistic regression needs both presences and absences");
    check_full_rank(design);

    Eigen::VectorXd y(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) y[static_cast<Eigen::Index>(i)] = labels[i] ? 1.0 : 0.0;

    auto probabilities = [&](const Eigen::VectorXd& g) {
        Eigen::VectorXd eta = design * g;
        for (Eigen::Index i = 0; i < eta.size(); ++i) eta[i] = sigmoid(eta[i]);
        return eta;
    };
    detail::Objective f;
    f.value = [&](const Eigen::VectorXd& g) { return logistic_loglik(g, design, labels); };
    f.gradient = [&](const Eigen::VectorXd& g) -> Eigen::VectorXd {
        return design.transpose() * (y - probabilities(g));
    };
    f.information = [&](const Eigen::VectorXd& g) -> Eigen::MatrixXd {
        const Eigen::VectorXd p = probabilities(g);
        const Eigen::VectorXd v = p.array() * (1.0 - p.array());
        Eigen::MatrixXd info = design.transpose() * (design.array().colwise() * v.array()).matrix();
        return 0.5 * (info + info.transpose());
    };
    f.score_scale = 1.0 + static_cast<double>(n);

    Eigen::VectorXd start = Eigen::VectorXd::Zero(design.cols());
    if ((design.col(0).array() == 1.0).all())
        start[0] = std::log(static_cast<double>(n) / static_cast<double>(m - n));

    FitOptions opt = options;
    if (opt.divergence_bound == 0.0) opt.divergence_bound = 1e3;
    auto r = detail::newton_maximize(f, start, opt);

    LogisticFit out;
    out.gamma = std::move(r.beta);
    out.gamma0 = out.gamma[0] + std::log(static_cast<double>(m - n));
    out.fisher = std::move(r.information);
    out.se = out.fisher.ldlt()
                 .solve(Eigen::MatrixXd::Identity(out.fisher.rows(), out.fisher.cols()))
                 .diagonal()
                 .cwiseSqrt();
    out.log_lik = r.value;
    out.m = m;
    out.n = n;
    out.iterations = r.iterations;
    out.converged = r.converged;
    out.max_abs_score = r.max_abs_score;
    out.diagnostic = std::move(r.diagnostic);
    return out;
}

double logistic_ppm_gap(const QuadratureScheme& scheme, const Eigen::VectorXd& gamma) {
    if (!(scheme.design.col(0).array() == 1.0).all())
        throw InputError("first design column must be the intercept");
    const double m = static_cast<double>(scheme.size());
    const double n = static_cast<double>(scheme.n_presence);
    const Eigen::VectorXd eta = scheme.design * gamma;
    const double log_m_minus_n = std::log(m - n);
    const double log_m = std::log(m);
    // log(m) - log(m - n), the presence-row offset between the two models.
    const double offset = -std::log1p(-n / m);
    // Termwise difference l_bin - l_ppm avoids cancelling two large sums.
    const double diff = pairwise_sum(scheme.size(), [&](std::size_t k) {
        const auto i = static_cast<Eigen::Index>(k);
        const double lambda = std::exp(eta[i] - log_m);
        const double sp = softplus(eta[i] - log_m_minus_n);
        return k < scheme.n_presence ? offset - sp + lambda : -sp + lambda;
    });
    return std::fabs(diff);
}

WeightInvarianceReport check_weight_invariance(const QuadratureScheme& scheme) {
    const double m = static_cast<double>(scheme.size());
    const double expected = scheme.area / m;
    for (Eigen::Index i = 0; i < scheme.weights.size(); ++i)
        if (std::fabs(scheme.weights[i] - expected) > 1e-12 * expected)
            throw InputError("weight invariance needs every weight equal to |A|/m");

    WeightInvarianceReport out;
    out.weighted = fit_ppm(scheme);
    out.unweighted = fit_ppm(with_constant_weights(scheme, 1.0));
    const auto p = out.weighted.beta.size();
    for (Eigen::Index j = 1; j < p; ++j) {
        out.max_slope_rel_dev = std::max(
            out.max_slope_rel_dev, relative_deviation(out.weighted.beta[j], out.unweighted.beta[j]));
        out.max_se_rel_dev = std::max(out.max_se_rel_dev,
                                      relative_deviation(out.weighted.se[j], out.unweighted.se[j]));
    }
    out.intercept_dev = std::fabs((out.unweighted.beta[0] - out.weighted.beta[0]) -
                                  std::log(scheme.area / m));
    return out;
}

ExperimentTrace convergence_experiment(const Region& region, const CovariateStack& stack,
                                       const ModelSpec& spec, const PointSet& presences,
                                       const ExperimentConfig& config) {
    const bool grid = config.mode == PseudoAbsenceMode::grid;
    const std::size_t steps = grid ? config.spacings.size() : config.pseudo_absences.size();
    if (steps == 0) throw InputError("convergence experiment needs at least one step");
    if (presences.empty()) throw InputError("no presence points");
    if (grid) {
        for (std::size_t s = 1; s < steps; ++s)
            if (!(config.spacings[s] < config.spacings[s - 1]))
                throw InputError("grid spacings must be strictly decreasing");
    } else {
        for (std::size_t s = 1; s < steps; ++s)
            if (!(config.pseudo_absences[s] > config.pseudo_absences[s - 1]))
                throw InputError("pseudo-absence counts must be strictly increasing");
        if (config.pseudo_absences.front() == 0)
            throw InputError("pseudo-absence counts must be positive");
        if (config.replicates == 0) throw InputError("random mode needs at least one replicate");
    }
    const std::size_t reps = grid ? 1 : config.replicates;

    ExperimentTrace trace;
    trace.coefficient_names = spec.term_names();
    trace.rows.resize(steps * reps);
    // Presence covariates are shared by every random replicate.
    const Eigen::MatrixXd presence_raw =
        grid ? Eigen::MatrixXd() : sample_covariates(stack, presences, spec.variables());

    parallel_for(steps * reps, config.threads, [&](std::size_t job) {
        ExperimentRow row;
        row.step = job / reps;
        row.replicate = job % reps;
        row.mode = config.mode;
        QuadratureScheme scheme;
        if (grid) {
            row.resolution = config.spacings[row.step];
            scheme = build_grid_scheme(region, stack, spec, presences, row.resolution).scheme;
        } else {
            const std::size_t count = config.pseudo_absences[row.step];
            row.resolution = static_cast<double>(count);
            Rng rng(replicate_seed(config.seed, job));
            const PointSet pseudo = sample_uniform_points(region, count, rng);
            Eigen::MatrixXd raw(presence_raw.rows() + static_cast<Eigen::Index>(count),
                                presence_raw.cols());
            raw << presence_raw, sample_covariates(stack, pseudo, spec.variables());
            const double m = static_cast<double>(raw.rows());
            scheme = make_scheme(build_design(spec, raw),
                                 Eigen::VectorXd::Constant(raw.rows(), region.area() / m),
                                 presences.size(), region.area());
        }
        row.m = scheme.size();
        const auto p = static_cast<Eigen::Index>(spec.num_terms());
        const double nan = std::numeric_limits<double>::quiet_NaN();
        try {
            const auto fit = fit_ppm(scheme);
            row.ppm_beta = fit.beta;
            row.ppm_se = fit.se;
            row.l_ppm = fit.log_lik;
            row.ppm_converged = fit.converged;
            if (!fit.converged) row.note += "ppm: " + fit.diagnostic + "; ";
        } catch (const NumericalError& e) {
            row.ppm_beta = row.ppm_se = Eigen::VectorXd::Constant(p, nan);
            row.l_ppm = nan;
            row.note += std::string("ppm: ") + e.what() + "; ";
        }
        try {
            const auto labels = presence_labels(scheme);
            const auto fit = fit_logistic(scheme.design, labels);
            row.logit_gamma = fit.gamma;
            row.logit_se = fit.se;
            row.logit_gamma0 = fit.gamma0;
            row.l_bin = fit.log_lik;
            row.logit_converged = fit.converged;
            if (!fit.converged) row.note += "logistic: " + fit.diagnostic + "; ";
        } catch (const NumericalError& e) {
            row.logit_gamma = row.logit_se = Eigen::VectorXd::Constant(p, nan);
            row.logit_gamma0 = row.l_bin = nan;
            row.note += std::string("logistic: ") + e.what() + "; ";
        }
        trace.rows[job] = std::move(row);
    });
    return trace;
}

void write_experiment_csv(std::ostream& out, const ExperimentTrace& trace) {
    out << "step,replicate,mode,resolution,m";
    for (const auto& c : trace.coefficient_names) out << ",ppm_" << c << ",ppm_se_" << c;
    for (const auto& c : trace.coefficient_names) out << ",logit_" << c << ",logit_se_" << c;
    out << ",logit_gamma0,l_ppm,l_bin,ppm_converged,logit_converged\n";
    for (const auto& r : trace.rows) {
        out << r.step << ',' << r.replicate << ','
            << (r.mode == PseudoAbsenceMode::grid ? "grid" : "random") << ','
            << format_double(r.resolution) << ',' << r.m;
        for (Eigen::Index j = 0; j < r.ppm_beta.size(); ++j)
            out << ',' << format_double(r.ppm_beta[j]) << ',' << format_double(r.ppm_se[j]);
        for (Eigen::Index j = 0; j < r.logit_gamma.size(); ++j)
            out << ',' << format_double(r.logit_gamma[j]) << ',' << format_double(r.logit_se[j]);
        out << ',' << format_double(r.logit_gamma0) << ',' << format_double(r.l_ppm) << ','
            << format_double(r.l_bin) << ',' << (r.ppm_converged ? 1 : 0) << ','
            << (r.logit_converged ? 1 : 0) << '\n';
    }
}

}  // namespace ppm
