#include "core/selection.hpp"

#include "core/error.hpp"
#include "core/numeric.hpp"
#include "core/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace ppm {

RefinementResult refine_until_converged(const Region& region, const CovariateStack& stack,
                                        const ModelSpec& spec, const PointSet& presences,
                                        double initial_spacing, double tol,
                                        std::size_t max_steps) {
    if (!(tol > 0.0)) throw InputError("refinement tolerance must be positive");
    if (max_steps < 1) throw InputError("refinement needs at least one step");
    RefinementResult out;
    out.trace.coefficient_names = spec.term_names();
    double spacing = initial_spacing;
    for (std::size_t step = 0; step < max_steps; ++step, spacing *= 0.5) {
        GridScheme scheme;
        FitResult fit;
        try {
            scheme = build_grid_scheme(region, stack, spec, presences, spacing);
            fit = fit_ppm(scheme.scheme);
        } catch (const Error& e) {
            if (step == 0) throw;
            out.failure = "fit at spacing " + format_double(spacing) + " failed: " + e.what();
            break;
        }
        RefinementStep row{spacing, scheme.scheme.size(), fit.log_lik, fit.beta, fit.se, fit.converged};
        out.trace.steps.push_back(row);
        const bool fit_ok = fit.converged;
        const std::string diagnostic = fit.diagnostic;
        out.fit = std::move(fit);
        out.scheme = std::move(scheme);
        if (!fit_ok) {
            out.failure = "fit at spacing " + format_double(spacing) + " did not converge: " + diagnostic;
            break;
        }
        if (step > 0) {
            const auto& prev = out.trace.steps[step - 1];
            if (std::fabs(row.log_lik - prev.log_lik) < tol) {
                out.trace.converged_spacing = spacing;
                break;
            }
        }
    }
    return out;
}

void write_refinement_csv(std::ostream& out, const RefinementTrace& trace) {
    out << "step,spacing,m,log_lik,delta_log_lik,converged";
    for (const auto& c : trace.coefficient_names) out << ",beta_" << c << ",se_" << c;
    out << '\n';
    for (std::size_t s = 0; s < trace.steps.size(); ++s) {
        const auto& row = trace.steps[s];
        out << s << ',' << format_double(row.spacing) << ',' << row.m << ','
            << format_double(row.log_lik) << ','
            << (s ? format_double(row.log_lik - trace.steps[s - 1].log_lik) : std::string()) << ','
            << (row.converged ? 1 : 0);
        for (Eigen::Index j = 0; j < row.beta.size(); ++j)
            out << ',' << format_double(row.beta[j]) << ',' << format_double(row.se[j]);
        out << '\n';
    }
}

SelectionTable all_subsets_aic(const Region& region, const CovariateStack& stack,
                               const PointSet& presences, const std::vector<std::string>& variables,
                               bool quadratic, const std::optional<Standardization>& standardization,
                               double spacing, unsigned threads) {
    const std::size_t k = variables.size();
    if (k > 10) throw InputError("all-subsets selection supports at most 10 variables");
    if (presences.empty()) throw InputError("no presence points");
    if (standardization &&
        (standardization->center.size() != k || standardization->scale.size() != k))
        throw InputError("standardization must cover every candidate variable");

    // One quadrature scheme shared by every candidate model.
    const PointSet quad = generate_quadrature_grid(region, spacing);
    const auto tiles = compute_tile_weights(region, presences, quad, spacing);
    PointSet all = presences;
    all.insert(all.end(), quad.begin(), quad.end());
    const Eigen::MatrixXd raw = sample_covariates(stack, all, variables);
    const Eigen::VectorXd weights = Eigen::Map<const Eigen::VectorXd>(
        tiles.weights.data(), static_cast<Eigen::Index>(tiles.weights.size()));

    SelectionTable table;
    table.variables = variables;
    table.quadratic = quadratic;
    const std::size_t models = std::size_t{1} << k;
    table.rows.resize(models);

    parallel_for(models, threads, [&](std::size_t mask) {
        SelectionRow row;
        row.mask = static_cast<std::uint32_t>(mask);
        std::vector<std::string> names;
        std::vector<Eigen::Index> cols;
        Standardization sub;
        for (std::size_t j = 0; j < k; ++j) {
            if (!(mask >> j & 1u)) continue;
            names.push_back(variables[j]);
            cols.push_back(static_cast<Eigen::Index>(j));
            if (standardization) {
                sub.center.push_back(standardization->center[j]);
                sub.scale.push_back(standardization->scale[j]);
            }
        }
        row.subset = names;
        ModelSpec spec = quadratic ? ModelSpec::quadratic(names) : ModelSpec::linear(names);
        if (standardization) spec = spec.with_standardization(sub);
        row.p = spec.num_terms();

        Eigen::MatrixXd sub_raw(raw.rows(), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t c = 0; c < cols.size(); ++c)
            sub_raw.col(static_cast<Eigen::Index>(c)) = raw.col(cols[c]);
        try {
            const auto scheme =
                make_scheme(build_design(spec, sub_raw), weights, presences.size(), region.area());
            const auto fit = fit_ppm(scheme);
            row.log_lik = fit.log_lik;
            row.aic = fit.aic;
            row.converged = fit.converged;
            row.note = fit.diagnostic;
        } catch (const NumericalError& e) {
            row.log_lik = -std::numeric_limits<double>::infinity();
            row.aic = std::numeric_limits<double>::infinity();
            row.converged = false;
            row.note = e.what();
        }
        table.rows[mask] = std::move(row);
    });

    auto indices = [&](const SelectionRow& r) {
        std::vector<std::size_t> out;
        for (std::size_t j = 0; j < k; ++j)
            if (r.mask >> j & 1u) out.push_back(j);
        return out;
    };
    std::sort(table.rows.begin(), table.rows.end(), [&](const SelectionRow& a, const SelectionRow& b) {
        if (a.converged != b.converged) return a.converged;
        if (a.aic != b.aic) return a.aic < b.aic;
        if (a.p != b.p) return a.p < b.p;
        return indices(a) < indices(b);
    });
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : table.rows)
        if (r.converged) best = std::min(best, r.aic);
    for (auto& r : table.rows) r.delta_aic = r.aic - best;
    return table;
}

void write_selection_csv(std::ostream& out, const SelectionTable& table) {
    out << "rank,subset,n_variables,p,log_lik,aic,delta_aic,converged\n";
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& r = table.rows[i];
        std::string subset;
        for (const auto& v : r.subset) subset += (subset.empty() ? "" : "+") + v;
        if (subset.empty()) subset = "(intercept)";
        out << i + 1 << ',' << subset << ',' << r.subset.size() << ',' << r.p << ','
            << format_double(r.log_lik) << ',' << format_double(r.aic) << ','
            << format_double(r.delta_aic) << ',' << (r.converged ? 1 : 0) << '\n';
    }
}

}  // namespace ppm
