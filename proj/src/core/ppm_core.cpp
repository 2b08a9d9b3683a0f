#include "core/ppm_core.hpp"

#include "core/error.hpp"
#include "core/numeric.hpp"

#include <cmath>
#include <sstream>

namespace ppm {

namespace {

// exp() overflows just above 709.78.
constexpr double kMaxLinearPredictor = 709.0;

}  // namespace

QuadratureScheme make_scheme(Eigen::MatrixXd design, Eigen::VectorXd weights,
                             std::size_t n_presence, double area) {
    const auto m = design.rows();
    if (weights.size() != m) throw InputError("weights and design have different row counts");
    if (n_presence < 1) throw InputError("quadrature scheme needs at least one presence");
    if (static_cast<std::size_t>(m) <= n_presence)
        throw InputError("quadrature scheme needs at least one quadrature point");
    if (!design.allFinite()) throw InputError("design matrix contains non-finite values");
    if (!(area > 0.0)) throw InputError("region area must be positive");
    for (Eigen::Index i = 0; i < m; ++i)
        if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
            throw InputError("quadrature weight " + std::to_string(i) + " is not positive");
    QuadratureScheme s;
    s.response = Eigen::VectorXd::Zero(m);
    for (std::size_t i = 0; i < n_presence; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        s.response[ii] = 1.0 / weights[ii];
    }
    s.design = std::move(design);
    s.weights = std::move(weights);
    s.n_presence = n_presence;
    s.area = area;
    return s;
}

QuadratureScheme with_constant_weights(const QuadratureScheme& scheme, double weight) {
    return make_scheme(scheme.design, Eigen::VectorXd::Constant(scheme.design.rows(), weight),
                       scheme.n_presence, scheme.area);
}

Eigen::MatrixXd FitResult::covariance() const {
    return fisher.ldlt().solve(Eigen::MatrixXd::Identity(fisher.rows(), fisher.cols()));
}

Eigen::VectorXd linear_predictor(const Eigen::VectorXd& beta, const Eigen::MatrixXd& design) {
    if (beta.size() != design.cols())
        throw InputError("coefficient vector has " + std::to_string(beta.size()) +
                         " entries, design has " + std::to_string(design.cols()) + " columns");
    Eigen::VectorXd eta = design * beta;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        if (!(eta[i] <= kMaxLinearPredictor)) {
            std::ostringstream msg;
            msg << "linear predictor " << format_double(eta[i]) << " at row " << i
                << " overflows exp(); the step diverged";
            throw NumericalError(msg.str());
        }
    }
    return eta;
}

double ppm_loglik(const Eigen::VectorXd& beta, const QuadratureScheme& scheme) {
    const Eigen::VectorXd eta = linear_predictor(beta, scheme.design);
    const auto& w = scheme.weights;
    const auto& z = scheme.response;
    return pairwise_sum(static_cast<std::size_t>(eta.size()), [&](std::size_t k) {
        const auto i = static_cast<Eigen::Index>(k);
        const double lambda = std::exp(eta[i]);
        return z[i] != 0.0 ? w[i] * (z[i] * eta[i] - lambda) : -w[i] * lambda;
    });
}

Eigen::VectorXd ppm_score(const Eigen::VectorXd& beta, const QuadratureScheme& scheme) {
    const Eigen::VectorXd eta = linear_predictor(beta, scheme.design);
    const Eigen::VectorXd resid =
        scheme.weights.array() * (scheme.response.array() - eta.array().exp());
    return scheme.design.transpose() * resid;
}

Eigen::MatrixXd ppm_fisher(const Eigen::VectorXd& beta, const QuadratureScheme& scheme) {
    const Eigen::VectorXd eta = linear_predictor(beta, scheme.design);
    const Eigen::VectorXd wl = scheme.weights.array() * eta.array().exp();
    Eigen::MatrixXd info =
        scheme.design.transpose() * (scheme.design.array().colwise() * wl.array()).matrix();
    return 0.5 * (info + info.transpose());
}

void check_full_rank(const Eigen::MatrixXd& design) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    const auto p = design.cols();
    if (qr.rank() == p) return;
    std::ostringstream msg;
    msg << "design matrix is rank deficient (rank " << qr.rank() << " of " << p
        << "); linearly dependent column(s):";
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index i = qr.rank(); i < p; ++i) msg << ' ' << perm[i];
    throw NumericalError(msg.str());
}

FitResult fit_ppm(const QuadratureScheme& scheme, const std::optional<Eigen::VectorXd>& init,
                  const FitOptions& options) {
    const auto p = scheme.design.cols();
    if (p < 1) throw InputError("model has no terms");
    check_full_rank(scheme.design);

    const double total_weight =
        pairwise_sum(scheme.size(), [&](std::size_t i) { return scheme.weights[static_cast<Eigen::Index>(i)]; });
    Eigen::VectorXd start;
    if (init) {
        if (init->size() != p) throw InputError("initial coefficient vector has the wrong length");
        start = *init;
    } else {
        start = Eigen::VectorXd::Zero(p);
        const bool intercept_first = (scheme.design.col(0).array() == 1.0).all();
        if (intercept_first)
            start[0] = std::log(static_cast<double>(scheme.n_presence) / total_weight);
    }

    detail::Objective f;
    f.value = [&](const Eigen::VectorXd& b) { return ppm_loglik(b, scheme); };
    f.gradient = [&](const Eigen::VectorXd& b) { return ppm_score(b, scheme); };
    f.information = [&](const Eigen::VectorXd& b) { return ppm_fisher(b, scheme); };
    // sum_i w_i z_i is the presence count.
    f.score_scale = 1.0 + static_cast<double>(scheme.n_presence);

    auto r = detail::newton_maximize(f, start, options);
    FitResult out;
    out.beta = std::move(r.beta);
    out.fisher = std::move(r.information);
    out.log_lik = r.value;
    out.aic = -2.0 * r.value + 2.0 * static_cast<double>(p);
    out.iterations = r.iterations;
    out.converged = r.converged;
    out.max_abs_score = r.max_abs_score;
    out.loglik_trace = std::move(r.trace);
    out.diagnostic = std::move(r.diagnostic);
    out.se = out.covariance().diagonal().cwiseSqrt();
    return out;
}

GridScheme build_grid_scheme(const Region& region, const CovariateStack& stack,
                             const ModelSpec& spec, const PointSet& presences, double spacing) {
    if (presences.empty()) throw InputError("no presence points");
    GridScheme out;
    out.spacing = spacing;
    out.quadrature = generate_quadrature_grid(region, spacing);
    const auto tiles = compute_tile_weights(region, presences, out.quadrature, spacing);
    out.orphan_tiles = tiles.orphan_tiles;

    PointSet all = presences;
    all.insert(all.end(), out.quadrature.begin(), out.quadrature.end());
    out.raw = sample_covariates(stack, all, spec.variables());
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(tiles.weights.data(),
                                                          static_cast<Eigen::Index>(tiles.weights.size()));
    out.scheme = make_scheme(build_design(spec, out.raw), std::move(w), presences.size(),
                             region.area());
    return out;
}

RasterGrid predict_intensity(const Eigen::VectorXd& beta, const ModelSpec& spec,
                             const CovariateStack& stack, const Region* region) {
    const auto& h = stack.header();
    if (beta.size() != static_cast<Eigen::Index>(spec.num_terms()))
        throw InputError("coefficient vector does not match the model");
    std::vector<const RasterGrid*> layers;
    for (const auto& v : spec.variables()) layers.push_back(&stack.grid(v));

    RasterGrid out = RasterGrid::filled(h, h.nodata);
    Eigen::MatrixXd raw(1, static_cast<Eigen::Index>(layers.size()));
    for (std::size_t r = 0; r < h.n_rows; ++r) {
        for (std::size_t c = 0; c < h.n_cols; ++c) {
            if (region && !region->contains(out.cell_center(r, c))) continue;
            bool ok = true;
            for (std::size_t j = 0; j < layers.size() && ok; ++j) {
                if (layers[j]->is_nodata(r, c)) ok = false;
                else raw(0, static_cast<Eigen::Index>(j)) = layers[j]->at(r, c);
            }
            if (!ok) continue;
            const double eta = (build_design(spec, raw) * beta)(0);
            const double lambda = std::exp(eta);
            if (!std::isfinite(lambda))
                throw NumericalError("predicted intensity overflows at row " + std::to_string(r) +
                                     ", column " + std::to_string(c));
            out.set(r, c, lambda);
        }
    }
    return out;
}

}  // namespace ppm
