#pragma once

#include "core/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace ppm {

struct FitOptions {
    int max_iterations = 100;
    /// Converged when max|score| < score_tol * score_scale ...
    double score_tol = 1e-8;
    /// ... and |change in log-likelihood| < loglik_tol * (1 + |log-likelihood|).
    double loglik_tol = 1e-10;
    int max_halvings = 60;
    /// Coefficient magnitude beyond which a still-improving fit is treated as
    /// diverging (separation). Zero disables the check.
    double divergence_bound = 0.0;
};

namespace detail {

// Concave objective: value, gradient and (positive definite) information.
struct Objective {
    std::function<double(const Eigen::VectorXd&)> value;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> information;
    double score_scale = 1.0;
};

struct NewtonResult {
    Eigen::VectorXd beta;
    Eigen::MatrixXd information;
    double value = -std::numeric_limits<double>::infinity();
    double max_abs_score = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
    std::vector<double> trace;
    std::string diagnostic;
};

inline double safe_value(const Objective& f, const Eigen::VectorXd& beta) {
    try {
        const double v = f.value(beta);
        return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
    } catch (const NumericalError&) {
        return -std::numeric_limits<double>::infinity();
    }
}

// Newton iteration beta <- beta + I^-1 S with step halving whenever the
// objective fails to increase. Once both convergence criteria hold, one
// further full step is attempted and kept unless it lowers the objective by
// more than rounding. When the criteria hold but the Newton step stays large
// the objective is flat along a direction of unbounded ascent; a few such
// iterations in a row are reported as separation.
inline NewtonResult newton_maximize(const Objective& f, Eigen::VectorXd beta,
                                    const FitOptions& opt) {
    NewtonResult out;
    double value = f.value(beta);
    if (!std::isfinite(value))
        throw NumericalError("objective is not finite at the starting point");
    out.trace.push_back(value);
    double last_change = std::numeric_limits<double>::infinity();
    constexpr int drift_limit = 5;
    int drifting = 0;

    for (int iter = 0;; ++iter) {
        const Eigen::VectorXd score = f.gradient(beta);
        const double max_score = score.cwiseAbs().maxCoeff();
        bool converged = max_score < opt.score_tol * f.score_scale &&
                         std::fabs(last_change) < opt.loglik_tol * (1.0 + std::fabs(value));
        const Eigen::MatrixXd info = f.information(beta);
        Eigen::LLT<Eigen::MatrixXd> llt(info);
        if (llt.info() != Eigen::Success)
            throw NumericalError("information matrix is not positive definite");
        const Eigen::VectorXd step = llt.solve(score);
        if (converged && step.cwiseAbs().maxCoeff() > 1e-4 * (1.0 + beta.cwiseAbs().maxCoeff())) {
            converged = false;
            if (++drifting >= drift_limit) {
                out.beta = beta;
                out.value = value;
                out.information = info;
                out.max_abs_score = max_score;
                out.iterations = iter;
                out.converged = false;
                out.diagnostic =
                    "estimates keep moving while the score vanishes: likely complete separation";
                return out;
            }
        } else {
            drifting = 0;
        }
        if (converged || iter >= opt.max_iterations) {
            if (converged) {
                const Eigen::VectorXd polished = beta + step;
                const double v = safe_value(f, polished);
                if (v >= value - 1e-13 * (1.0 + std::fabs(value))) {
                    beta = polished;
                    value = v;
                }
            }
            out.beta = beta;
            out.value = value;
            out.information = converged ? f.information(beta) : info;
            const Eigen::VectorXd final_score = converged ? f.gradient(beta) : score;
            out.max_abs_score = final_score.cwiseAbs().maxCoeff();
            out.iterations = iter;
            out.converged = converged;
            if (!converged)
                out.diagnostic = "no convergence after " + std::to_string(iter) + " iterations";
            return out;
        }

        double scale = 1.0;
        double trial_value = -std::numeric_limits<double>::infinity();
        Eigen::VectorXd trial;
        int halvings = 0;
        for (; halvings <= opt.max_halvings; ++halvings, scale *= 0.5) {
            trial = beta + scale * step;
            trial_value = safe_value(f, trial);
            if (trial_value >= value) break;
        }
        if (halvings > opt.max_halvings) {
            // No ascent possible at working precision: accept the point if the
            // score is already small, otherwise report failure.
            out.beta = beta;
            out.value = value;
            out.information = info;
            out.max_abs_score = max_score;
            out.iterations = iter;
            out.converged = max_score < opt.score_tol * f.score_scale;
            if (!out.converged) out.diagnostic = "step halving failed to increase the log-likelihood";
            return out;
        }
        last_change = trial_value - value;
        beta = trial;
        value = trial_value;
        out.trace.push_back(value);

        if (opt.divergence_bound > 0.0 && beta.cwiseAbs().maxCoeff() > opt.divergence_bound &&
            last_change > opt.loglik_tol * (1.0 + std::fabs(value))) {
            out.beta = beta;
            out.value = value;
            out.information = f.information(beta);
            out.max_abs_score = f.gradient(beta).cwiseAbs().maxCoeff();
            out.iterations = iter + 1;
            out.converged = false;
            out.diagnostic =
                "coefficients exceed " + std::to_string(opt.divergence_bound) +
                " while the log-likelihood is still increasing: likely complete separation";
            return out;
        }
    }
}

}  // namespace detail
}  // namespace ppm
