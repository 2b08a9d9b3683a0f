#include "core/error.hpp"
#include "core/ppm_core.hpp"
#include "core/pseudo_absence.hpp"
#include "core/random.hpp"
#include "support/oracles.hpp"
#include "support/scenario.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

using namespace ppm;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

Eigen::MatrixXd with_intercept(const std::vector<double>& x) {
    Eigen::MatrixXd d(static_cast<Eigen::Index>(x.size()), 2);
    for (std::size_t i = 0; i < x.size(); ++i) {
        d(static_cast<Eigen::Index>(i), 0) = 1.0;
        d(static_cast<Eigen::Index>(i), 1) = x[i];
    }
    return d;
}

// n presences followed by m - n quadrature rows; unit weights.
QuadratureScheme lattice_scheme(std::size_t n, std::size_t m) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(m), 2);
    for (std::size_t i = 0; i < m; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        x(r, 0) = 1.0;
        x(r, 1) = i < n ? std::sin(static_cast<double>(i))
                        : -1.0 + 2.0 * (static_cast<double>(i - n) + 0.5) / static_cast<double>(m - n);
    }
    return make_scheme(x, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m)), n,
                       static_cast<double>(m));
}

// l_bin - l_ppm from two independent long-double sums.
double oracle_gap(const QuadratureScheme& s, const Eigen::VectorXd& gamma) {
    const double m = static_cast<double>(s.size());
    const double n = static_cast<double>(s.n_presence);
    Eigen::VectorXd g_bin = gamma, b_ppm = gamma;
    g_bin[0] -= std::log(m - n);
    b_ppm[0] -= std::log(m);
    const double l_bin = oracle::logistic_loglik(g_bin, s.design, presence_labels(s));
    const double l_ppm = oracle::ppm_loglik(b_ppm, s.design, Eigen::VectorXd::Ones(s.design.rows()),
                                            s.n_presence);
    return std::fabs(l_bin - l_ppm);
}

scenario::Scenario two_covariate_scenario() {
    return scenario::make(30, 20, 1.0, 2, ModelSpec::linear({"x1", "x2"}), {0.8, -0.5}, 300.0);
}

}  // namespace

TEST_CASE("separated symmetric toy data keeps a zero intercept and is flagged") {
    const auto x = with_intercept({1.0, 1.0, -1.0, -1.0});
    const std::vector<std::uint8_t> y{1, 1, 0, 0};
    const auto fit = fit_logistic(x, y);
    CHECK_THAT(fit.gamma[0], WithinAbs(0.0, 1e-12));
    CHECK_FALSE(fit.converged);
    CHECK_THAT(fit.diagnostic, ContainsSubstring("separation"));
}

TEST_CASE("balanced symmetric toy data has a zero intercept and log-odds slope") {
    // P(y = 1 | x = 1) = 2/3 and P(y = 1 | x = -1) = 1/3.
    const auto x = with_intercept({1, 1, -1, -1, -1, 1});
    const std::vector<std::uint8_t> y{1, 1, 1, 0, 0, 0};
    const auto fit = fit_logistic(x, y);
    REQUIRE(fit.converged);
    CHECK_THAT(fit.gamma[0], WithinAbs(0.0, 1e-10));
    CHECK_THAT(fit.gamma[1], WithinRel(0.5 * std::log(4.0), 1e-10));
    CHECK_THAT(fit.gamma0, WithinAbs(std::log(3.0), 1e-10));
}

TEST_CASE("logistic fit matches a derivative-free optimum") {
    Rng rng(42);
    Eigen::MatrixXd x(50, 3);
    std::vector<std::uint8_t> y(50);
    std::size_t n = 0;
    for (Eigen::Index i = 0; i < 50; ++i) {
        x(i, 0) = 1.0;
        x(i, 1) = rng.uniform(-1, 1);
        x(i, 2) = rng.uniform(-1, 1);
        y[static_cast<std::size_t>(i)] = rng.uniform() < sigmoid(0.3 + x(i, 1) - x(i, 2)) ? 1 : 0;
        n += y[static_cast<std::size_t>(i)];
    }
    const auto fit = fit_logistic(x, y);
    REQUIRE(fit.converged);
    const oracle::Fn ll = [&](const oracle::Vec& g) { return oracle::logistic_loglik(g, x, y); };
    const auto best = oracle::nelder_mead_max(ll, oracle::Vec::Zero(3));
    for (Eigen::Index j = 0; j < 3; ++j) CHECK_THAT(fit.gamma[j], WithinAbs(best[j], 1e-5));
    CHECK_THAT(fit.log_lik, WithinRel(ll(fit.gamma), 1e-12));

    double fitted = 0.0;
    for (Eigen::Index i = 0; i < 50; ++i) fitted += sigmoid(x.row(i).dot(fit.gamma));
    CHECK_THAT(fitted, WithinAbs(static_cast<double>(n), 1e-8));

    const auto fd = oracle::fd_hessian(ll, fit.gamma);
    for (Eigen::Index j = 0; j < 3; ++j)
        for (Eigen::Index k = 0; k < 3; ++k)
            CHECK_THAT(fit.fisher(j, k), WithinAbs(-fd(j, k), 1e-4 * (1.0 + std::fabs(fd(j, k)))));
}

TEST_CASE("logistic log-likelihood matches direct summation") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::MatrixXd x(40, 2);
        std::vector<std::uint8_t> y(40);
        for (Eigen::Index i = 0; i < 40; ++i) {
            x(i, 0) = 1.0;
            x(i, 1) = rng.uniform(-3, 3);
            y[static_cast<std::size_t>(i)] = rng.below(2) ? 1 : 0;
        }
        const Eigen::Vector2d g(rng.uniform(-5, 5), rng.uniform(-5, 5));
        CHECK_THAT(logistic_loglik(g, x, y), WithinRel(oracle::logistic_loglik(g, x, y), 1e-12));
    }
}

TEST_CASE("logistic input errors") {
    const auto x = with_intercept({0.1, 0.2, 0.3});
    CHECK_THROWS_AS(fit_logistic(x, std::vector<std::uint8_t>{1, 1, 1}), InputError);
    CHECK_THROWS_AS(fit_logistic(x, std::vector<std::uint8_t>{0, 0, 0}), InputError);
    CHECK_THROWS_AS(fit_logistic(x, std::vector<std::uint8_t>{1, 0}), InputError);
    Eigen::MatrixXd dup(3, 2);
    dup << 1, 1, 1, 1, 1, 1;
    CHECK_THROWS_AS(fit_logistic(dup, std::vector<std::uint8_t>{1, 0, 0}), NumericalError);
    CHECK_THROWS_AS(logistic_loglik(Eigen::Vector3d::Zero(), x, std::vector<std::uint8_t>{1, 0, 0}),
                    InputError);
}

TEST_CASE("gap matches the hand-computed difference on ten points") {
    const auto s = lattice_scheme(3, 10);
    for (const Eigen::Vector2d g : {Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(1.0, -0.5),
                                    Eigen::Vector2d(-1.0, 2.0)})
        CHECK_THAT(logistic_ppm_gap(s, g), WithinAbs(oracle_gap(s, g), 1e-12));
}

TEST_CASE("gap is tiny when every probability is tiny") {
    // The presence rows contribute n * log(m / (m - n)), about n^2 / m, so n
    // stays small here.
    const auto s = lattice_scheme(2, 1000000);
    const Eigen::Vector2d g(-0.5, 0.1);
    const Eigen::VectorXd eta = s.design * g;
    REQUIRE(sigmoid(eta.maxCoeff() - std::log(1e6 - 2.0)) <= 1e-6);
    CHECK(logistic_ppm_gap(s, g) < 1e-5);
}

TEST_CASE("gap halves as the number of points doubles") {
    const Eigen::Vector2d g(1.0, 0.7);
    std::vector<double> gaps;
    for (std::size_t m = 1000; m <= 16000; m *= 2) gaps.push_back(logistic_ppm_gap(lattice_scheme(20, m), g));
    for (std::size_t k = 1; k < gaps.size(); ++k) {
        const double slope = std::log2(gaps[k] / gaps[k - 1]);
        CHECK_THAT(slope, WithinAbs(-1.0, 0.2));
    }
}

TEST_CASE("gap needs an intercept column") {
    auto s = lattice_scheme(3, 10);
    s.design.col(0).setConstant(2.0);
    CHECK_THROWS_AS(logistic_ppm_gap(s, Eigen::Vector2d::Zero()), InputError);
}

TEST_CASE("equal weights only move the intercept") {
    Rng rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const double area = rng.uniform(0.5, 50.0);
        Eigen::MatrixXd x(30, 3);
        for (Eigen::Index i = 0; i < 30; ++i) {
            x(i, 0) = 1.0;
            x(i, 1) = rng.uniform(-1, 1);
            x(i, 2) = rng.uniform(-1, 1);
        }
        const auto s = make_scheme(x, Eigen::VectorXd::Constant(30, area / 30.0), 8, area);
        const auto report = check_weight_invariance(s);
        REQUIRE(report.weighted.converged);
        REQUIRE(report.unweighted.converged);
        CHECK(report.max_slope_rel_dev < 1e-8);
        CHECK(report.max_se_rel_dev < 1e-8);
        CHECK(report.intercept_dev < 1e-8);
    }
}

TEST_CASE("weights of one when the area equals the point count give identical fits") {
    auto s = lattice_scheme(6, 30);
    const auto report = check_weight_invariance(s);
    for (Eigen::Index j = 0; j < 2; ++j) {
        CHECK(report.weighted.beta[j] == report.unweighted.beta[j]);
        CHECK(report.weighted.se[j] == report.unweighted.se[j]);
    }
    CHECK(report.intercept_dev == 0.0);
}

TEST_CASE("unequal weights are rejected by the invariance check") {
    auto s = lattice_scheme(6, 30);
    s.weights[3] = 2.0;
    CHECK_THROWS_AS(check_weight_invariance(s), InputError);
}

TEST_CASE("grid-mode experiment converges toward the point-process fit") {
    const auto sc = two_covariate_scenario();
    const auto pres = scenario::simulate(sc, 11);
    ExperimentConfig cfg;
    // Fine enough that m is large against n at every step.
    cfg.spacings = {0.5, 0.25, 0.125, 0.0625};
    const auto trace = convergence_experiment(sc.region, sc.stack, sc.truth_spec, pres, cfg);
    REQUIRE(trace.rows.size() == 4);
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < trace.rows.size(); ++t) {
        const auto& r = trace.rows[t];
        REQUIRE(r.ppm_converged);
        REQUIRE(r.logit_converged);
        CHECK(r.note.empty());
        CHECK(r.resolution == cfg.spacings[t]);
        double diff = 0.0;
        for (Eigen::Index j = 1; j < 3; ++j)
            diff = std::max(diff, std::fabs(r.logit_gamma[j] - r.ppm_beta[j]) / std::fabs(r.ppm_beta[j]));
        CHECK(diff < previous);
        previous = diff;
        CHECK_THAT(r.logit_gamma0, WithinAbs(r.logit_gamma[0] + std::log(double(r.m - pres.size())), 1e-12));
        if (t > 0) {
            const auto& q = trace.rows[t - 1];
            CHECK(r.m > q.m);
            const double drift = r.logit_gamma[0] - q.logit_gamma[0];
            const double expected = -std::log(double(r.m) / double(q.m));
            CHECK_THAT(drift, WithinRel(expected, 0.1));
        }
    }
    CHECK(previous < 0.01);
}

TEST_CASE("random-mode logistic standard errors exceed the point-process ones") {
    const auto sc = two_covariate_scenario();
    const auto pres = scenario::simulate(sc, 12);
    ExperimentConfig cfg;
    cfg.mode = PseudoAbsenceMode::random;
    cfg.pseudo_absences = {500, 8000};
    cfg.replicates = 4;
    cfg.seed = 77;
    const auto trace = convergence_experiment(sc.region, sc.stack, sc.truth_spec, pres, cfg);
    REQUIRE(trace.rows.size() == 8);
    double inflation[2] = {0.0, 0.0};
    for (const auto& r : trace.rows) {
        REQUIRE(r.ppm_converged);
        REQUIRE(r.logit_converged);
        CHECK(r.m == pres.size() + cfg.pseudo_absences[r.step]);
        for (Eigen::Index j = 1; j < 3; ++j) inflation[r.step] += r.logit_se[j] / r.ppm_se[j] - 1.0;
    }
    CHECK(inflation[0] > 0.0);
    CHECK(inflation[1] > 0.0);
    CHECK(inflation[1] < inflation[0]);
    // Replicates of the same count see different pseudo-absences.
    CHECK(trace.rows[0].logit_gamma[1] != trace.rows[1].logit_gamma[1]);
}

TEST_CASE("experiment output does not depend on the thread count") {
    const auto sc = two_covariate_scenario();
    const auto pres = scenario::simulate(sc, 13);
    ExperimentConfig cfg;
    cfg.mode = PseudoAbsenceMode::random;
    cfg.pseudo_absences = {300, 600};
    cfg.replicates = 3;
    cfg.seed = 5;
    std::ostringstream one, four;
    write_experiment_csv(one, convergence_experiment(sc.region, sc.stack, sc.truth_spec, pres, cfg));
    cfg.threads = 4;
    write_experiment_csv(four, convergence_experiment(sc.region, sc.stack, sc.truth_spec, pres, cfg));
    CHECK(one.str() == four.str());
    CHECK_THAT(one.str(), ContainsSubstring("step,replicate,mode,resolution,m,ppm_(Intercept)"));
}

TEST_CASE("experiment configuration errors") {
    const auto sc = two_covariate_scenario();
    const auto pres = scenario::simulate(sc, 14);
    auto run = [&](const ExperimentConfig& c) {
        return convergence_experiment(sc.region, sc.stack, sc.truth_spec, pres, c);
    };
    ExperimentConfig cfg;
    CHECK_THROWS_AS(run(cfg), InputError);
    cfg.spacings = {1.0, 1.0};
    CHECK_THROWS_AS(run(cfg), InputError);
    cfg.spacings = {1.0, 2.0};
    CHECK_THROWS_AS(run(cfg), InputError);
    cfg.spacings = {1.0};
    CHECK_THROWS_AS(convergence_experiment(sc.region, sc.stack, sc.truth_spec, PointSet{}, cfg), InputError);

    ExperimentConfig rnd;
    rnd.mode = PseudoAbsenceMode::random;
    rnd.pseudo_absences = {0, 10};
    CHECK_THROWS_AS(run(rnd), InputError);
    rnd.pseudo_absences = {20, 10};
    CHECK_THROWS_AS(run(rnd), InputError);
    rnd.pseudo_absences = {10, 20};
    rnd.replicates = 0;
    CHECK_THROWS_AS(run(rnd), InputError);
}
