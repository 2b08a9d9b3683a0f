#include "core/diagnostics.hpp"
#include "core/error.hpp"
#include "core/random.hpp"
#include "core/simulate.hpp"
#include "support/oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

using namespace ppm;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// (1/|A|) sum over ordered pairs i != j with d_ij <= r of 1/(lambda_i lambda_j).
std::vector<double> pair_count_oracle(const PointSet& pts, const std::vector<double>& lambda,
                                      double area, const std::vector<double>& r) {
    std::vector<double> k(r.size(), 0.0);
    for (std::size_t b = 0; b < r.size(); ++b) {
        if (r[b] == 0.0) continue;
        long double s = 0.0L;
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = 0; j < pts.size(); ++j) {
                if (i == j) continue;
                const double d = std::sqrt((pts[i].x - pts[j].x) * (pts[i].x - pts[j].x) +
                                           (pts[i].y - pts[j].y) * (pts[i].y - pts[j].y));
                if (d <= r[b]) s += 1.0L / ((long double)lambda[i] * lambda[j]);
            }
        k[b] = static_cast<double>(s / area);
    }
    return k;
}

// Expected uncorrected K of a homogeneous process on a W x H rectangle:
// the disc integral of the set covariance (W - |u|)(H - |v|), divided by
// (W H)^2 and multiplied by |A|. Midpoint rule in polar coordinates.
double expected_uncorrected_k(double w, double h, double r) {
    const int nr = 400, nt = 800;
    double s = 0.0;
    for (int a = 0; a < nr; ++a) {
        const double rho = (a + 0.5) * r / nr;
        for (int b = 0; b < nt; ++b) {
            const double t = (b + 0.5) * 2.0 * std::numbers::pi / nt;
            s += (w - std::fabs(rho * std::cos(t))) * (h - std::fabs(rho * std::sin(t))) * rho;
        }
    }
    s *= (r / nr) * (2.0 * std::numbers::pi / nt);
    return s / (w * h);
}

PointSet uniform_points(Rng& rng, std::size_t n, double w, double h) {
    PointSet p(n);
    for (auto& q : p) q = {rng.uniform(0, w), rng.uniform(0, h)};
    return p;
}

}  // namespace

TEST_CASE("two points at distance five") {
    const PointSet pts{{1.0, 1.0}, {4.0, 5.0}};
    const std::vector<double> lambda{1.0, 1.0};
    const std::vector<double> r{0.0, 1.0, 4.999, 5.0, 5.5, 8.0};
    const auto k = k_inhom_naive(pts, lambda, 100.0, r);
    const std::vector<double> expected{0.0, 0.0, 0.0, 0.02, 0.02, 0.02};
    for (std::size_t b = 0; b < r.size(); ++b) CHECK(k[b] == expected[b]);

    // The same pair on a region large enough for r = 5 under the quarter cap.
    const auto region = Region::rectangle(0, 0, 40, 40, 1.0);
    const auto full = k_inhom(pts, lambda, region, r);
    for (std::size_t b = 0; b < r.size(); ++b) CHECK(full.k_hat[b] == expected[b] * 100.0 / 1600.0);
    for (std::size_t b = 0; b < r.size(); ++b)
        CHECK_THAT(full.theoretical[b], WithinRel(std::numbers::pi * r[b] * r[b], 1e-15));
}

TEST_CASE("K is zero at r = 0 even for coincident points") {
    const PointSet pts{{2.0, 2.0}, {2.0, 2.0}, {3.0, 3.0}};
    const std::vector<double> lambda{1.0, 2.0, 3.0};
    const std::vector<double> r{0.0, 0.5, 2.0};
    const auto k = k_inhom(pts, lambda, Region::rectangle(0, 0, 10, 10, 1.0), r);
    CHECK(k.k_hat[0] == 0.0);
    CHECK_THAT(k.k_hat[1], WithinRel(2.0 / 2.0 / 100.0, 1e-15));
}

TEST_CASE("estimator matches brute-force pair counting") {
    Rng rng(4);
    const auto region = Region::rectangle(0, 0, 30, 20, 1.0);
    const auto r = make_r_grid(5.0, 26);
    for (int trial = 0; trial < 10; ++trial) {
        auto pts = uniform_points(rng, 150, 30, 20);
        // A pair exactly one apart lands on a grid distance.
        pts.push_back({10.0, 10.0});
        pts.push_back({10.0, 11.0});
        std::vector<double> lambda(pts.size());
        for (auto& l : lambda) l = rng.uniform(0.1, 3.0);
        const auto k = k_inhom(pts, lambda, region, r);
        const auto oracle_k = pair_count_oracle(pts, lambda, region.area(), r);
        for (std::size_t b = 0; b < r.size(); ++b) CHECK_THAT(k.k_hat[b], WithinRel(oracle_k[b], 1e-12));
    }
}

TEST_CASE("K is non-decreasing and invariant to relabelling") {
    Rng rng(8);
    const auto region = Region::rectangle(0, 0, 40, 40, 1.0);
    const auto r = make_r_grid(10.0, 41);
    for (int trial = 0; trial < 25; ++trial) {
        const auto n = 2 + rng.below(300);
        auto pts = uniform_points(rng, n, 40, 40);
        std::vector<double> lambda(n);
        for (auto& l : lambda) l = rng.uniform(0.05, 2.0);
        const auto k = k_inhom(pts, lambda, region, r);
        CHECK(k.k_hat[0] == 0.0);
        for (std::size_t b = 1; b < r.size(); ++b) CHECK(k.k_hat[b] >= k.k_hat[b - 1]);

        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
        PointSet p2(n);
        std::vector<double> l2(n);
        for (std::size_t i = 0; i < n; ++i) {
            p2[i] = pts[perm[i]];
            l2[i] = lambda[perm[i]];
        }
        const auto k2 = k_inhom(p2, l2, region, r);
        for (std::size_t b = 0; b < r.size(); ++b) CHECK_THAT(k2.k_hat[b], WithinRel(k.k_hat[b], 1e-12));
    }
}

TEST_CASE("bucketed path for large patterns equals the naive loop") {
    Rng rng(15);
    const auto region = Region::rectangle(0, 0, 100, 60, 1.0);
    const auto pts = uniform_points(rng, 6500, 100, 60);
    std::vector<double> lambda(pts.size());
    for (auto& l : lambda) l = rng.uniform(0.5, 1.5);
    const auto r = make_r_grid(15.0, 31);
    const auto fast = k_inhom(pts, lambda, region, r);
    const auto naive = k_inhom_naive(pts, lambda, region.area(), r);
    for (std::size_t b = 0; b < r.size(); ++b) CHECK(fast.k_hat[b] == naive[b]);
}

TEST_CASE("homogeneous patterns average the uncorrected expectation") {
    // lambda = 2 on 50 x 50; without edge correction the mean falls below
    // pi r^2 by the border loss.
    const auto region = Region::rectangle(0, 0, 50, 50, 1.0);
    const IntensitySurface surface(RasterGrid::filled(GridHeader{50, 50, 0, 0, 1.0, -9999.0}, 2.0));
    const std::vector<double> r{2.5, 5.0, 7.5, 10.0, 12.5};
    const std::size_t reps = 500;
    std::vector<double> sum(r.size(), 0.0), sum2(r.size(), 0.0);
    for (std::size_t s = 0; s < reps; ++s) {
        const auto pts = simulate_poisson(surface, region, 700 + s);
        const std::vector<double> lambda(pts.size(), 2.0);
        const auto k = k_inhom(pts, lambda, region, r);
        for (std::size_t b = 0; b < r.size(); ++b) {
            sum[b] += k.k_hat[b];
            sum2[b] += k.k_hat[b] * k.k_hat[b];
        }
    }
    for (std::size_t b = 0; b < r.size(); ++b) {
        const double mean = sum[b] / reps;
        const double se = std::sqrt((sum2[b] / reps - mean * mean) / (reps - 1));
        const double oracle_k = expected_uncorrected_k(50.0, 50.0, r[b]);
        INFO("r " << r[b] << " mean " << mean << " oracle " << oracle_k << " se " << se);
        CHECK(std::fabs(mean - oracle_k) < 3.0 * se);
        CHECK(oracle_k < std::numbers::pi * r[b] * r[b]);
    }
    // At the largest distance the border loss is far outside Monte-Carlo noise.
    CHECK(sum.back() / reps < std::numbers::pi * 12.5 * 12.5 * 0.9);
}

TEST_CASE("envelope rank arithmetic") {
    CHECK(envelope_ranks(99, 0.95) == std::pair<std::size_t, std::size_t>{3, 97});
    CHECK(envelope_ranks(500, 0.95) == std::pair<std::size_t, std::size_t>{13, 488});
    CHECK(envelope_ranks(39, 0.95) == std::pair<std::size_t, std::size_t>{1, 39});
    CHECK(envelope_ranks(19, 0.90) == std::pair<std::size_t, std::size_t>{1, 19});
    CHECK(envelope_ranks(199, 0.99) == std::pair<std::size_t, std::size_t>{1, 199});
    CHECK_THROWS_AS(envelope_ranks(38, 0.95), InputError);
    CHECK_THROWS_AS(envelope_ranks(99, 1.0), InputError);
    CHECK_THROWS_AS(envelope_ranks(99, 0.0), InputError);
}

TEST_CASE("input validation") {
    const auto region = Region::rectangle(0, 0, 20, 20, 1.0);
    const PointSet pts{{1, 1}, {2, 2}, {3, 3}};
    const std::vector<double> r{0.0, 1.0, 2.0};
    CHECK_THROWS_AS(k_inhom(pts, std::vector<double>{1, 0, 1}, region, r), InputError);
    CHECK_THROWS_AS(k_inhom(pts, std::vector<double>{1, -1, 1}, region, r), InputError);
    CHECK_THROWS_AS(k_inhom(pts, std::vector<double>{1, 1}, region, r), InputError);
    CHECK_THROWS_AS(k_inhom(PointSet{{1, 1}}, std::vector<double>{1}, region, r), InputError);
    CHECK_THROWS_AS(k_inhom(pts, std::vector<double>{1, 1, 1}, region, std::vector<double>{1.0, 0.5}),
                    InputError);
    CHECK_THROWS_AS(k_inhom(pts, std::vector<double>{1, 1, 1}, region, std::vector<double>{}), InputError);
    CHECK_THROWS_WITH(k_inhom(pts, std::vector<double>{1, 1, 1}, region, std::vector<double>{0.0, 5.5}),
                      ContainsSubstring("quarter"));
    CHECK_NOTHROW(k_inhom(pts, std::vector<double>{1, 1, 1}, region, std::vector<double>{0.0, 5.0}));
    CHECK_THROWS_AS(make_r_grid(5.0, 1), InputError);
    CHECK_THROWS_AS(make_r_grid(0.0, 10), InputError);
    const auto g = make_r_grid(2.0, 5);
    CHECK(g == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
}

TEST_CASE("data from the fitted surface sits inside its envelope") {
    const GridHeader h{40, 40, 0, 0, 1.0, -9999.0};
    const IntensitySurface surface(oracle::raster_from(h, [](double x, double y) {
        return 0.05 + 0.3 * std::exp(-((x - 15) * (x - 15) + (y - 25) * (y - 25)) / 150.0);
    }));
    const auto region = Region::rectangle(0, 0, 40, 40, 1.0);
    const auto data = simulate_poisson(surface, region, 2024);
    const auto r = make_r_grid(10.0, 21);
    EnvelopeOptions opt;
    opt.seed = 9;
    const auto k = k_envelope(surface, region, data, r, opt);
    REQUIRE(k.lo.size() == r.size());
    std::size_t inside = 0;
    for (std::size_t b = 0; b < r.size(); ++b) {
        CHECK(k.lo[b] <= k.hi[b]);
        if (k.k_hat[b] >= k.lo[b] && k.k_hat[b] <= k.hi[b]) ++inside;
    }
    CHECK(inside >= 19);
    CHECK(k.n_sim == 99);
    CHECK(k.level == 0.95);
}

TEST_CASE("envelope bounds are the rank order statistics of the simulated curves") {
    const auto region = Region::rectangle(0, 0, 20, 20, 1.0);
    const IntensitySurface surface(RasterGrid::filled(GridHeader{20, 20, 0, 0, 1.0, -9999.0}, 0.3));
    const auto data = simulate_poisson(surface, region, 1);
    const std::vector<double> r{0.0, 1.0, 2.5, 5.0};
    EnvelopeOptions opt;
    opt.n_sim = 39;
    opt.seed = 100;
    const auto env = k_envelope(surface, region, data, r, opt);
    for (std::size_t b = 0; b < r.size(); ++b) {
        std::vector<double> column;
        for (std::uint64_t i = 0; i < 39; ++i) {
            const auto sim = simulate_poisson(surface, region, 100 + i);
            const std::vector<double> lambda(sim.size(), 0.3);
            column.push_back(pair_count_oracle(sim, lambda, 400.0, r)[b]);
        }
        std::sort(column.begin(), column.end());
        CHECK_THAT(env.lo[b], WithinAbs(column.front(), 1e-12 * (1.0 + column.front())));
        CHECK_THAT(env.hi[b], WithinAbs(column.back(), 1e-12 * (1.0 + column.back())));
    }
}

TEST_CASE("near-empty simulated patterns count as zero curves") {
    const auto region = Region::rectangle(0, 0, 20, 20, 1.0);
    // Expected count 0.4: most simulations have fewer than two points.
    const IntensitySurface surface(RasterGrid::filled(GridHeader{20, 20, 0, 0, 1.0, -9999.0}, 0.001));
    const PointSet data{{5, 5}, {6, 5}};
    EnvelopeOptions opt;
    opt.seed = 3;
    const auto env = k_envelope(surface, region, data, std::vector<double>{0.0, 2.0, 5.0}, opt);
    for (std::size_t b = 0; b < 3; ++b) CHECK(env.lo[b] == 0.0);
}

TEST_CASE("tightly clustered data leaves the flat-model envelope at small r") {
    Rng rng(77);
    const auto region = Region::rectangle(0, 0, 40, 40, 1.0);
    PointSet data;
    for (const Point c : {Point{10.0, 10.0}, Point{28.0, 30.0}})
        for (int i = 0; i < 60; ++i) data.push_back({c.x + rng.uniform(-1, 1), c.y + rng.uniform(-1, 1)});
    const double flat = static_cast<double>(data.size()) / region.area();
    const IntensitySurface surface(RasterGrid::filled(GridHeader{40, 40, 0, 0, 1.0, -9999.0}, flat));
    const auto r = make_r_grid(10.0, 21);
    EnvelopeOptions opt;
    opt.seed = 12;
    const auto k = k_envelope(surface, region, data, r, opt);
    for (std::size_t b = 1; b <= 6; ++b) CHECK(k.k_hat[b] > k.hi[b]);
}

TEST_CASE("envelopes do not depend on the thread count and write a CSV") {
    const auto region = Region::rectangle(0, 0, 30, 30, 1.0);
    const IntensitySurface surface(RasterGrid::filled(GridHeader{30, 30, 0, 0, 1.0, -9999.0}, 0.2));
    const auto data = simulate_poisson(surface, region, 5);
    const auto r = make_r_grid(7.5, 16);
    EnvelopeOptions opt;
    opt.seed = 42;
    std::ostringstream a, b;
    write_kfunction_csv(a, k_envelope(surface, region, data, r, opt));
    opt.threads = 4;
    write_kfunction_csv(b, k_envelope(surface, region, data, r, opt));
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("r,k_hat,theoretical,lo,hi\n0,0,0,0,0\n", 0) == 0);

    std::ostringstream plain;
    write_kfunction_csv(plain, k_inhom(data, std::vector<double>(data.size(), 0.2), region, r));
    CHECK_THAT(plain.str(), ContainsSubstring("\n0,0,0,,\n"));
}
