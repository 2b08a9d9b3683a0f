#include "core/error.hpp"
#include "core/ppm_core.hpp"
#include "core/random.hpp"
#include "core/simulate.hpp"
#include "support/oracles.hpp"
#include "support/scenario.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

using namespace ppm;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Upper chi-square quantile by the Wilson-Hilferty cube approximation;
// z is the matching standard normal quantile.
double chi2_quantile(double df, double z) {
    const double a = 2.0 / (9.0 * df);
    return df * std::pow(1.0 - a + z * std::sqrt(a), 3.0);
}
constexpr double z_999 = 3.090232;

double poisson_pmf(double mean, std::uint64_t k) {
    return std::exp(-mean + static_cast<double>(k) * std::log(mean) - std::lgamma(static_cast<double>(k) + 1.0));
}

IntensitySurface constant_surface(std::size_t cols, std::size_t rows, double value) {
    return IntensitySurface(RasterGrid::filled(GridHeader{cols, rows, 0.0, 0.0, 1.0, -9999.0}, value));
}

}  // namespace

TEST_CASE("homogeneous process has the Poisson mean count") {
    const auto region = Region::rectangle(0, 0, 10, 10, 1.0);
    const auto surface = constant_surface(10, 10, 5.0);
    double total = 0.0;
    for (std::uint64_t s = 0; s < 200; ++s) total += static_cast<double>(simulate_poisson(surface, region, s).size());
    CHECK_THAT(total / 200.0, WithinAbs(500.0, 3.0 * std::sqrt(500.0 / 200.0)));
}

TEST_CASE("zero intensity gives empty patterns") {
    const auto region = Region::rectangle(0, 0, 10, 10, 1.0);
    const auto surface = constant_surface(10, 10, 0.0);
    CHECK(surface.max() == 0.0);
    for (std::uint64_t s = 0; s < 20; ++s) CHECK(simulate_poisson(surface, region, s).empty());
}

TEST_CASE("two-level surface splits counts one to nine") {
    // Left half intensity 1, right half 9, each half of area 50.
    const GridHeader h{10, 10, 0.0, 0.0, 1.0, -9999.0};
    const IntensitySurface surface(oracle::raster_from(h, [](double x, double) { return x < 5 ? 1.0 : 9.0; }));
    const auto region = Region::rectangle(0, 0, 10, 10, 1.0);
    double left = 0.0, right = 0.0;
    for (std::uint64_t s = 0; s < 500; ++s)
        for (const auto& p : simulate_poisson(surface, region, 1000 + s)) (p.x < 5 ? left : right) += 1.0;
    const double total = left + right;
    const double chi2 = std::pow(left - 0.1 * total, 2) / (0.1 * total) +
                        std::pow(right - 0.9 * total, 2) / (0.9 * total);
    CHECK(chi2 < 6.635);
    CHECK_THAT(total / 500.0, WithinAbs(500.0, 3.0 * std::sqrt(500.0 / 500.0)));
}

TEST_CASE("inhomogeneous counts average the integrated intensity") {
    const auto sc = scenario::make(24, 16, 1.0, 2, ModelSpec::linear({"x1", "x2"}), {1.0, -0.7}, 150.0);
    const double expected = scenario::expected_count(sc);
    REQUIRE_THAT(expected, WithinRel(150.0, 1e-12));
    double total = 0.0;
    for (std::uint64_t s = 0; s < 300; ++s) total += static_cast<double>(scenario::simulate(sc, s).size());
    CHECK_THAT(total / 300.0, WithinAbs(expected, 3.0 * std::sqrt(expected / 300.0)));
}

TEST_CASE("simulation is deterministic in the seed") {
    const auto sc = scenario::make(20, 20, 0.5, 1, ModelSpec::linear({"x1"}), {1.5}, 80.0);
    const auto a = scenario::simulate(sc, 99);
    const auto b = scenario::simulate(sc, 99);
    const auto c = scenario::simulate(sc, 100);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].x == b[i].x);
        CHECK(a[i].y == b[i].y);
    }
    CHECK((a.size() != c.size() || a.front().x != c.front().x));
}

TEST_CASE("retained and uniform points lie in true mask cells") {
    const auto checker = read_ascii_grid(std::string(PPM_DEMO_DIR) + "/checker.asc");
    const auto region = region_from_raster(checker);
    const GridHeader h = checker.header();
    const IntensitySurface surface(oracle::raster_from(h, [](double x, double y) { return 1.0 + x + 0.5 * y; }));
    for (std::uint64_t s = 0; s < 20; ++s)
        for (const auto& p : simulate_poisson(surface, region, s)) REQUIRE(region.contains(p));

    Rng rng(3);
    const auto pts = sample_uniform_points(region, 78 * 200, rng);
    std::map<std::size_t, double> per_cell;
    for (const auto& p : pts) {
        REQUIRE(region.contains(p));
        const auto cell = *region.cell_of(p);
        per_cell[cell.row * region.n_cols() + cell.col] += 1.0;
    }
    REQUIRE(per_cell.size() == 78);
    double chi2 = 0.0;
    for (const auto& [cell, count] : per_cell) chi2 += std::pow(count - 200.0, 2) / 200.0;
    CHECK(chi2 < chi2_quantile(77, z_999));
}

TEST_CASE("intensity surface lookups and validation") {
    const GridHeader h{4, 3, 10.0, 20.0, 2.0, -9999.0};
    auto grid = oracle::raster_from(h, [](double x, double y) { return x + y; });
    grid.set(0, 0, h.nodata);
    const IntensitySurface surface(grid);
    CHECK(surface.max() == grid.at(2, 3));
    CHECK(surface.at({100.0, 100.0}) == 0.0);
    const auto nodata_center = grid.cell_center(0, 0);
    CHECK(surface.at(nodata_center) == 0.0);
    const auto p = grid.cell_center(1, 2);
    CHECK(surface.at(p) == grid.at(1, 2));

    grid.set(1, 1, -0.5);
    CHECK_THROWS_AS(IntensitySurface(grid), InputError);
}

TEST_CASE("surface from a fit equals the prediction restricted to the region") {
    const auto sc = scenario::make(12, 8, 1.0, 2, ModelSpec::linear({"x1", "x2"}), {0.4, 0.9}, 50.0);
    std::vector<std::uint8_t> mask(96, 1);
    mask[5] = mask[40] = 0;
    const Region region(0, 0, 12, 8, 1.0, mask);
    const auto surface = IntensitySurface::from_fit(sc.truth, sc.truth_spec, sc.stack, region);
    const auto pred = predict_intensity(sc.truth, sc.truth_spec, sc.stack, &region);
    for (std::size_t r = 0; r < 8; ++r)
        for (std::size_t c = 0; c < 12; ++c) {
            CHECK(surface.raster().is_nodata(r, c) == pred.is_nodata(r, c));
            if (!pred.is_nodata(r, c)) CHECK(surface.raster().at(r, c) == pred.at(r, c));
        }
}

TEST_CASE("engine output follows the standard mt19937_64 sequence") {
    // The standard fixes the 10000th output of a default-constructed engine.
    Rng rng(5489u);
    std::uint64_t v = 0;
    for (int i = 0; i < 10000; ++i) v = rng.next();
    CHECK(v == 9981545732273789042ull);
}

TEST_CASE("uniform and bounded integer variates") {
    Rng rng(17);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    CHECK(lo >= 0.0);
    CHECK(hi < 1.0);
    CHECK_THAT(sum / 1e5, WithinAbs(0.5, 3.0 * std::sqrt(1.0 / 12.0 / 1e5)));

    for (int i = 0; i < 100; ++i) CHECK(rng.below(1) == 0);
    std::vector<double> counts(7, 0.0);
    for (int i = 0; i < 70000; ++i) counts[rng.below(7)] += 1.0;
    double chi2 = 0.0;
    for (double c : counts) chi2 += std::pow(c - 10000.0, 2) / 10000.0;
    CHECK(chi2 < chi2_quantile(6, z_999));
}

TEST_CASE("Poisson variates match the Poisson distribution on both branches") {
    Rng rng(23);
    CHECK(rng.poisson(0.0) == 0);
    CHECK(rng.poisson(-1.0) == 0);
    for (const double mean : {0.5, 3.0, 9.9, 10.0, 25.0, 400.0}) {
        const int draws = 40000;
        std::map<std::uint64_t, double> hist;
        double s = 0.0, s2 = 0.0;
        for (int i = 0; i < draws; ++i) {
            const auto k = rng.poisson(mean);
            hist[k] += 1.0;
            s += static_cast<double>(k);
            s2 += static_cast<double>(k) * static_cast<double>(k);
        }
        const double m = s / draws;
        const double var = s2 / draws - m * m;
        CHECK_THAT(m, WithinAbs(mean, 4.0 * std::sqrt(mean / draws)));
        CHECK_THAT(var, WithinRel(mean, 0.05));

        // Pool the tails so every bin expects at least 20 draws.
        double chi2 = 0.0, pooled_obs = 0.0, pooled_exp = 0.0;
        int bins = 0;
        const auto top = static_cast<std::uint64_t>(mean + 10.0 * std::sqrt(mean) + 10.0);
        for (std::uint64_t k = 0; k <= top; ++k) {
            pooled_obs += hist.count(k) ? hist[k] : 0.0;
            pooled_exp += draws * poisson_pmf(mean, k);
            if (pooled_exp >= 20.0) {
                chi2 += std::pow(pooled_obs - pooled_exp, 2) / pooled_exp;
                pooled_obs = pooled_exp = 0.0;
                ++bins;
            }
        }
        INFO("mean " << mean << " chi2 " << chi2 << " bins " << bins);
        CHECK(chi2 < chi2_quantile(bins - 1, z_999));
    }
}
