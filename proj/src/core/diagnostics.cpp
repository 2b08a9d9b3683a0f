#include "core/diagnostics.hpp"

#include "core/error.hpp"
#include "core/numeric.hpp"
#include "core/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace ppm {

namespace {

constexpr std::size_t kBucketThreshold = 5000;

void validate_inputs(const PointSet& points, std::span<const double> lambda,
                     std::span<const double> r_grid) {
    if (points.size() != lambda.size())
        throw InputError("intensity vector length does not match the point count");
    for (std::size_t i = 0; i < lambda.size(); ++i)
        if (!(lambda[i] > 0.0) || !std::isfinite(lambda[i]))
            throw InputError("intensity at point " + std::to_string(i) + " is not positive");
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        if (!(r_grid[i] >= 0.0) || !std::isfinite(r_grid[i]))
            throw InputError("distances must be finite and non-negative");
        if (i && r_grid[i] < r_grid[i - 1]) throw InputError("distances must be non-decreasing");
    }
}

double squared_distance(Point a, Point b) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

// Index of the first grid distance >= d, i.e. the first r whose ball holds d.
std::size_t first_bin(std::span<const double> r_grid, double d) {
    return static_cast<std::size_t>(std::lower_bound(r_grid.begin(), r_grid.end(), d) - r_grid.begin());
}

std::vector<double> finish(std::vector<double> bins, std::span<const double> r_grid, double area) {
    std::vector<double> k(r_grid.size(), 0.0);
    double running = 0.0;
    for (std::size_t b = 0; b < r_grid.size(); ++b) {
        running += bins[b];
        k[b] = r_grid[b] > 0.0 ? running / area : 0.0;
    }
    return k;
}

// Pairs i<j are visited in increasing j for each i, so both paths add the
// same contributions to each bin in the same order.
std::vector<double> k_bucketed(const PointSet& points, std::span<const double> lambda,
                               double area, std::span<const double> r_grid) {
    const double r_max = r_grid.back();
    const double reject = r_max * r_max * (1.0 + 1e-9);
    std::vector<double> bins(r_grid.size() + 1, 0.0);
    if (!(r_max > 0.0)) return finish(std::move(bins), r_grid, area);
    double x0 = points.front().x, y0 = points.front().y, x1 = x0, y1 = y0;
    for (const auto& p : points) {
        x0 = std::min(x0, p.x), y0 = std::min(y0, p.y);
        x1 = std::max(x1, p.x), y1 = std::max(y1, p.y);
    }
    // Buckets at least r_max wide, so every close pair is in adjacent buckets.
    const double side = std::max(r_max, std::max(x1 - x0, y1 - y0) / 1024.0);
    const auto nx = static_cast<std::size_t>(std::floor((x1 - x0) / side)) + 1;
    const auto ny = static_cast<std::size_t>(std::floor((y1 - y0) / side)) + 1;
    std::vector<std::vector<std::size_t>> buckets(nx * ny);
    auto bx = [&](double x) { return std::min(nx - 1, static_cast<std::size_t>((x - x0) / side)); };
    auto by = [&](double y) { return std::min(ny - 1, static_cast<std::size_t>((y - y0) / side)); };
    for (std::size_t i = 0; i < points.size(); ++i)
        buckets[by(points[i].y) * nx + bx(points[i].x)].push_back(i);

    std::vector<std::size_t> neighbours;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const std::size_t cx = bx(points[i].x), cy = by(points[i].y);
        neighbours.clear();
        for (std::size_t yy = cy ? cy - 1 : 0; yy <= std::min(ny - 1, cy + 1); ++yy)
            for (std::size_t xx = cx ? cx - 1 : 0; xx <= std::min(nx - 1, cx + 1); ++xx)
                for (std::size_t j : buckets[yy * nx + xx])
                    if (j > i) neighbours.push_back(j);
        std::sort(neighbours.begin(), neighbours.end());
        for (std::size_t j : neighbours) {
            // The margin leaves borderline pairs to the exact comparison.
            const double d2 = squared_distance(points[i], points[j]);
            if (d2 > reject) continue;
            const double d = std::sqrt(d2);
            if (d > r_max) continue;
            bins[first_bin(r_grid, d)] += 2.0 / (lambda[i] * lambda[j]);
        }
    }
    return finish(std::move(bins), r_grid, area);
}

}  // namespace

std::vector<double> make_r_grid(double r_max, std::size_t n) {
    if (n < 2) throw InputError("distance grid needs at least two values");
    if (!(r_max > 0.0)) throw InputError("maximum distance must be positive");
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i)
        r[i] = r_max * static_cast<double>(i) / static_cast<double>(n - 1);
    return r;
}

std::vector<double> k_inhom_naive(const PointSet& points, std::span<const double> lambda,
                                  double area, std::span<const double> r_grid) {
    validate_inputs(points, lambda, r_grid);
    std::vector<double> bins(r_grid.size() + 1, 0.0);
    if (r_grid.empty()) return {};
    const double r_max = r_grid.back();
    const double reject = r_max * r_max * (1.0 + 1e-9);
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            // The margin leaves borderline pairs to the exact comparison.
            const double d2 = squared_distance(points[i], points[j]);
            if (d2 > reject) continue;
            const double d = std::sqrt(d2);
            if (d > r_max) continue;
            bins[first_bin(r_grid, d)] += 2.0 / (lambda[i] * lambda[j]);
        }
    }
    return finish(std::move(bins), r_grid, area);
}

KFunctionResult k_inhom(const PointSet& points, std::span<const double> lambda,
                        const Region& region, std::span<const double> r_grid) {
    validate_inputs(points, lambda, r_grid);
    if (points.size() < 2) throw InputError("K-function needs at least two points");
    if (r_grid.empty()) throw InputError("distance grid is empty");
    const double limit = 0.25 * std::min(region.width(), region.height());
    if (r_grid.back() > limit)
        throw InputError("maximum distance " + format_double(r_grid.back()) +
                         " exceeds a quarter of the shorter region side (" + format_double(limit) + ")");
    KFunctionResult out;
    out.r.assign(r_grid.begin(), r_grid.end());
    out.k_hat = points.size() > kBucketThreshold
                    ? k_bucketed(points, lambda, region.area(), r_grid)
                    : k_inhom_naive(points, lambda, region.area(), r_grid);
    for (double r : out.r) out.theoretical.push_back(std::numbers::pi * r * r);
    return out;
}

std::pair<std::size_t, std::size_t> envelope_ranks(std::size_t n_sim, double level) {
    if (!(level > 0.0 && level < 1.0)) throw InputError("envelope level must lie in (0, 1)");
    const double alpha = 1.0 - level;
    const double tail = alpha / 2.0 * static_cast<double>(n_sim + 1);
    // The small slack absorbs rounding in 1 - level.
    const auto lo = static_cast<std::size_t>(std::ceil(tail - 1e-9));
    if (tail < 1.0 - 1e-9)
        throw InputError("n_sim = " + std::to_string(n_sim) + " is too small for a " +
                         format_double(level) + " pointwise envelope");
    return {lo, n_sim + 1 - lo};
}

KFunctionResult k_envelope(const IntensitySurface& fitted, const Region& region,
                           const PointSet& data, std::span<const double> r_grid,
                           const EnvelopeOptions& options) {
    const auto [lo_rank, hi_rank] = envelope_ranks(options.n_sim, options.level);

    auto lambda_at = [&](const PointSet& pts) {
        std::vector<double> lambda(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) lambda[i] = fitted.at(pts[i]);
        return lambda;
    };
    const auto data_lambda = lambda_at(data);
    KFunctionResult out = k_inhom(data, data_lambda, region, r_grid);
    out.n_sim = options.n_sim;
    out.level = options.level;

    std::vector<std::vector<double>> curves(options.n_sim);
    parallel_for(options.n_sim, options.threads, [&](std::size_t i) {
        const PointSet sim = simulate_poisson(fitted, region, replicate_seed(options.seed, i));
        if (sim.size() < 2) {
            curves[i].assign(r_grid.size(), 0.0);
            return;
        }
        curves[i] = k_inhom(sim, lambda_at(sim), region, r_grid).k_hat;
    });

    out.lo.resize(r_grid.size());
    out.hi.resize(r_grid.size());
    std::vector<double> column(options.n_sim);
    for (std::size_t b = 0; b < r_grid.size(); ++b) {
        for (std::size_t i = 0; i < options.n_sim; ++i) column[i] = curves[i][b];
        std::sort(column.begin(), column.end());
        out.lo[b] = column[lo_rank - 1];
        out.hi[b] = column[hi_rank - 1];
    }
    return out;
}

void write_kfunction_csv(std::ostream& out, const KFunctionResult& k) {
    out << "r,k_hat,theoretical,lo,hi\n";
    for (std::size_t i = 0; i < k.r.size(); ++i) {
        out << format_double(k.r[i]) << ',' << format_double(k.k_hat[i]) << ','
            << format_double(k.theoretical[i]) << ',';
        if (k.lo.empty())
            out << ",\n";
        else
            out << format_double(k.lo[i]) << ',' << format_double(k.hi[i]) << '\n';
    }
}

}  // namespace ppm
