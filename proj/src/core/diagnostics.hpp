#pragma once

#include "core/region_grid.hpp"
#include "core/simulate.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace ppm {

struct KFunctionResult {
    std::vector<double> r;
    std::vector<double> k_hat;
    /// pi r^2.
    std::vector<double> theoretical;
    /// Pointwise envelope; empty when no simulations were run.
    std::vector<double> lo;
    std::vector<double> hi;
    std::size_t n_sim = 0;
    double level = 0.0;
};

/// n evenly spaced distances from 0 to r_max inclusive.
std::vector<double> make_r_grid(double r_max, std::size_t n);

/// Plug-in inhomogeneous K-function without edge correction:
/// K(r) = (1/|A|) sum_{i != j} 1{d_ij <= r} / (lambda_i lambda_j) for r > 0,
/// and K(0) = 0. r_grid must be non-decreasing, non-negative and no larger
/// than a quarter of the shorter region side.
KFunctionResult k_inhom(const PointSet& points, std::span<const double> lambda,
                        const Region& region, std::span<const double> r_grid);

/// Same estimator from the naive O(n^2) double loop; used to cross-check
/// the bucketed path taken for large patterns.
std::vector<double> k_inhom_naive(const PointSet& points, std::span<const double> lambda,
                                  double area, std::span<const double> r_grid);

/// One-based ranks (lo, hi) of the order statistics bounding a pointwise
/// envelope: lo = ceil(alpha/2 * (n_sim + 1)), hi = n_sim + 1 - lo. Requires
/// alpha/2 * (n_sim + 1) >= 1, e.g. n_sim >= 39 at level 0.95.
std::pair<std::size_t, std::size_t> envelope_ranks(std::size_t n_sim, double level);

struct EnvelopeOptions {
    std::size_t n_sim = 99;
    double level = 0.95;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

/// K-function of `data` with pointwise simulation envelope from `fitted`.
/// Simulated pattern i uses seed + i and is evaluated with the fitted
/// intensity at its points; patterns with fewer than two points count as
/// an all-zero curve.
KFunctionResult k_envelope(const IntensitySurface& fitted, const Region& region,
                           const PointSet& data, std::span<const double> r_grid,
                           const EnvelopeOptions& options);

void write_kfunction_csv(std::ostream& out, const KFunctionResult& k);

}  // namespace ppm
