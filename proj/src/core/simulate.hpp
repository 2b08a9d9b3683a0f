#pragma once

#include "core/covariates.hpp"
#include "core/random.hpp"
#include "core/region_grid.hpp"

#include <Eigen/Dense>

#include <cstdint>

namespace ppm {

/// Piecewise-constant intensity on a raster lattice; nodata cells and
/// locations outside the raster have intensity zero.
class IntensitySurface {
public:
    explicit IntensitySurface(RasterGrid lambda);

    /// exp(x^T beta) evaluated on the stack lattice, restricted to `region`.
    static IntensitySurface from_fit(const Eigen::VectorXd& beta, const ModelSpec& spec,
                                     const CovariateStack& stack, const Region& region);

    double at(Point p) const;
    double max() const { return max_; }
    const RasterGrid& raster() const { return lambda_; }

private:
    RasterGrid lambda_;
    double max_ = 0.0;
};

/// `count` points uniform over the true mask cells: a cell is chosen
/// uniformly among active cells, then a location uniformly within it.
PointSet sample_uniform_points(const Region& region, std::size_t count, Rng& rng);

/// Inhomogeneous Poisson process by thinning: N ~ Poisson(max * |A|)
/// uniform candidates over the mask, each kept with probability
/// lambda(cell) / max. Deterministic for a given seed.
PointSet simulate_poisson(const IntensitySurface& surface, const Region& region,
                          std::uint64_t seed);

}  // namespace ppm
