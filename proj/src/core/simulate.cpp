#include "core/simulate.hpp"

#include "core/error.hpp"
#include "core/ppm_core.hpp"

#include <cmath>

namespace ppm {

IntensitySurface::IntensitySurface(RasterGrid lambda) : lambda_(std::move(lambda)) {
    for (std::size_t r = 0; r < lambda_.n_rows(); ++r) {
        for (std::size_t c = 0; c < lambda_.n_cols(); ++c) {
            if (lambda_.is_nodata(r, c)) continue;
            const double v = lambda_.at(r, c);
            if (v < 0.0)
                throw InputError("intensity raster has a negative value at row " + std::to_string(r) +
                                 ", column " + std::to_string(c));
            max_ = std::max(max_, v);
        }
    }
    if (!std::isfinite(max_)) throw InputError("intensity raster maximum is not finite");
}

IntensitySurface IntensitySurface::from_fit(const Eigen::VectorXd& beta, const ModelSpec& spec,
                                            const CovariateStack& stack, const Region& region) {
    return IntensitySurface(predict_intensity(beta, spec, stack, &region));
}

double IntensitySurface::at(Point p) const {
    const auto v = lambda_.sample(p);
    return v ? *v : 0.0;
}

PointSet sample_uniform_points(const Region& region, std::size_t count, Rng& rng) {
    std::vector<std::size_t> cells;
    cells.reserve(region.active_cells());
    const auto mask = region.mask();
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) cells.push_back(i);
    PointSet out;
    out.reserve(count);
    const double c = region.cell_size();
    for (std::size_t k = 0; k < count; ++k) {
        for (;;) {
            const std::size_t cell = cells[rng.below(cells.size())];
            const std::size_t row = cell / region.n_cols();
            const std::size_t col = cell % region.n_cols();
            const Point p{region.x_min() + (static_cast<double>(col) + rng.uniform()) * c,
                          region.y_min() + (static_cast<double>(row) + rng.uniform()) * c};
            // Rounding can push a draw onto the neighbouring cell's edge.
            if (region.contains(p)) {
                out.push_back(p);
                break;
            }
        }
    }
    return out;
}

PointSet simulate_poisson(const IntensitySurface& surface, const Region& region,
                          std::uint64_t seed) {
    PointSet out;
    const double lambda_max = surface.max();
    if (!(lambda_max > 0.0)) return out;
    Rng rng(seed);
    const std::uint64_t n = rng.poisson(lambda_max * region.area());
    const PointSet candidates = sample_uniform_points(region, n, rng);
    for (const auto& p : candidates) {
        const double keep = surface.at(p) / lambda_max;
        // Draw for every candidate so the stream does not depend on lambda.
        const double u = rng.uniform();
        if (u < keep) out.push_back(p);
    }
    return out;
}

}  // namespace ppm
