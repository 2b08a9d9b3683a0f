#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ppm {

struct Point {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

using PointSet = std::vector<Point>;

/// Row/column of a lattice cell. Row 0 is the southernmost row.
struct CellIndex {
    std::size_t row = 0;
    std::size_t col = 0;
};

/// Rectangular window with a boolean inclusion mask.
///
/// Cells are half-open: cell (row, col) covers
/// [x_min + col*c, x_min + (col+1)*c) x [y_min + row*c, y_min + (row+1)*c),
/// so a point on a shared edge belongs to the cell above/right of it.
class Region {
public:
    /// `mask` is row-major with row 0 southernmost; nonzero = inside.
    Region(double x_min, double y_min, std::size_t n_cols, std::size_t n_rows,
           double cell_size, std::vector<std::uint8_t> mask);

    /// Region whose mask is all true.
    static Region rectangle(double x_min, double y_min, std::size_t n_cols,
                            std::size_t n_rows, double cell_size);

    double x_min() const { return x_min_; }
    double y_min() const { return y_min_; }
    double x_max() const { return x_min_ + static_cast<double>(n_cols_) * cell_size_; }
    double y_max() const { return y_min_ + static_cast<double>(n_rows_) * cell_size_; }
    double width() const { return static_cast<double>(n_cols_) * cell_size_; }
    double height() const { return static_cast<double>(n_rows_) * cell_size_; }
    std::size_t n_cols() const { return n_cols_; }
    std::size_t n_rows() const { return n_rows_; }
    double cell_size() const { return cell_size_; }
    std::span<const std::uint8_t> mask() const { return mask_; }
    std::size_t active_cells() const { return active_cells_; }

    bool active(std::size_t row, std::size_t col) const {
        return mask_[row * n_cols_ + col] != 0;
    }

    /// Cell of the bounding box containing p, or nullopt outside the box.
    std::optional<CellIndex> cell_of(Point p) const;

    /// True iff p lies in a true mask cell.
    bool contains(Point p) const;

    double area() const;

private:
    double x_min_;
    double y_min_;
    std::size_t n_cols_;
    std::size_t n_rows_;
    double cell_size_;
    std::vector<std::uint8_t> mask_;
    std::size_t active_cells_ = 0;
};

/// Number of true mask cells times cell_size squared.
double region_area(const Region& region);

/// Square lattice of pitch `spacing`, anchored at
/// (x_min + spacing/2, y_min + spacing/2), restricted to the mask.
/// Points are ordered south to north, then west to east.
PointSet generate_quadrature_grid(const Region& region, double spacing);

struct TileWeights {
    /// Presences first, then quadrature points.
    std::vector<double> weights;
    std::size_t occupied_tiles = 0;
    /// Tiles holding presences but no quadrature point.
    std::size_t orphan_tiles = 0;
};

/// Square tiles of side `tile_size` anchored at the region origin; each
/// point gets tile_size^2 divided by the number of points in its tile.
TileWeights compute_tile_weights(const Region& region, const PointSet& presences,
                                 const PointSet& quadrature, double tile_size);

/// Outcome of checking a point set against a region.
struct PointLoadReport {
    PointSet inside;
    /// Zero-based indices of rejected points in the input order.
    std::vector<std::size_t> rejected;
};

PointLoadReport partition_points(const Region& region, const PointSet& points);

/// Reads CSV with header `x,y`. Errors carry 1-based line numbers.
PointSet read_points_csv(std::istream& in, const std::string& source = "<stream>");
PointSet read_points_csv(const std::string& path);

/// Reads presences and rejects the whole file if any point is outside the
/// region; the message names every offending line.
PointSet load_presences(const std::string& path, const Region& region);

void write_points_csv(std::ostream& out, const PointSet& points);
void write_points_csv(const std::string& path, const PointSet& points);

}  // namespace ppm
