#include "core/region_grid.hpp"

#include "core/error.hpp"
#include "core/numeric.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace ppm {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

struct TileKey {
    std::int64_t tx;
    std::int64_t ty;
    bool operator==(const TileKey&) const = default;
};

struct TileKeyHash {
    std::size_t operator()(const TileKey& k) const {
        return std::hash<std::int64_t>{}(k.tx * 0x9E3779B97F4A7C15LL ^ k.ty);
    }
};

}  // namespace

Region::Region(double x_min, double y_min, std::size_t n_cols, std::size_t n_rows,
               double cell_size, std::vector<std::uint8_t> mask)
    : x_min_(x_min), y_min_(y_min), n_cols_(n_cols), n_rows_(n_rows),
      cell_size_(cell_size), mask_(std::move(mask)) {
    if (!std::isfinite(x_min) || !std::isfinite(y_min))
        throw InputError("region origin must be finite");
    if (!(cell_size > 0.0) || !std::isfinite(cell_size))
        throw InputError("region cell size must be positive");
    if (n_cols == 0 || n_rows == 0) throw InputError("region needs at least one row and column");
    if (mask_.size() != n_cols * n_rows)
        throw InputError("region mask has " + std::to_string(mask_.size()) + " cells, expected " +
                         std::to_string(n_cols * n_rows));
    for (auto& m : mask_) {
        m = m ? 1 : 0;
        active_cells_ += m;
    }
    if (active_cells_ == 0) throw InputError("region mask has no active cells");
}

Region Region::rectangle(double x_min, double y_min, std::size_t n_cols, std::size_t n_rows,
                         double cell_size) {
    return Region(x_min, y_min, n_cols, n_rows, cell_size,
                  std::vector<std::uint8_t>(n_cols * n_rows, 1));
}

std::optional<CellIndex> Region::cell_of(Point p) const {
    const double fx = std::floor((p.x - x_min_) / cell_size_);
    const double fy = std::floor((p.y - y_min_) / cell_size_);
    if (!(fx >= 0.0) || !(fy >= 0.0)) return std::nullopt;
    if (fx >= static_cast<double>(n_cols_) || fy >= static_cast<double>(n_rows_))
        return std::nullopt;
    return CellIndex{static_cast<std::size_t>(fy), static_cast<std::size_t>(fx)};
}

bool Region::contains(Point p) const {
    const auto cell = cell_of(p);
    return cell && active(cell->row, cell->col);
}

double Region::area() const {
    return static_cast<double>(active_cells_) * cell_size_ * cell_size_;
}

double region_area(const Region& region) { return region.area(); }

PointSet generate_quadrature_grid(const Region& region, double spacing) {
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw InputError("quadrature spacing must be positive");
    if (spacing > std::min(region.width(), region.height()))
        throw InputError("quadrature spacing " + format_double(spacing) +
                         " exceeds the shorter side of the region");
    PointSet points;
    for (std::size_t j = 0;; ++j) {
        const double y = region.y_min() + (static_cast<double>(j) + 0.5) * spacing;
        if (y >= region.y_max()) break;
        for (std::size_t i = 0;; ++i) {
            const double x = region.x_min() + (static_cast<double>(i) + 0.5) * spacing;
            if (x >= region.x_max()) break;
            const Point p{x, y};
            if (region.contains(p)) points.push_back(p);
        }
    }
    if (points.empty())
        throw InputError("no quadrature point of spacing " + format_double(spacing) +
                         " falls inside the region mask; spacing too coarse");
    return points;
}

TileWeights compute_tile_weights(const Region& region, const PointSet& presences,
                                 const PointSet& quadrature, double tile_size) {
    if (!(tile_size > 0.0) || !std::isfinite(tile_size))
        throw InputError("tile size must be positive");

    struct Census {
        std::size_t presences = 0;
        std::size_t quadrature = 0;
    };
    const std::size_t total = presences.size() + quadrature.size();
    std::vector<TileKey> keys;
    keys.reserve(total);
    std::unordered_map<TileKey, Census, TileKeyHash> census;
    census.reserve(total);

    auto key_of = [&](Point p) {
        return TileKey{static_cast<std::int64_t>(std::floor((p.x - region.x_min()) / tile_size)),
                       static_cast<std::int64_t>(std::floor((p.y - region.y_min()) / tile_size))};
    };
    for (const auto& p : presences) {
        keys.push_back(key_of(p));
        ++census[keys.back()].presences;
    }
    for (const auto& p : quadrature) {
        keys.push_back(key_of(p));
        ++census[keys.back()].quadrature;
    }

    TileWeights out;
    out.occupied_tiles = census.size();
    for (const auto& [key, c] : census)
        if (c.presences > 0 && c.quadrature == 0) ++out.orphan_tiles;

    const double tile_area = tile_size * tile_size;
    out.weights.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
        const auto& c = census[keys[i]];
        out.weights[i] = tile_area / static_cast<double>(c.presences + c.quadrature);
    }
    return out;
}

PointLoadReport partition_points(const Region& region, const PointSet& points) {
    PointLoadReport report;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (region.contains(points[i]))
            report.inside.push_back(points[i]);
        else
            report.rejected.push_back(i);
    }
    return report;
}

PointSet read_points_csv(std::istream& in, const std::string& source) {
    PointSet points;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = trim(line);
        if (text.empty()) continue;
        if (!header_seen) {
            std::string compact;
            for (char ch : text)
                if (ch != ' ' && ch != '\t') compact.push_back(static_cast<char>(std::tolower(ch)));
            if (compact != "x,y")
                throw InputError(source + ":" + std::to_string(line_no) +
                                 ": expected header 'x,y', found '" + text + "'");
            header_seen = true;
            continue;
        }
        const auto comma = text.find(',');
        if (comma == std::string::npos || text.find(',', comma + 1) != std::string::npos)
            throw InputError(source + ":" + std::to_string(line_no) +
                             ": expected two comma-separated values");
        Point p;
        if (!parse_double(trim(std::string_view(text).substr(0, comma)), p.x) ||
            !parse_double(trim(std::string_view(text).substr(comma + 1)), p.y))
            throw InputError(source + ":" + std::to_string(line_no) + ": malformed number in '" +
                             text + "'");
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw InputError(source + ":" + std::to_string(line_no) + ": non-finite coordinate");
        points.push_back(p);
    }
    if (!header_seen) throw InputError(source + ": empty point file (missing 'x,y' header)");
    return points;
}

PointSet read_points_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open point file '" + path + "'");
    return read_points_csv(in, path);
}

PointSet load_presences(const std::string& path, const Region& region) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open point file '" + path + "'");
    // Track line numbers so a rejected point can be named by its row.
    std::vector<std::size_t> lines;
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    {
        std::istringstream scan(text);
        std::string line;
        std::size_t line_no = 0;
        bool header = false;
        while (std::getline(scan, line)) {
            ++line_no;
            if (trim(line).empty()) continue;
            if (!header) {
                header = true;
                continue;
            }
            lines.push_back(line_no);
        }
    }
    std::istringstream parse(text);
    PointSet points = read_points_csv(parse, path);
    const auto report = partition_points(region, points);
    if (!report.rejected.empty()) {
        std::ostringstream msg;
        msg << path << ": " << report.rejected.size() << " of " << points.size()
            << " presence points lie outside the region mask (";
        const std::size_t shown = std::min<std::size_t>(report.rejected.size(), 20);
        for (std::size_t i = 0; i < shown; ++i) {
            const auto idx = report.rejected[i];
            msg << (i ? ", " : "") << "line " << lines[idx] << " (" << format_double(points[idx].x)
                << ", " << format_double(points[idx].y) << ")";
        }
        if (shown < report.rejected.size()) msg << ", ...";
        msg << ")";
        throw InputError(msg.str());
    }
    return points;
}

void write_points_csv(std::ostream& out, const PointSet& points) {
    out << "x,y\n";
    for (const auto& p : points) out << format_double(p.x) << ',' << format_double(p.y) << '\n';
}

void write_points_csv(const std::string& path, const PointSet& points) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write point file '" + path + "'");
    write_points_csv(out, points);
}

}  // namespace ppm
