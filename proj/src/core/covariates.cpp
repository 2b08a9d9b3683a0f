#include "core/covariates.hpp"

#include "core/error.hpp"
#include "core/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

namespace ppm {

namespace {

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        const std::size_t start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

void validate_header(const GridHeader& h, const std::string& source) {
    if (h.n_cols == 0 || h.n_rows == 0) throw InputError(source + ": raster has zero rows or columns");
    if (!(h.cell_size > 0.0) || !std::isfinite(h.cell_size))
        throw InputError(source + ": raster cell size must be positive");
    if (!std::isfinite(h.x_ll) || !std::isfinite(h.y_ll))
        throw InputError(source + ": raster corner must be finite");
}

}  // namespace

RasterGrid::RasterGrid(GridHeader header, std::vector<double> values)
    : header_(header), values_(std::move(values)) {
    validate_header(header_, "raster");
    if (values_.size() != header_.n_cols * header_.n_rows)
        throw InputError("raster has " + std::to_string(values_.size()) + " values, header implies " +
                         std::to_string(header_.n_cols * header_.n_rows));
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double v = values_[i];
        if (v != header_.nodata && !std::isnan(v) && !std::isfinite(v))
            throw InputError("raster value at cell " + std::to_string(i) + " is not finite");
    }
}

RasterGrid RasterGrid::filled(const GridHeader& header, double value) {
    return RasterGrid(header, std::vector<double>(header.n_cols * header.n_rows, value));
}

bool RasterGrid::is_nodata(std::size_t row, std::size_t col) const {
    const double v = at(row, col);
    return v == header_.nodata || std::isnan(v);
}

Point RasterGrid::cell_center(std::size_t row, std::size_t col) const {
    return {header_.x_ll + (static_cast<double>(col) + 0.5) * header_.cell_size,
            header_.y_ll + (static_cast<double>(row) + 0.5) * header_.cell_size};
}

std::optional<CellIndex> RasterGrid::cell_of(Point p) const {
    const double fx = std::floor((p.x - header_.x_ll) / header_.cell_size);
    const double fy = std::floor((p.y - header_.y_ll) / header_.cell_size);
    if (!(fx >= 0.0) || !(fy >= 0.0)) return std::nullopt;
    if (fx >= static_cast<double>(header_.n_cols) || fy >= static_cast<double>(header_.n_rows))
        return std::nullopt;
    return CellIndex{static_cast<std::size_t>(fy), static_cast<std::size_t>(fx)};
}

std::optional<double> RasterGrid::sample(Point p) const {
    const auto cell = cell_of(p);
    if (!cell || is_nodata(cell->row, cell->col)) return std::nullopt;
    return at(cell->row, cell->col);
}

RasterGrid read_ascii_grid(std::istream& in, const std::string& source) {
    GridHeader h;
    bool have[6] = {false, false, false, false, false, false};
    bool x_center = false;
    bool y_center = false;
    std::string line;
    std::size_t line_no = 0;
    std::size_t header_lines = 0;
    while (header_lines < 6 && std::getline(in, line)) {
        ++line_no;
        const auto tokens = split_ws(line);
        if (tokens.empty()) continue;
        if (tokens.size() != 2)
            throw InputError(source + ":" + std::to_string(line_no) +
                             ": expected 'key value' header line");
        const std::string key = lower(tokens[0]);
        double value = 0.0;
        if (!parse_double(tokens[1], value))
            throw InputError(source + ":" + std::to_string(line_no) + ": malformed header value '" +
                             std::string(tokens[1]) + "'");
        int slot = -1;
        if (key == "ncols") slot = 0;
        else if (key == "nrows") slot = 1;
        else if (key == "xllcorner" || key == "xllcenter") slot = 2, x_center = key == "xllcenter";
        else if (key == "yllcorner" || key == "yllcenter") slot = 3, y_center = key == "yllcenter";
        else if (key == "cellsize") slot = 4;
        else if (key == "nodata_value") slot = 5;
        else
            throw InputError(source + ":" + std::to_string(line_no) + ": unknown header key '" +
                             std::string(tokens[0]) + "'");
        if (have[slot])
            throw InputError(source + ":" + std::to_string(line_no) + ": duplicate header key '" +
                             std::string(tokens[0]) + "'");
        have[slot] = true;
        switch (slot) {
            case 0:
            case 1:
                if (value < 1 || value != std::floor(value))
                    throw InputError(source + ":" + std::to_string(line_no) +
                                     ": dimension must be a positive integer");
                (slot == 0 ? h.n_cols : h.n_rows) = static_cast<std::size_t>(value);
                break;
            case 2: h.x_ll = value; break;
            case 3: h.y_ll = value; break;
            case 4: h.cell_size = value; break;
            case 5: h.nodata = value; break;
        }
        ++header_lines;
    }
    static const char* names[6] = {"ncols", "nrows", "xllcorner", "yllcorner", "cellsize",
                                   "NODATA_value"};
    for (int i = 0; i < 6; ++i)
        if (!have[i]) throw InputError(source + ": missing header key '" + names[i] + "'");
    validate_header(h, source);
    if (x_center) h.x_ll -= 0.5 * h.cell_size;
    if (y_center) h.y_ll -= 0.5 * h.cell_size;

    std::vector<double> values(h.n_cols * h.n_rows);
    std::size_t rows_read = 0;
    while (rows_read < h.n_rows && std::getline(in, line)) {
        ++line_no;
        const auto tokens = split_ws(line);
        if (tokens.empty()) continue;
        if (tokens.size() != h.n_cols)
            throw InputError(source + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(h.n_cols) + " values, found " +
                             std::to_string(tokens.size()));
        // First data line is the northernmost row.
        const std::size_t row = h.n_rows - 1 - rows_read;
        for (std::size_t c = 0; c < h.n_cols; ++c) {
            double v = 0.0;
            if (!parse_double(tokens[c], v))
                throw InputError(source + ":" + std::to_string(line_no) + ": malformed value '" +
                                 std::string(tokens[c]) + "'");
            if (v != h.nodata && !std::isfinite(v))
                throw InputError(source + ":" + std::to_string(line_no) + ": non-finite value");
            values[row * h.n_cols + c] = v;
        }
        ++rows_read;
    }
    if (rows_read != h.n_rows)
        throw InputError(source + ": expected " + std::to_string(h.n_rows) + " data rows, found " +
                         std::to_string(rows_read));
    while (std::getline(in, line)) {
        ++line_no;
        if (!split_ws(line).empty())
            throw InputError(source + ":" + std::to_string(line_no) + ": unexpected trailing data");
    }
    return RasterGrid(h, std::move(values));
}

RasterGrid read_ascii_grid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open raster '" + path + "'");
    return read_ascii_grid(in, path);
}

void write_ascii_grid(std::ostream& out, const RasterGrid& grid) {
    const auto& h = grid.header();
    out << "ncols " << h.n_cols << '\n'
        << "nrows " << h.n_rows << '\n'
        << "xllcorner " << format_double(h.x_ll) << '\n'
        << "yllcorner " << format_double(h.y_ll) << '\n'
        << "cellsize " << format_double(h.cell_size) << '\n'
        << "NODATA_value " << format_double(h.nodata) << '\n';
    for (std::size_t r = h.n_rows; r-- > 0;) {
        for (std::size_t c = 0; c < h.n_cols; ++c) {
            if (c) out << ' ';
            out << format_double(grid.is_nodata(r, c) ? h.nodata : grid.at(r, c));
        }
        out << '\n';
    }
}

void write_ascii_grid(const std::string& path, const RasterGrid& grid) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write raster '" + path + "'");
    write_ascii_grid(out, grid);
}

Region region_from_raster(const RasterGrid& grid) {
    const auto& h = grid.header();
    std::vector<std::uint8_t> mask(h.n_cols * h.n_rows);
    for (std::size_t r = 0; r < h.n_rows; ++r)
        for (std::size_t c = 0; c < h.n_cols; ++c) mask[r * h.n_cols + c] = !grid.is_nodata(r, c);
    return Region(h.x_ll, h.y_ll, h.n_cols, h.n_rows, h.cell_size, std::move(mask));
}

void CovariateStack::add(std::string name, RasterGrid grid) {
    if (name.empty()) throw InputError("covariate name must not be empty");
    if (std::find(names_.begin(), names_.end(), name) != names_.end())
        throw InputError("duplicate covariate name '" + name + "'");
    if (!grids_.empty()) {
        const auto& a = grids_.front().header();
        const auto& b = grid.header();
        if (a.n_cols != b.n_cols || a.n_rows != b.n_rows || a.x_ll != b.x_ll || a.y_ll != b.y_ll ||
            a.cell_size != b.cell_size)
            throw InputError("covariate '" + name + "' is not aligned with '" + names_.front() + "'");
    }
    names_.push_back(std::move(name));
    grids_.push_back(std::move(grid));
}

std::size_t CovariateStack::index_of(const std::string& name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw InputError("unknown covariate '" + name + "'");
    return static_cast<std::size_t>(it - names_.begin());
}

const RasterGrid& CovariateStack::grid(const std::string& name) const { return grids_[index_of(name)]; }

const GridHeader& CovariateStack::header() const {
    if (grids_.empty()) throw InputError("covariate stack is empty");
    return grids_.front().header();
}

Eigen::MatrixXd sample_covariates(const CovariateStack& stack, const PointSet& points,
                                  const std::vector<std::string>& variables) {
    std::vector<const RasterGrid*> layers;
    for (const auto& v : variables) layers.push_back(&stack.grid(v));
    Eigen::MatrixXd out(static_cast<Eigen::Index>(points.size()),
                        static_cast<Eigen::Index>(variables.size()));
    std::vector<std::size_t> bad;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool ok = true;
        for (std::size_t j = 0; j < layers.size(); ++j) {
            const auto v = layers[j]->sample(points[i]);
            if (!v) {
                ok = false;
                break;
            }
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = *v;
        }
        if (!ok) bad.push_back(i);
    }
    if (!bad.empty()) {
        std::ostringstream msg;
        msg << bad.size() << " point(s) fall outside the covariate extent or on nodata cells: ";
        const std::size_t shown = std::min<std::size_t>(bad.size(), 20);
        for (std::size_t i = 0; i < shown; ++i)
            msg << (i ? ", " : "") << "#" << bad[i] << " (" << format_double(points[bad[i]].x) << ", "
                << format_double(points[bad[i]].y) << ")";
        if (shown < bad.size()) msg << ", ...";
        throw InputError(msg.str());
    }
    return out;
}

ModelSpec::ModelSpec(std::vector<std::string> variables, std::vector<Term> terms,
                     std::optional<Standardization> standardization)
    : variables_(std::move(variables)), terms_(std::move(terms)),
      standardization_(std::move(standardization)) {
    for (std::size_t i = 0; i < variables_.size(); ++i)
        for (std::size_t j = i + 1; j < variables_.size(); ++j)
            if (variables_[i] == variables_[j])
                throw InputError("duplicate model variable '" + variables_[i] + "'");
    if (terms_.empty() || terms_.front().kind != TermKind::intercept)
        throw InputError("model must start with the intercept term");
    const std::size_t k = variables_.size();
    for (std::size_t t = 0; t < terms_.size(); ++t) {
        auto& term = terms_[t];
        if (term.kind == TermKind::intercept) {
            if (t != 0) throw InputError("model has more than one intercept");
            term.first = term.second = 0;
            continue;
        }
        if (term.first >= k || (term.kind == TermKind::cross && term.second >= k))
            throw InputError("model term refers to an unknown variable index");
        if (term.kind == TermKind::cross) {
            if (term.first == term.second)
                throw InputError("cross term needs two distinct variables");
            if (term.first > term.second) std::swap(term.first, term.second);
        } else {
            term.second = 0;
        }
        for (std::size_t u = 0; u < t; ++u)
            if (terms_[u] == term) throw InputError("duplicate model term '" + term_name(term) + "'");
    }
    if (standardization_) {
        const auto& s = *standardization_;
        if (s.center.size() != k || s.scale.size() != k)
            throw InputError("standardization must have one center and scale per variable");
        for (std::size_t j = 0; j < k; ++j) {
            if (!std::isfinite(s.center[j]) || !std::isfinite(s.scale[j]))
                throw InputError("standardization for '" + variables_[j] + "' is not finite");
            if (!(s.scale[j] > 0.0))
                throw InputError("covariate '" + variables_[j] +
                                 "' has zero variance and cannot be scaled");
        }
    }
}

ModelSpec ModelSpec::linear(std::vector<std::string> variables) {
    std::vector<Term> terms{{TermKind::intercept}};
    for (std::size_t j = 0; j < variables.size(); ++j) terms.push_back({TermKind::linear, j});
    return ModelSpec(std::move(variables), std::move(terms));
}

ModelSpec ModelSpec::quadratic(std::vector<std::string> variables) {
    std::vector<Term> terms{{TermKind::intercept}};
    const std::size_t k = variables.size();
    for (std::size_t j = 0; j < k; ++j) terms.push_back({TermKind::linear, j});
    for (std::size_t j = 0; j < k; ++j) terms.push_back({TermKind::square, j});
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t l = j + 1; l < k; ++l) terms.push_back({TermKind::cross, j, l});
    return ModelSpec(std::move(variables), std::move(terms));
}

bool ModelSpec::is_quadratic() const {
    return std::any_of(terms_.begin(), terms_.end(), [](const Term& t) {
        return t.kind == TermKind::square || t.kind == TermKind::cross;
    });
}

ModelSpec ModelSpec::with_standardization(Standardization s) const {
    return ModelSpec(variables_, terms_, std::move(s));
}

ModelSpec ModelSpec::without_standardization() const { return ModelSpec(variables_, terms_); }

std::string ModelSpec::term_name(const Term& t) const {
    switch (t.kind) {
        case TermKind::intercept: return "(Intercept)";
        case TermKind::linear: return variables_[t.first];
        case TermKind::square: return variables_[t.first] + "^2";
        case TermKind::cross: return variables_[t.first] + ":" + variables_[t.second];
    }
    return {};
}

std::vector<std::string> ModelSpec::term_names() const {
    std::vector<std::string> out;
    for (const auto& t : terms_) out.push_back(term_name(t));
    return out;
}

Standardization estimate_standardization(const CovariateStack& stack, const Region& region,
                                         const std::vector<std::string>& variables) {
    if (variables.empty()) return {};
    std::vector<const RasterGrid*> layers;
    for (const auto& v : variables) layers.push_back(&stack.grid(v));
    const auto& h = layers.front()->header();
    const std::size_t k = variables.size();
    std::vector<std::vector<double>> columns(k);
    for (std::size_t r = 0; r < h.n_rows; ++r) {
        for (std::size_t c = 0; c < h.n_cols; ++c) {
            const Point center = layers.front()->cell_center(r, c);
            if (!region.contains(center)) continue;
            bool ok = true;
            for (const auto* layer : layers) ok = ok && !layer->is_nodata(r, c);
            if (!ok) continue;
            for (std::size_t j = 0; j < k; ++j) columns[j].push_back(layers[j]->at(r, c));
        }
    }
    if (columns.front().empty())
        throw InputError("no covariate cell lies inside the region; cannot standardize");
    Standardization s;
    for (std::size_t j = 0; j < k; ++j) {
        const auto& col = columns[j];
        const double n = static_cast<double>(col.size());
        const double mean = pairwise_sum(col.size(), [&](std::size_t i) { return col[i]; }) / n;
        const double var =
            pairwise_sum(col.size(), [&](std::size_t i) { return (col[i] - mean) * (col[i] - mean); }) / n;
        const double sd = std::sqrt(var);
        if (!(sd > 1e-12 * std::max(1.0, std::fabs(mean))))
            throw InputError("covariate '" + variables[j] + "' has zero variance over the region");
        s.center.push_back(mean);
        s.scale.push_back(sd);
    }
    return s;
}

Eigen::MatrixXd build_design(const ModelSpec& spec, const Eigen::MatrixXd& raw) {
    const std::size_t k = spec.variables().size();
    if (static_cast<std::size_t>(raw.cols()) != k)
        throw InputError("raw covariate matrix has " + std::to_string(raw.cols()) +
                         " columns, model expects " + std::to_string(k));
    if (!raw.allFinite()) throw InputError("raw covariate matrix contains non-finite values");
    Eigen::MatrixXd u = raw;
    if (const auto& s = spec.standardization()) {
        for (std::size_t j = 0; j < k; ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            u.col(jj) = (raw.col(jj).array() - s->center[j]) / s->scale[j];
        }
    }
    Eigen::MatrixXd x(raw.rows(), static_cast<Eigen::Index>(spec.num_terms()));
    for (std::size_t t = 0; t < spec.num_terms(); ++t) {
        const auto& term = spec.terms()[t];
        const auto tt = static_cast<Eigen::Index>(t);
        const auto a = static_cast<Eigen::Index>(term.first);
        const auto b = static_cast<Eigen::Index>(term.second);
        switch (term.kind) {
            case TermKind::intercept: x.col(tt).setOnes(); break;
            case TermKind::linear: x.col(tt) = u.col(a); break;
            case TermKind::square: x.col(tt) = u.col(a).array().square(); break;
            case TermKind::cross: x.col(tt) = u.col(a).array() * u.col(b).array(); break;
        }
    }
    return x;
}

Eigen::MatrixXd coefficient_transform(const ModelSpec& spec) {
    const auto p = static_cast<Eigen::Index>(spec.num_terms());
    if (!spec.standardized()) return Eigen::MatrixXd::Identity(p, p);
    const auto& s = *spec.standardization();

    std::map<std::tuple<int, std::size_t, std::size_t>, Eigen::Index> index;
    for (std::size_t t = 0; t < spec.num_terms(); ++t) {
        const auto& term = spec.terms()[t];
        index[{static_cast<int>(term.kind), term.first, term.second}] = static_cast<Eigen::Index>(t);
    }
    Eigen::MatrixXd transform = Eigen::MatrixXd::Zero(p, p);
    auto put = [&](TermKind kind, std::size_t a, std::size_t b, Eigen::Index column, double coef,
                   const Term& source) {
        const auto it = index.find({static_cast<int>(kind), a, b});
        if (it == index.end()) {
            if (coef == 0.0) return;
            throw InputError("model term '" + spec.term_name(source) +
                             "' cannot be mapped to raw units: a lower-order term is missing");
        }
        transform(it->second, column) += coef;
    };
    // u_j = a_j x_j + b_j with a_j = 1/scale_j and b_j = -center_j/scale_j.
    for (std::size_t t = 0; t < spec.num_terms(); ++t) {
        const auto& term = spec.terms()[t];
        const auto col = static_cast<Eigen::Index>(t);
        const std::size_t j = term.first;
        const std::size_t l = term.second;
        switch (term.kind) {
            case TermKind::intercept: put(TermKind::intercept, 0, 0, col, 1.0, term); break;
            case TermKind::linear: {
                const double a = 1.0 / s.scale[j], b = -s.center[j] / s.scale[j];
                put(TermKind::linear, j, 0, col, a, term);
                put(TermKind::intercept, 0, 0, col, b, term);
                break;
            }
            case TermKind::square: {
                const double a = 1.0 / s.scale[j], b = -s.center[j] / s.scale[j];
                put(TermKind::square, j, 0, col, a * a, term);
                put(TermKind::linear, j, 0, col, 2.0 * a * b, term);
                put(TermKind::intercept, 0, 0, col, b * b, term);
                break;
            }
            case TermKind::cross: {
                const double aj = 1.0 / s.scale[j], bj = -s.center[j] / s.scale[j];
                const double al = 1.0 / s.scale[l], bl = -s.center[l] / s.scale[l];
                put(TermKind::cross, j, l, col, aj * al, term);
                put(TermKind::linear, j, 0, col, aj * bl, term);
                put(TermKind::linear, l, 0, col, bj * al, term);
                put(TermKind::intercept, 0, 0, col, bj * bl, term);
                break;
            }
        }
    }
    return transform;
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> destandardize_coefficients(
    const ModelSpec& spec, const Eigen::VectorXd& beta_std, const Eigen::MatrixXd& cov_std) {
    const auto p = static_cast<Eigen::Index>(spec.num_terms());
    if (beta_std.size() != p || cov_std.rows() != p || cov_std.cols() != p)
        throw InputError("coefficient dimensions do not match the model");
    if (!spec.standardized()) return {beta_std, cov_std};
    const Eigen::MatrixXd t = coefficient_transform(spec);
    return {t * beta_std, t * cov_std * t.transpose()};
}

}  // namespace ppm
