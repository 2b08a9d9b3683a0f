#pragma once

#include "core/region_grid.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ppm {

struct GridHeader {
    std::size_t n_cols = 0;
    std::size_t n_rows = 0;
    double x_ll = 0.0;
    double y_ll = 0.0;
    double cell_size = 1.0;
    double nodata = -9999.0;

    bool operator==(const GridHeader&) const = default;
};

/// One surface on a regular lattice. Storage is row-major with row 0 the
/// southernmost row (the ASCII format lists the northernmost row first).
class RasterGrid {
public:
    RasterGrid(GridHeader header, std::vector<double> values);
    static RasterGrid filled(const GridHeader& header, double value);

    const GridHeader& header() const { return header_; }
    std::size_t n_cols() const { return header_.n_cols; }
    std::size_t n_rows() const { return header_.n_rows; }

    double at(std::size_t row, std::size_t col) const { return values_[row * header_.n_cols + col]; }
    void set(std::size_t row, std::size_t col, double v) { values_[row * header_.n_cols + col] = v; }
    bool is_nodata(std::size_t row, std::size_t col) const;
    const std::vector<double>& values() const { return values_; }

    Point cell_center(std::size_t row, std::size_t col) const;
    std::optional<CellIndex> cell_of(Point p) const;

    /// Value of the cell containing p; nullopt outside the extent or at nodata.
    std::optional<double> sample(Point p) const;

private:
    GridHeader header_;
    std::vector<double> values_;
};

RasterGrid read_ascii_grid(std::istream& in, const std::string& source = "<stream>");
RasterGrid read_ascii_grid(const std::string& path);
void write_ascii_grid(std::ostream& out, const RasterGrid& grid);
void write_ascii_grid(const std::string& path, const RasterGrid& grid);

/// Region whose mask is the set of non-nodata cells of `grid`.
Region region_from_raster(const RasterGrid& grid);

/// Named, aligned covariate rasters.
class CovariateStack {
public:
    void add(std::string name, RasterGrid grid);

    std::size_t size() const { return grids_.size(); }
    bool empty() const { return grids_.empty(); }
    const std::vector<std::string>& names() const { return names_; }
    const RasterGrid& grid(std::size_t i) const { return grids_[i]; }
    const RasterGrid& grid(const std::string& name) const;
    std::size_t index_of(const std::string& name) const;
    const GridHeader& header() const;

private:
    std::vector<std::string> names_;
    std::vector<RasterGrid> grids_;
};

/// Nearest-cell values: row i holds `variables` sampled at points[i].
/// Throws InputError naming points that fall outside or on nodata.
Eigen::MatrixXd sample_covariates(const CovariateStack& stack, const PointSet& points,
                                  const std::vector<std::string>& variables);

enum class TermKind { intercept, linear, square, cross };

/// A polynomial term over variable indices; `second` is used by cross only.
struct Term {
    TermKind kind = TermKind::intercept;
    std::size_t first = 0;
    std::size_t second = 0;
    bool operator==(const Term&) const = default;
};

struct Standardization {
    std::vector<double> center;
    std::vector<double> scale;
};

/// Declarative log-linear model: a term list over named covariates, plus
/// the optional centering/scaling applied to each covariate before terms
/// are formed.
class ModelSpec {
public:
    ModelSpec(std::vector<std::string> variables, std::vector<Term> terms,
              std::optional<Standardization> standardization = std::nullopt);

    /// Intercept plus one linear term per variable.
    static ModelSpec linear(std::vector<std::string> variables);
    /// Intercept, linears, squares, then crosses j<j' in lexicographic order.
    static ModelSpec quadratic(std::vector<std::string> variables);

    const std::vector<std::string>& variables() const { return variables_; }
    const std::vector<Term>& terms() const { return terms_; }
    std::size_t num_terms() const { return terms_.size(); }
    bool standardized() const { return standardization_.has_value(); }
    const std::optional<Standardization>& standardization() const { return standardization_; }
    bool is_quadratic() const;

    ModelSpec with_standardization(Standardization s) const;
    ModelSpec without_standardization() const;

    std::string term_name(const Term& t) const;
    std::vector<std::string> term_names() const;

private:
    std::vector<std::string> variables_;
    std::vector<Term> terms_;
    std::optional<Standardization> standardization_;
};

/// Count of terms in a full quadratic over k variables: 1 + k + k(k+1)/2.
constexpr std::size_t full_quadratic_terms(std::size_t k) { return 1 + k + k * (k + 1) / 2; }

/// Mean and population standard deviation of each variable over the stack
/// cells whose centers fall inside the region.
Standardization estimate_standardization(const CovariateStack& stack, const Region& region,
                                         const std::vector<std::string>& variables);

/// n x p design: column order follows spec.terms().
Eigen::MatrixXd build_design(const ModelSpec& spec, const Eigen::MatrixXd& raw);

/// Matrix T with beta_raw = T * beta_std for the spec's standardization;
/// identity when the spec is unstandardized.
Eigen::MatrixXd coefficient_transform(const ModelSpec& spec);

/// Coefficients and covariance in raw covariate units.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> destandardize_coefficients(
    const ModelSpec& spec, const Eigen::VectorXd& beta_std, const Eigen::MatrixXd& cov_std);

}  // namespace ppm
