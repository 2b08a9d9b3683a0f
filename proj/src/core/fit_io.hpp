#pragma once

#include "core/covariates.hpp"
#include "core/ppm_core.hpp"

#include <json.hpp>

#include <string>

namespace ppm {

struct FitMetadata {
    double spacing = 0.0;
    std::size_t n_presence = 0;
    std::size_t n_quadrature = 0;
    double area = 0.0;
};

/// A fitted model with everything needed to evaluate it again.
struct FitRecord {
    ModelSpec spec;
    FitResult fit;
    FitMetadata meta;
};

nlohmann::ordered_json fit_to_json(const FitRecord& record);
FitRecord fit_from_json(const nlohmann::json& j);

void write_fit_json(const std::string& path, const FitRecord& record);
FitRecord read_fit_json(const std::string& path);

}  // namespace ppm
