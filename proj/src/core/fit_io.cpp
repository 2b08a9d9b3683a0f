#include "core/fit_io.hpp"

#include "core/error.hpp"

#include <fstream>

namespace ppm {

namespace {

const char* kind_name(TermKind k) {
    switch (k) {
        case TermKind::intercept: return "intercept";
        case TermKind::linear: return "linear";
        case TermKind::square: return "square";
        case TermKind::cross: return "cross";
    }
    return "";
}

TermKind kind_from(const std::string& s) {
    if (s == "intercept") return TermKind::intercept;
    if (s == "linear") return TermKind::linear;
    if (s == "square") return TermKind::square;
    if (s == "cross") return TermKind::cross;
    throw InputError("unknown term kind '" + s + "' in fit file");
}

template <class Vec>
std::vector<double> to_vector(const Vec& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

nlohmann::ordered_json fit_to_json(const FitRecord& r) {
    using nlohmann::ordered_json;
    const auto& spec = r.spec;
    ordered_json model;
    model["variables"] = spec.variables();
    model["quadratic"] = spec.is_quadratic();
    ordered_json terms = ordered_json::array();
    for (const auto& t : spec.terms()) {
        ordered_json term;
        term["kind"] = kind_name(t.kind);
        if (t.kind != TermKind::intercept) term["first"] = t.first;
        if (t.kind == TermKind::cross) term["second"] = t.second;
        terms.push_back(term);
    }
    model["terms"] = terms;
    model["standardize"] = spec.standardized();
    if (spec.standardized()) {
        model["center"] = spec.standardization()->center;
        model["scale"] = spec.standardization()->scale;
    }

    const auto [beta_raw, cov_raw] = destandardize_coefficients(spec, r.fit.beta, r.fit.covariance());

    ordered_json j;
    j["coefficient_names"] = spec.term_names();
    j["beta"] = to_vector(r.fit.beta);
    j["se"] = to_vector(r.fit.se);
    j["beta_raw"] = to_vector(beta_raw);
    j["se_raw"] = to_vector(Eigen::VectorXd(cov_raw.diagonal().cwiseSqrt()));
    j["log_lik"] = r.fit.log_lik;
    j["aic"] = r.fit.aic;
    j["iterations"] = r.fit.iterations;
    j["converged"] = r.fit.converged;
    j["max_abs_score"] = r.fit.max_abs_score;
    ordered_json fisher = ordered_json::array();
    for (Eigen::Index i = 0; i < r.fit.fisher.rows(); ++i)
        fisher.push_back(to_vector(Eigen::VectorXd(r.fit.fisher.row(i).transpose())));
    j["fisher"] = fisher;
    j["model"] = model;
    j["metadata"] = {{"spacing", r.meta.spacing},
                     {"n", r.meta.n_presence},
                     {"q", r.meta.n_quadrature},
                     {"area", r.meta.area}};
    return j;
}

FitRecord fit_from_json(const nlohmann::json& j) {
    try {
        const auto& model = j.at("model");
        std::vector<Term> terms;
        for (const auto& t : model.at("terms")) {
            Term term;
            term.kind = kind_from(t.at("kind").get<std::string>());
            if (t.contains("first")) term.first = t.at("first").get<std::size_t>();
            if (t.contains("second")) term.second = t.at("second").get<std::size_t>();
            terms.push_back(term);
        }
        std::optional<Standardization> s;
        if (model.at("standardize").get<bool>())
            s = Standardization{model.at("center").get<std::vector<double>>(),
                                model.at("scale").get<std::vector<double>>()};
        ModelSpec spec(model.at("variables").get<std::vector<std::string>>(), terms, s);

        FitResult fit;
        fit.beta = to_eigen(j.at("beta").get<std::vector<double>>());
        fit.se = to_eigen(j.at("se").get<std::vector<double>>());
        fit.log_lik = j.at("log_lik").get<double>();
        fit.aic = j.at("aic").get<double>();
        fit.iterations = j.at("iterations").get<int>();
        fit.converged = j.at("converged").get<bool>();
        fit.max_abs_score = j.at("max_abs_score").get<double>();
        const auto rows = j.at("fisher").get<std::vector<std::vector<double>>>();
        const auto p = static_cast<Eigen::Index>(spec.num_terms());
        if (fit.beta.size() != p || fit.se.size() != p || static_cast<Eigen::Index>(rows.size()) != p)
            throw InputError("fit file coefficient counts do not match its model");
        fit.fisher.resize(p, p);
        for (Eigen::Index r = 0; r < p; ++r) {
            if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)].size()) != p)
                throw InputError("fit file Fisher matrix is not square");
            for (Eigen::Index c = 0; c < p; ++c)
                fit.fisher(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        }
        const auto& meta = j.at("metadata");
        FitMetadata m{meta.at("spacing").get<double>(), meta.at("n").get<std::size_t>(),
                      meta.at("q").get<std::size_t>(), meta.at("area").get<double>()};
        return FitRecord{std::move(spec), std::move(fit), m};
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed fit file: ") + e.what());
    }
}

void write_fit_json(const std::string& path, const FitRecord& record) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write fit file '" + path + "'");
    out << fit_to_json(record).dump(2) << '\n';
}

FitRecord read_fit_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open fit file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path + ": " + e.what());
    }
    return fit_from_json(j);
}

}  // namespace ppm
