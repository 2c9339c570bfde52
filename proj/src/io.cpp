#include "sdlab/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace sdlab::io {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void row(std::ostream& os, std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
        if (!first) os << ',';
        os << format_double(v);
        first = false;
    }
    os << '\n';
}

nlohmann::json table(std::initializer_list<const char*> columns) {
    nlohmann::json t;
    t["columns"] = nlohmann::json::array();
    for (auto c : columns) t["columns"].push_back(c);
    t["rows"] = nlohmann::json::array();
    return t;
}

}  // namespace

void write_csv(std::ostream& os, const radial::RadialPath& path) {
    const bool reg = path.regulator.has_value();
    os << (reg ? "t,r,regulator\n" : "t,r\n");
    for (std::size_t k = 0; k < path.values.size(); ++k) {
        const double t = path.dt * static_cast<double>(k);
        if (reg)
            row(os, {t, path.values[k], (*path.regulator)[k]});
        else
            row(os, {t, path.values[k]});
    }
}

void write_csv(std::ostream& os, const sphere::SpherePath& path) {
    os << "a,ux,uy,uz\n";
    for (std::size_t k = 0; k < path.points.size(); ++k) {
        const auto& u = path.points[k].unit();
        row(os, {path.times[k], u.x, u.y, u.z});
    }
}

void write_csv(std::ostream& os, const skewprod::PathR3& path) {
    os << "t,x,y,z\n";
    for (std::size_t k = 0; k < path.points.size(); ++k) {
        const auto& p = path.points[k];
        row(os, {path.dt * static_cast<double>(k), p.x, p.y, p.z});
    }
}

nlohmann::json to_table_json(const radial::RadialPath& path) {
    const bool reg = path.regulator.has_value();
    auto t = reg ? table({"t", "r", "regulator"}) : table({"t", "r"});
    for (std::size_t k = 0; k < path.values.size(); ++k) {
        const double time = path.dt * static_cast<double>(k);
        if (reg)
            t["rows"].push_back({time, path.values[k], (*path.regulator)[k]});
        else
            t["rows"].push_back({time, path.values[k]});
    }
    return t;
}

nlohmann::json to_table_json(const sphere::SpherePath& path) {
    auto t = table({"a", "ux", "uy", "uz"});
    for (std::size_t k = 0; k < path.points.size(); ++k) {
        const auto& u = path.points[k].unit();
        t["rows"].push_back({path.times[k], u.x, u.y, u.z});
    }
    return t;
}

nlohmann::json to_table_json(const skewprod::PathR3& path) {
    auto t = table({"t", "x", "y", "z"});
    for (std::size_t k = 0; k < path.points.size(); ++k) {
        const auto& p = path.points[k];
        t["rows"].push_back({path.dt * static_cast<double>(k), p.x, p.y, p.z});
    }
    return t;
}

nlohmann::json excursion_inventory(std::span<const excursion::ExcursionRecord> records, std::size_t n_cells) {
    auto out = nlohmann::json::array();
    for (const auto& r : records) {
        nlohmann::json j;
        j["zeta"] = r.zeta;
        j["U"] = r.U;
        j["A_span_minus"] = r.span_neg;
        j["A_span_plus"] = r.span_pos;
        j["coverage_minus"] = r.coverage_neg;
        j["coverage_plus"] = r.coverage_pos;
        j["n_cells"] = n_cells;
        j["complete"] = r.complete;
        out.push_back(std::move(j));
    }
    return out;
}

nlohmann::json to_json(const stats::EstimateWithCI& e) {
    nlohmann::json j{{"mean", e.mean}, {"stderr", e.stderr()}, {"n", e.n}};
    if (e.seed) j["seed"] = *e.seed;
    return j;
}

nlohmann::json to_json(const fukushima::VariationReport& rep) {
    nlohmann::json j;
    j["n_grid"] = rep.n_grid;
    j["tv_estimates"] = nlohmann::json::array();
    for (const auto& e : rep.tv_estimates) j["tv_estimates"].push_back(to_json(e));
    j["expected"] = rep.expected;
    j["fitted_slope"] = rep.fitted_slope;
    j["slope_stderr"] = rep.slope_stderr;
    j["expected_slope"] = rep.expected_slope;
    j["target_slope"] = rep.target_slope;
    j["T"] = rep.T;
    j["config"] = {{"dt", rep.config.dt},
                   {"n_paths", rep.config.n_paths},
                   {"seed", rep.config.seed},
                   {"kappa", rep.config.xn.kappa}};
    return j;
}

void write_file(const std::string& path, const std::string& text) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << text;
    if (!f) throw std::runtime_error("failed writing " + path);
}

}  // namespace sdlab::io
