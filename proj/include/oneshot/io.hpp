#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "oneshot/distortion.hpp"
#include "oneshot/errors.hpp"
#include "oneshot/finite_dist.hpp"
#include "oneshot/joint_dist.hpp"
#include "oneshot/math.hpp"

namespace oneshot {

// File formats (UTF-8 JSON):
//   distribution : {"alphabet": ["a","b",...], "masses": [..]}
//   joint        : {"rows": [...], "cols": [...], "masses": [[..],..]}
//   distortion   : {"rows": [...], "cols": [...], "values": [[..],..]}
//   kernel       : {"given": [...], "outputs": [...], "rows": [[..],.. | null]}
// Label arrays are optional; symbols are dense ids, labels only matter at
// this boundary. Mass totals off by more than 1e-9 are rejected unless the
// caller asks for renormalization.

constexpr double kParseTolerance = 1e-9;

struct LabeledDist {
    FiniteDist dist;
    std::vector<std::string> labels;
};

struct LabeledJoint {
    JointDist joint;
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
};

struct LabeledDistortion {
    DistortionTable table;
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
};

struct LabeledKernel {
    Kernel kernel;
    std::vector<std::string> given_labels;
    std::vector<std::string> output_labels;
};

namespace detail_io {

inline nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(path + ": invalid JSON: " + e.what());
    }
    return j;
}

inline std::vector<std::string> labels_or_indices(const nlohmann::json& j, const char* key,
                                                  std::size_t n, const std::string& path) {
    if (!j.contains(key)) {
        std::vector<std::string> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = std::to_string(i);
        return out;
    }
    const auto& arr = j.at(key);
    if (!arr.is_array() || arr.size() != n)
        throw validation_error(path + ": '" + key + "' must list one label per symbol");
    std::vector<std::string> out;
    out.reserve(n);
    for (const auto& v : arr) out.push_back(v.get<std::string>());
    return out;
}

inline std::vector<double> mass_vector(const nlohmann::json& arr, const std::string& path) {
    if (!arr.is_array() || arr.empty())
        throw validation_error(path + ": masses must be a non-empty array");
    std::vector<double> out;
    out.reserve(arr.size());
    for (const auto& v : arr) {
        if (!v.is_number()) throw validation_error(path + ": masses must be numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

// Tiny totals drift is folded away; a real deficit needs the explicit flag.
inline void normalize(std::vector<double>& masses, bool renormalize, const std::string& path) {
    for (double m : masses)
        if (!(m >= 0.0)) throw validation_error(path + ": masses must be nonnegative");
    const double total = neumaier_sum(masses);
    if (total <= 0.0) throw validation_error(path + ": total mass must be positive");
    if (std::abs(total - 1.0) > kParseTolerance && !renormalize)
        throw validation_error(path + ": masses sum to " + std::to_string(total) +
                               "; pass --renormalize to rescale");
    for (double& m : masses) m /= total;
}

} // namespace detail_io

inline LabeledDist read_dist_file(const std::string& path, bool renormalize = false) {
    const auto j = detail_io::load_json(path);
    if (!j.contains("masses")) throw validation_error(path + ": missing 'masses'");
    auto masses = detail_io::mass_vector(j.at("masses"), path);
    detail_io::normalize(masses, renormalize, path);
    auto labels = detail_io::labels_or_indices(j, "alphabet", masses.size(), path);
    return LabeledDist{FiniteDist(std::move(masses)), std::move(labels)};
}

namespace detail_io {

inline std::pair<std::vector<double>, std::pair<std::size_t, std::size_t>>
matrix_values(const nlohmann::json& j, const char* key, const std::string& path) {
    if (!j.contains(key)) throw validation_error(path + ": missing '" + std::string(key) + "'");
    const auto& rows = j.at(key);
    if (!rows.is_array() || rows.empty())
        throw validation_error(path + ": '" + std::string(key) + "' must be an array of rows");
    const std::size_t n_rows = rows.size();
    std::size_t n_cols = 0;
    std::vector<double> flat;
    for (const auto& row : rows) {
        if (!row.is_array() || row.empty())
            throw validation_error(path + ": matrix rows must be non-empty arrays");
        if (n_cols == 0) n_cols = row.size();
        if (row.size() != n_cols) throw validation_error(path + ": ragged matrix");
        for (const auto& v : row) {
            if (!v.is_number()) throw validation_error(path + ": matrix entries must be numbers");
            flat.push_back(v.get<double>());
        }
    }
    return {std::move(flat), {n_rows, n_cols}};
}

} // namespace detail_io

inline LabeledJoint read_joint_file(const std::string& path, bool renormalize = false) {
    const auto j = detail_io::load_json(path);
    auto [flat, shape] = detail_io::matrix_values(j, "masses", path);
    detail_io::normalize(flat, renormalize, path);
    auto row_labels = detail_io::labels_or_indices(j, "rows", shape.first, path);
    auto col_labels = detail_io::labels_or_indices(j, "cols", shape.second, path);
    return LabeledJoint{JointDist(std::move(flat), shape.first, shape.second),
                        std::move(row_labels), std::move(col_labels)};
}

inline LabeledDistortion read_distortion_file(const std::string& path) {
    const auto j = detail_io::load_json(path);
    auto [flat, shape] = detail_io::matrix_values(j, "values", path);
    auto row_labels = detail_io::labels_or_indices(j, "rows", shape.first, path);
    auto col_labels = detail_io::labels_or_indices(j, "cols", shape.second, path);
    return LabeledDistortion{DistortionTable(std::move(flat), shape.first, shape.second),
                             std::move(row_labels), std::move(col_labels)};
}

inline LabeledKernel read_kernel_file(const std::string& path, bool renormalize = false) {
    const auto j = detail_io::load_json(path);
    if (!j.contains("rows")) throw validation_error(path + ": missing 'rows'");
    const auto& rows = j.at("rows");
    if (!rows.is_array() || rows.empty())
        throw validation_error(path + ": 'rows' must be an array");
    std::vector<std::optional<FiniteDist>> parsed;
    std::size_t width = 0;
    for (const auto& row : rows) {
        if (row.is_null()) {
            parsed.emplace_back(std::nullopt);
            continue;
        }
        auto masses = detail_io::mass_vector(row, path);
        detail_io::normalize(masses, renormalize, path);
        if (width == 0) width = masses.size();
        if (masses.size() != width) throw validation_error(path + ": ragged kernel");
        parsed.emplace_back(FiniteDist(std::move(masses)));
    }
    Kernel kernel(std::move(parsed));
    auto given_labels = detail_io::labels_or_indices(j, "given", kernel.size(), path);
    auto output_labels = detail_io::labels_or_indices(j, "outputs", kernel.width(), path);
    return LabeledKernel{std::move(kernel), std::move(given_labels), std::move(output_labels)};
}

} // namespace oneshot
