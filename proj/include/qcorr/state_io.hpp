#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qcorr/errors.hpp"
#include "qcorr/state.hpp"

namespace qcorr {

// State file format: a JSON document with the fields
//   dims   : list of subsystem dimensions
//   matrix : D x D array of [re, im] pairs, D = product of dims
// Loading always runs the full state validation.

inline DensityMatrix state_from_json(const nlohmann::json& j) {
    DensityMatrix rho;
    try {
        if (!j.is_object() || !j.contains("dims") || !j.contains("matrix"))
            throw parse_error("state file: expected an object with 'dims' and 'matrix'");
        rho.dims = j.at("dims").get<std::vector<int>>();
        const auto& rows = j.at("matrix");
        if (!rows.is_array()) throw parse_error("state file: 'matrix' must be an array");
        const long d = static_cast<long>(rows.size());
        rho.matrix.resize(d, d);
        for (long r = 0; r < d; ++r) {
            const auto& row = rows.at(r);
            if (!row.is_array() || static_cast<long>(row.size()) != d)
                throw parse_error("state file: 'matrix' row " + std::to_string(r) +
                                  " is not an array of length " + std::to_string(d));
            for (long c = 0; c < d; ++c) {
                const auto& entry = row.at(c);
                if (!entry.is_array() || entry.size() != 2)
                    throw parse_error("state file: matrix entry (" + std::to_string(r) + ", " +
                                      std::to_string(c) + ") is not an [re, im] pair");
                rho.matrix(r, c) = {entry.at(0).get<double>(), entry.at(1).get<double>()};
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("state file: ") + e.what());
    }
    validate(rho);
    return rho;
}

inline DensityMatrix parse_state_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("state file: ") + e.what());
    }
    return state_from_json(j);
}

inline DensityMatrix load_state(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("state file: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_state_text(ss.str());
}

inline nlohmann::json state_to_json(const DensityMatrix& rho) {
    nlohmann::json j;
    j["dims"] = rho.dims;
    nlohmann::json rows = nlohmann::json::array();
    for (long r = 0; r < rho.matrix.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (long c = 0; c < rho.matrix.cols(); ++c)
            row.push_back({rho.matrix(r, c).real(), rho.matrix(r, c).imag()});
        rows.push_back(std::move(row));
    }
    j["matrix"] = std::move(rows);
    return j;
}

inline void save_state(const DensityMatrix& rho, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("state file: cannot write '" + path + "'");
    out << state_to_json(rho).dump(1) << "\n";
}

} // namespace qcorr
