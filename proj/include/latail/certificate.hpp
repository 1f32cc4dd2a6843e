#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace latail {

/// Machine-readable pass/fail record for an inequality family: parameter
/// block, one row per checked index, named constants, and an overall verdict.
/// Serialization is deterministic (sorted keys, shortest round-trip floats),
/// so identical inputs give byte-identical files.
struct Certificate {
    std::string lemma_id;
    std::map<std::string, double> params;
    std::map<std::string, std::string> string_params;
    std::vector<std::map<std::string, double>> rows;
    std::map<std::string, double> constants;
    bool pass = false;
    std::string precision_note;

    nlohmann::json to_json() const;
    std::string dump() const { return to_json().dump(2) + "\n"; }
    void write(const std::string& path) const;
};

} // namespace latail
