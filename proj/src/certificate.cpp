#include "latail/certificate.hpp"

#include <fstream>
#include <stdexcept>

namespace latail {

nlohmann::json Certificate::to_json() const {
    // flat layout: {lemma, <params>, <constants>, rows, pass, precision_note}
    nlohmann::json j;
    j["lemma"] = lemma_id;
    for (const auto& [k, v] : params) j[k] = v;
    for (const auto& [k, v] : string_params) j[k] = v;
    for (const auto& [k, v] : constants) j[k] = v;
    nlohmann::json rws = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json row = nlohmann::json::object();
        for (const auto& [k, v] : r) row[k] = v;
        rws.push_back(row);
    }
    j["rows"] = rws;
    j["pass"] = pass;
    j["precision_note"] = precision_note;
    return j;
}

void Certificate::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << dump();
}

} // namespace latail
