#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "slicsim/scan_curve.hpp"

namespace slicsim {

namespace detail {

// shortest decimal form that parses back to the same double
inline std::string fmt_full(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

}  // namespace detail

// CSV form: '#'-prefixed header lines carrying metadata, a column-name line,
// then comma-separated rows. Values are written with full precision so the
// file round-trips losslessly.
inline std::string curve_to_csv(const ScanCurve& curve) {
    curve.validate();
    std::ostringstream os;
    os << "# slicsim-curve v1\n";
    os << "# units: SI (Hz, s)\n";
    os << "# scan_type: " << scan_type_name(curve.type) << "\n";
    for (const auto& [k, v] : curve.metadata) os << "# " << k << ": " << v << "\n";
    os << curve.x_label << "," << curve.y_label << "\n";
    for (size_t i = 0; i < curve.x.size(); ++i)
        os << detail::fmt_full(curve.x[i]) << "," << detail::fmt_full(curve.y[i]) << "\n";
    return os.str();
}

inline nlohmann::json curve_to_json(const ScanCurve& curve) {
    curve.validate();
    nlohmann::json meta = nlohmann::json::object();
    for (const auto& [k, v] : curve.metadata) meta[k] = v;
    return nlohmann::json{{"schema", "slicsim-curve/1"},
                          {"scan_type", scan_type_name(curve.type)},
                          {"x_label", curve.x_label},
                          {"y_label", curve.y_label},
                          {"metadata", meta},
                          {"x", curve.x},
                          {"y", curve.y}};
}

inline ScanCurve curve_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("scan_type") || !j.contains("x") || !j.contains("y"))
        throw std::invalid_argument("curve: missing scan_type/x/y");
    ScanCurve curve;
    curve.type = scan_type_from_name(j.at("scan_type").get<std::string>());
    curve.x_label = j.value("x_label", std::string("x"));
    curve.y_label = j.value("y_label", std::string("y"));
    curve.x = j.at("x").get<std::vector<double>>();
    curve.y = j.at("y").get<std::vector<double>>();
    if (j.contains("metadata"))
        for (const auto& [k, v] : j.at("metadata").items())
            curve.metadata.emplace_back(k, v.get<std::string>());
    curve.validate();
    return curve;
}

inline ScanCurve curve_from_csv(std::istream& in) {
    ScanCurve curve;
    bool have_type = false, have_columns = false;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto colon = line.find(':');
            if (colon != std::string::npos) {
                std::string key = line.substr(1, colon - 1);
                std::string value = line.substr(colon + 1);
                auto trim = [](std::string& s) {
                    s.erase(0, s.find_first_not_of(" \t"));
                    s.erase(s.find_last_not_of(" \t\r") + 1);
                };
                trim(key);
                trim(value);
                if (key == "scan_type") {
                    curve.type = scan_type_from_name(value);
                    have_type = true;
                } else if (key != "slicsim-curve v1" && key != "units") {
                    curve.metadata.emplace_back(key, value);
                }
            }
            continue;
        }
        std::istringstream row(line);
        std::string a, b;
        if (!std::getline(row, a, ',') || !std::getline(row, b))
            throw std::invalid_argument("curve: line " + std::to_string(lineno) +
                                        ": expected two comma-separated columns");
        if (!b.empty() && b.back() == '\r') b.pop_back();
        if (!have_columns) {
            char* end = nullptr;
            std::strtod(a.c_str(), &end);
            if (end == a.c_str() || *end != '\0') {
                // column-name header line
                curve.x_label = a;
                curve.y_label = b;
                have_columns = true;
                continue;
            }
            have_columns = true;
        }
        try {
            curve.x.push_back(std::stod(a));
            curve.y.push_back(std::stod(b));
        } catch (const std::exception&) {
            throw std::invalid_argument("curve: line " + std::to_string(lineno) +
                                        ": non-numeric value");
        }
    }
    if (!have_type)
        throw std::invalid_argument("curve: missing scan_type header");
    curve.validate();
    return curve;
}

inline ScanCurve load_curve(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open curve file: " + path);
    // JSON files start with '{'; CSV files with '#' or data
    const int first = in.peek();
    if (first == '{') {
        nlohmann::json j;
        in >> j;
        return curve_from_json(j);
    }
    return curve_from_csv(in);
}

}  // namespace slicsim
