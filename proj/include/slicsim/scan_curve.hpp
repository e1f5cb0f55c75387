#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace slicsim {

enum class ScanType { dip, duration, evolve, efficiency };

inline const char* scan_type_name(ScanType t) {
    switch (t) {
        case ScanType::dip: return "dip";
        case ScanType::duration: return "duration";
        case ScanType::evolve: return "evolve";
        case ScanType::efficiency: return "efficiency";
    }
    return "unknown";
}

inline ScanType scan_type_from_name(const std::string& s) {
    if (s == "dip") return ScanType::dip;
    if (s == "duration") return ScanType::duration;
    if (s == "evolve") return ScanType::evolve;
    if (s == "efficiency") return ScanType::efficiency;
    throw std::invalid_argument("unknown scan type: " + s);
}

// Sampled (parameter, observable) pairs with the configuration that produced
// them. Metadata is an ordered key/value list so serialized output is stable.
struct ScanCurve {
    ScanType type = ScanType::dip;
    std::string x_label = "x";
    std::string y_label = "y";
    std::vector<double> x;
    std::vector<double> y;
    std::vector<std::pair<std::string, std::string>> metadata;

    void validate() const {
        if (x.size() != y.size())
            throw std::invalid_argument("ScanCurve: x/y length mismatch");
        for (size_t i = 1; i < x.size(); ++i)
            if (!(x[i] > x[i - 1]))
                throw std::invalid_argument("ScanCurve: x must be strictly increasing");
    }
};

}  // namespace slicsim
