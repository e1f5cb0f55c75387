#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "slicsim/sequence.hpp"

namespace slicsim {

// JSON schema for sequences: a list of tagged elements with SI-unit fields.
//   {"schema": "slicsim-sequence/1",
//    "elements": [{"type": "hard_pulse", "flip_rad": .., "phase_rad": ..},
//                 {"type": "delay", "t_s": ..},
//                 {"type": "spin_lock", "nu_n_hz": .., "phase_rad": .., "tau_sl_s": ..},
//                 {"type": "echo_train", "n": .., "tau_s": .., "pulse_phase_rad": ..},
//                 {"type": "evolve", "tau_evolve_s": ..}],
//    "record_points_s": [..]}   (record points optional)

inline nlohmann::json element_to_json(const SequenceElement& el) {
    return std::visit(
        [](const auto& e) -> nlohmann::json {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, HardPulse>)
                return {{"type", "hard_pulse"}, {"flip_rad", e.flip_rad}, {"phase_rad", e.phase_rad}};
            else if constexpr (std::is_same_v<T, Delay>)
                return {{"type", "delay"}, {"t_s", e.t_s}};
            else if constexpr (std::is_same_v<T, SpinLock>)
                return {{"type", "spin_lock"},
                        {"nu_n_hz", e.nu_n_hz},
                        {"phase_rad", e.phase_rad},
                        {"tau_sl_s", e.tau_sl_s}};
            else if constexpr (std::is_same_v<T, EchoTrain>)
                return {{"type", "echo_train"},
                        {"n", e.n},
                        {"tau_s", e.tau_s},
                        {"pulse_phase_rad", e.pulse_phase_rad}};
            else
                return {{"type", "evolve"}, {"tau_evolve_s", e.tau_evolve_s}};
        },
        el);
}

namespace detail {

inline double require_number(const nlohmann::json& j, const char* field) {
    if (!j.contains(field) || !j.at(field).is_number())
        throw std::invalid_argument(std::string("sequence element: missing numeric field '") +
                                    field + "'");
    return j.at(field).get<double>();
}

}  // namespace detail

inline SequenceElement element_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
        throw std::invalid_argument("sequence element: missing 'type'");
    const std::string type = j.at("type").get<std::string>();
    if (type == "hard_pulse")
        return HardPulse{detail::require_number(j, "flip_rad"),
                         j.value("phase_rad", 0.0)};
    if (type == "delay") return Delay{detail::require_number(j, "t_s")};
    if (type == "spin_lock")
        return SpinLock{detail::require_number(j, "nu_n_hz"), j.value("phase_rad", 0.0),
                        detail::require_number(j, "tau_sl_s")};
    if (type == "echo_train") {
        if (!j.contains("n") || !j.at("n").is_number_integer())
            throw std::invalid_argument("sequence element: echo_train needs integer 'n'");
        return EchoTrain{j.at("n").get<int>(), detail::require_number(j, "tau_s"),
                         j.value("pulse_phase_rad", 0.0)};
    }
    if (type == "evolve") return Evolve{detail::require_number(j, "tau_evolve_s")};
    throw std::invalid_argument("sequence element: unknown type '" + type + "'");
}

inline nlohmann::json sequence_to_json(const PulseSequence& seq) {
    nlohmann::json elements = nlohmann::json::array();
    for (const auto& el : seq.elements) elements.push_back(element_to_json(el));
    nlohmann::json out{{"schema", "slicsim-sequence/1"}, {"elements", elements}};
    if (!seq.record_points_s.empty()) out["record_points_s"] = seq.record_points_s;
    return out;
}

inline PulseSequence sequence_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("elements") || !j.at("elements").is_array())
        throw std::invalid_argument("sequence: missing 'elements' array");
    PulseSequence seq;
    for (const auto& el : j.at("elements")) seq.elements.push_back(element_from_json(el));
    if (j.contains("record_points_s"))
        seq.record_points_s = j.at("record_points_s").get<std::vector<double>>();
    seq.validate();
    return seq;
}

}  // namespace slicsim
