#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <variant>
#include <vector>

#include "slicsim/spin_system.hpp"

namespace slicsim {

// Timed pulse-sequence elements. An EchoTrain expands to n repetitions of
// [Delay(tau), HardPulse(pi, pulse_phase), Delay(tau)].
struct HardPulse {
    double flip_rad;
    double phase_rad;
};
struct Delay {
    double t_s;
};
struct SpinLock {
    double nu_n_hz;
    double phase_rad;
    double tau_sl_s;
};
struct EchoTrain {
    int n;
    double tau_s;
    double pulse_phase_rad;
};
struct Evolve {
    double tau_evolve_s;
};

using SequenceElement = std::variant<HardPulse, Delay, SpinLock, EchoTrain, Evolve>;

inline double element_duration(const SequenceElement& el) {
    return std::visit(
        [](const auto& e) -> double {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, HardPulse>) return 0.0;
            else if constexpr (std::is_same_v<T, Delay>) return e.t_s;
            else if constexpr (std::is_same_v<T, SpinLock>) return e.tau_sl_s;
            else if constexpr (std::is_same_v<T, EchoTrain>) return 2.0 * e.n * e.tau_s;
            else return e.tau_evolve_s;
        },
        el);
}

inline void validate_element(const SequenceElement& el) {
    std::visit(
        [](const auto& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, Delay>) {
                if (e.t_s < 0) throw std::invalid_argument("Delay: negative duration");
            } else if constexpr (std::is_same_v<T, SpinLock>) {
                if (e.tau_sl_s < 0) throw std::invalid_argument("SpinLock: negative duration");
                if (e.nu_n_hz < 0) throw std::invalid_argument("SpinLock: negative nutation frequency");
            } else if constexpr (std::is_same_v<T, EchoTrain>) {
                if (e.n < 1) throw std::invalid_argument("EchoTrain: n must be >= 1");
                if (e.tau_s < 0) throw std::invalid_argument("EchoTrain: negative tau");
            } else if constexpr (std::is_same_v<T, Evolve>) {
                if (e.tau_evolve_s < 0) throw std::invalid_argument("Evolve: negative duration");
            }
        },
        el);
}

struct PulseSequence {
    std::vector<SequenceElement> elements;
    std::vector<double> record_points_s;  // sampling grid; may be empty

    double duration() const {
        double t = 0.0;
        for (const auto& el : elements) t += element_duration(el);
        return t;
    }

    void validate() const {
        for (const auto& el : elements) validate_element(el);
        const double total = duration();
        double prev = -1.0;
        for (double t : record_points_s) {
            if (t < prev) throw std::invalid_argument("PulseSequence: record points not sorted");
            if (t < 0.0 || t > total + 1e-12)
                throw std::invalid_argument("PulseSequence: record point outside duration");
            prev = t;
        }
    }

    // n uniform samples over [0, duration].
    PulseSequence& with_uniform_grid(int n_points = 512) {
        record_points_s.clear();
        const double total = duration();
        if (n_points == 1) {
            record_points_s.push_back(total);
            return *this;
        }
        for (int i = 0; i < n_points; ++i)
            record_points_s.push_back(total * double(i) / double(n_points - 1));
        return *this;
    }
};

// Expand echo trains into their delay/pulse constituents; exact equivalence
// with direct execution is a tested invariant.
inline std::vector<SequenceElement> expand_elements(const std::vector<SequenceElement>& in) {
    std::vector<SequenceElement> out;
    for (const auto& el : in) {
        if (const auto* train = std::get_if<EchoTrain>(&el)) {
            for (int k = 0; k < train->n; ++k) {
                out.push_back(Delay{train->tau_s});
                out.push_back(HardPulse{std::numbers::pi, train->pulse_phase_rad});
                out.push_back(Delay{train->tau_s});
            }
        } else {
            out.push_back(el);
        }
    }
    return out;
}

// Time of optimal transfer under a matched spin-lock: 1/(sqrt(2) dnu).
inline double optimal_slic_duration(double dnu_hz) {
    if (!(dnu_hz > 0.0))
        throw std::invalid_argument("optimal_slic_duration: dnu must be positive");
    return 1.0 / (std::sqrt(2.0) * dnu_hz);
}

// SLIC experiment: excitation 90 along (phase + 90deg), lock of nu_n along
// `phase` for tau_sl, free evolution, and (when readout is set) an identical
// lock converting singlet population back to transverse magnetization.
inline PulseSequence build_slic(double nu_n_hz, double phase_rad, double tau_sl_s,
                                double tau_evolve_s, bool readout) {
    if (tau_sl_s < 0) throw std::invalid_argument("build_slic: negative lock duration");
    PulseSequence seq;
    seq.elements.push_back(HardPulse{std::numbers::pi / 2.0, phase_rad + std::numbers::pi / 2.0});
    if (tau_sl_s > 0) seq.elements.push_back(SpinLock{nu_n_hz, phase_rad, tau_sl_s});
    seq.elements.push_back(Evolve{tau_evolve_s});
    if (readout && tau_sl_s > 0)
        seq.elements.push_back(SpinLock{nu_n_hz, phase_rad, tau_sl_s});
    seq.validate();
    return seq;
}

// Echo-train parameters for magnetization-to-singlet conversion.
// tau is the quarter period of the T0/S0 pair, n1 the pulse count that
// accumulates a pi rotation of the pair pseudo-spin, n2 half of that.
struct M2SParams {
    int n1;
    int n2;
    double tau_s;
    double nu_e_hz;

    double duration() const { return 2.0 * tau_s * (n1 + n2); }
};

enum class M2STauMode { effective_frequency, j_coupling };

inline M2SParams m2s_params(double j_hz, double dnu_hz,
                            M2STauMode mode = M2STauMode::effective_frequency) {
    if (!(j_hz > dnu_hz) || !(dnu_hz > 0.0))
        throw std::invalid_argument("m2s_params: requires J > dnu > 0");
    M2SParams p;
    p.nu_e_hz = std::hypot(j_hz, dnu_hz);
    p.tau_s = 1.0 / (4.0 * (mode == M2STauMode::effective_frequency ? p.nu_e_hz : j_hz));
    p.n1 = static_cast<int>(std::lround(std::numbers::pi / (2.0 * std::atan(dnu_hz / j_hz))));
    p.n2 = static_cast<int>(std::lround(p.n1 / 2.0));
    return p;
}

// M2S experiment. Forward part: excitation 90, echo train n1, 90 shifted by
// 90deg, a tau delay aligning the zero-quantum coherence with the second
// train's rotation axis, echo train n2. With readout, the mirrored sequence
// follows the evolve stage (the excitation pulse has no mirror image: the
// magnetization must end transverse for detection).
inline PulseSequence build_m2s(const M2SParams& p, double tau_evolve_s, bool readout,
                               double phase_rad = 0.0) {
    if (p.n1 < 0 || p.n2 < 0 || !(p.tau_s > 0.0))
        throw std::invalid_argument("build_m2s: invalid parameters");
    const double pi = std::numbers::pi;
    const double exc = phase_rad + pi / 2.0;
    const double mid = exc + pi / 2.0;
    const double echo = phase_rad;
    PulseSequence seq;
    seq.elements.push_back(HardPulse{pi / 2.0, exc});
    if (p.n1 > 0) seq.elements.push_back(EchoTrain{p.n1, p.tau_s, echo});
    seq.elements.push_back(HardPulse{pi / 2.0, mid});
    seq.elements.push_back(Delay{p.tau_s});
    if (p.n2 > 0) seq.elements.push_back(EchoTrain{p.n2, p.tau_s, echo});
    if (readout) {
        seq.elements.push_back(Evolve{tau_evolve_s});
        if (p.n2 > 0) seq.elements.push_back(EchoTrain{p.n2, p.tau_s, echo});
        seq.elements.push_back(Delay{p.tau_s});
        seq.elements.push_back(HardPulse{pi / 2.0, mid});
        if (p.n1 > 0) seq.elements.push_back(EchoTrain{p.n1, p.tau_s, echo});
    } else if (tau_evolve_s > 0.0) {
        seq.elements.push_back(Evolve{tau_evolve_s});
    }
    seq.validate();
    return seq;
}

}  // namespace slicsim
