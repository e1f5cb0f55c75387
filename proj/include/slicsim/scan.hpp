#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "slicsim/executor.hpp"
#include "slicsim/parallel.hpp"
#include "slicsim/scan_curve.hpp"
#include "slicsim/sequence.hpp"

namespace slicsim {

namespace detail {

inline std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline void append_system_metadata(ScanCurve& curve, const SpinSystem& sys,
                                   const std::optional<RelaxationParams>& relax) {
    curve.metadata.emplace_back("n_spins", std::to_string(sys.n_spins));
    for (int i = 0; i < sys.n_spins; ++i)
        curve.metadata.emplace_back("offset_hz_" + std::to_string(i + 1),
                                    fmt_g(sys.offsets_hz[i]));
    for (int i = 0; i < sys.n_spins; ++i)
        for (int j = i + 1; j < sys.n_spins; ++j)
            curve.metadata.emplace_back(
                "j_hz_" + std::to_string(i + 1) + std::to_string(j + 1), fmt_g(sys.j_hz(i, j)));
    if (relax) {
        curve.metadata.emplace_back("t1_s", fmt_g(relax->t1_s));
        curve.metadata.emplace_back("t2_s", fmt_g(relax->t2_s));
        curve.metadata.emplace_back("ts_s", fmt_g(relax->ts_s));
        curve.metadata.emplace_back("t_st_coherence_s", fmt_g(relax->t_st_coherence_s));
        if (relax->lock_damping_s)
            curve.metadata.emplace_back("lock_damping_s", fmt_g(*relax->lock_damping_s));
    }
}

}  // namespace detail

// Signal after a truncated experiment (excitation, one lock, acquire) versus
// nutation frequency, normalized to the plain 90-degree reference. The curve
// dips where the lock frequency meets the J-coupling.
inline ScanCurve dip_scan(const SpinSystem& system, double tau_sl_s,
                          const std::vector<double>& nu_grid_hz,
                          const std::optional<RelaxationParams>& relax = std::nullopt,
                          double lock_phase_rad = 0.0, unsigned threads = 1) {
    if (nu_grid_hz.empty()) throw std::invalid_argument("dip_scan: empty grid");
    std::vector<double> y = parallel_map<double>(
        nu_grid_hz.size(),
        [&](size_t i) {
            const auto seq = build_slic(nu_grid_hz[i], lock_phase_rad, tau_sl_s, 0.0, false);
            const Trajectory tr = execute(seq, system, relax);
            return tr.final_point.mx / tr.reference_mx;
        },
        threads);
    ScanCurve curve;
    curve.type = ScanType::dip;
    curve.x_label = "nu_n_hz";
    curve.y_label = "signal";
    curve.x = nu_grid_hz;
    curve.y = std::move(y);
    curve.metadata.emplace_back("tau_sl_s", detail::fmt_g(tau_sl_s));
    detail::append_system_metadata(curve, system, relax);
    curve.validate();
    return curve;
}

// Signal after the complete experiment versus lock duration.
inline ScanCurve duration_scan(const SpinSystem& system, double nu_n_hz,
                               const std::vector<double>& tau_grid_s, double tau_evolve_s,
                               const std::optional<RelaxationParams>& relax = std::nullopt,
                               double lock_phase_rad = 0.0, unsigned threads = 1) {
    if (tau_grid_s.empty()) throw std::invalid_argument("duration_scan: empty grid");
    std::vector<double> y = parallel_map<double>(
        tau_grid_s.size(),
        [&](size_t i) {
            const auto seq = build_slic(nu_n_hz, lock_phase_rad, tau_grid_s[i], tau_evolve_s, true);
            const Trajectory tr = execute(seq, system, relax);
            return tr.final_point.mx / tr.reference_mx;
        },
        threads);
    ScanCurve curve;
    curve.type = ScanType::duration;
    curve.x_label = "tau_sl_s";
    curve.y_label = "signal";
    curve.x = tau_grid_s;
    curve.y = std::move(y);
    curve.metadata.emplace_back("nu_n_hz", detail::fmt_g(nu_n_hz));
    curve.metadata.emplace_back("tau_evolve_s", detail::fmt_g(tau_evolve_s));
    detail::append_system_metadata(curve, system, relax);
    curve.validate();
    return curve;
}

// Signal after the complete experiment versus evolution time: the surviving
// singlet population decays as exp(-tau_evolve/TS) under the evolve channel.
inline ScanCurve evolve_scan(const SpinSystem& system, double nu_n_hz, double tau_sl_s,
                             const std::vector<double>& tau_evolve_grid_s,
                             const RelaxationParams& relax, double lock_phase_rad = 0.0,
                             unsigned threads = 1) {
    if (tau_evolve_grid_s.empty()) throw std::invalid_argument("evolve_scan: empty grid");
    std::vector<double> y = parallel_map<double>(
        tau_evolve_grid_s.size(),
        [&](size_t i) {
            const auto seq =
                build_slic(nu_n_hz, lock_phase_rad, tau_sl_s, tau_evolve_grid_s[i], true);
            const Trajectory tr = execute(seq, system, relax);
            return tr.final_point.mx / tr.reference_mx;
        },
        threads);
    ScanCurve curve;
    curve.type = ScanType::evolve;
    curve.x_label = "tau_evolve_s";
    curve.y_label = "signal";
    curve.x = tau_evolve_grid_s;
    curve.y = std::move(y);
    curve.metadata.emplace_back("nu_n_hz", detail::fmt_g(nu_n_hz));
    curve.metadata.emplace_back("tau_sl_s", detail::fmt_g(tau_sl_s));
    detail::append_system_metadata(curve, system, relax);
    curve.validate();
    return curve;
}

// Converts a round-trip transfer fraction f (ceiling 0.5) into the
// per-application efficiency sqrt(f/0.5), assuming two identical transfers.
inline double round_trip_to_efficiency(double f) {
    if (f > 0.5 + 1e-12)
        throw std::invalid_argument("round-trip fraction above the 0.5 ceiling is unphysical");
    if (f < 0.0) f = 0.0;
    return std::sqrt(f / 0.5);
}

// Removes the evolution decay from an evolve curve and reports the
// per-application efficiency of the extrapolated tau_evolve = 0 fraction.
inline double extrapolated_efficiency(const ScanCurve& curve, double ts_s) {
    if (!(ts_s > 0)) throw std::invalid_argument("extrapolated_efficiency: TS must be positive");
    if (curve.type != ScanType::evolve)
        throw std::invalid_argument("extrapolated_efficiency: needs an evolve curve");
    if (curve.x.empty()) throw std::invalid_argument("extrapolated_efficiency: empty curve");
    double f = 0.0;
    for (size_t i = 0; i < curve.x.size(); ++i)
        f += curve.y[i] * std::exp(curve.x[i] / ts_s);
    f /= double(curve.x.size());
    return round_trip_to_efficiency(f);
}

// Seeded additive Gaussian noise, for exercising the fitting pipeline.
inline ScanCurve add_noise(const ScanCurve& curve, double sigma, uint64_t seed) {
    if (sigma < 0) throw std::invalid_argument("add_noise: negative sigma");
    ScanCurve out = curve;
    if (sigma == 0) return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, sigma);
    for (auto& v : out.y) v += gauss(rng);
    std::ostringstream meta;
    meta << sigma;
    out.metadata.emplace_back("noise_sigma", meta.str());
    out.metadata.emplace_back("seed", std::to_string(seed));
    return out;
}

}  // namespace slicsim
