#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "slicsim/scan_curve.hpp"

namespace slicsim {

// One damped-Rabi polarization transfer: source and destination populations
// coupled through a coherence, each with its own lifetime.
//   dPa/dt = -Pa/T_src - w*c
//   dPb/dt = -Pb/T_dst + w*c
//   dc/dt  = -c/T_coh + (w/2)(Pa - Pb),   w = 2*pi*rabi_freq
// The half period 1/(2*rabi_freq) moves all of Pa into Pb when undamped.
struct TransferStage {
    double rabi_freq_hz;
    double t_source_s;
    double t_dest_s;
    double t_coherence_s;
    double duration_s;

    void validate() const {
        if (!(rabi_freq_hz > 0) || !(t_source_s > 0) || !(t_dest_s > 0) ||
            !(t_coherence_s > 0) || !(duration_s >= 0) ||
            !std::isfinite(rabi_freq_hz) || !std::isfinite(duration_s))
            throw std::invalid_argument("TransferStage: parameters must be positive and finite");
    }
};

struct StageState {
    double p_source;
    double p_dest;
    double coherence;
};

namespace detail {

inline StageState stage_derivative(const StageState& s, const TransferStage& st) {
    const double w = 2.0 * std::numbers::pi * st.rabi_freq_hz;
    return {-s.p_source / st.t_source_s - w * s.coherence,
            -s.p_dest / st.t_dest_s + w * s.coherence,
            -s.coherence / st.t_coherence_s + 0.5 * w * (s.p_source - s.p_dest)};
}

inline StageState axpy(const StageState& a, double h, const StageState& b) {
    return {a.p_source + h * b.p_source, a.p_dest + h * b.p_dest,
            a.coherence + h * b.coherence};
}

}  // namespace detail

// Classical fixed-step RK4 with step <= min(1/rabi_freq, lifetimes)/100.
// step_scale < 1 refines the grid (used by the convergence check).
inline StageState run_stage(double p_source, const TransferStage& stage,
                            double step_scale = 1.0,
                            const std::function<void(const StageState&)>& on_step = nullptr) {
    stage.validate();
    if (p_source < 0.0 || p_source > 1.0)
        throw std::invalid_argument("run_stage: p_source must lie in [0, 1]");
    const double h_max = step_scale *
        std::min({1.0 / stage.rabi_freq_hz, stage.t_source_s, stage.t_dest_s,
                  stage.t_coherence_s}) / 100.0;
    if (!(h_max > 0.0) || !std::isfinite(h_max))
        throw std::runtime_error("run_stage: step size underflow");
    if (stage.duration_s == 0.0) return {p_source, 0.0, 0.0};
    const double n_steps_real = std::ceil(stage.duration_s / h_max);
    if (n_steps_real > 5e8) throw std::runtime_error("run_stage: step size underflow");
    const long n = static_cast<long>(n_steps_real);
    const double h = stage.duration_s / double(n);

    StageState s{p_source, 0.0, 0.0};
    if (on_step) on_step(s);
    for (long i = 0; i < n; ++i) {
        const StageState k1 = detail::stage_derivative(s, stage);
        const StageState k2 = detail::stage_derivative(detail::axpy(s, h / 2, k1), stage);
        const StageState k3 = detail::stage_derivative(detail::axpy(s, h / 2, k2), stage);
        const StageState k4 = detail::stage_derivative(detail::axpy(s, h, k3), stage);
        s = {s.p_source + h / 6 * (k1.p_source + 2 * k2.p_source + 2 * k3.p_source + k4.p_source),
             s.p_dest + h / 6 * (k1.p_dest + 2 * k2.p_dest + 2 * k3.p_dest + k4.p_dest),
             s.coherence +
                 h / 6 * (k1.coherence + 2 * k2.coherence + 2 * k3.coherence + k4.coherence)};
        if (on_step) on_step(s);
    }
    return s;
}

inline double harmonic_mean(double a, double b) { return 2.0 / (1.0 / a + 1.0 / b); }

// Transfer efficiency of a matched spin-lock: one stage from transverse
// polarization (lifetime T1) to the singlet (lifetime TS) at Rabi frequency
// dnu/sqrt(2). Half of unit polarization participates; reaching the 50%
// ceiling counts as efficiency 1.
inline double slic_efficiency(double t1_s, double ts_s, double dnu_hz,
                              bool optimize_duration = false, double step_scale = 1.0) {
    if (!(t1_s > 0) || !(ts_s > 0) || !(dnu_hz > 0))
        throw std::invalid_argument("slic_efficiency: arguments must be positive");
    TransferStage stage{dnu_hz / std::sqrt(2.0), t1_s, ts_s, harmonic_mean(t1_s, ts_s),
                        1.0 / (std::sqrt(2.0) * dnu_hz)};
    auto eval = [&](double dur) {
        TransferStage st = stage;
        st.duration_s = dur;
        return 2.0 * run_stage(0.5, st, step_scale).p_dest;
    };
    if (!optimize_duration) return eval(stage.duration_s);
    // damping shifts the optimum shorter; golden-section on [0, ideal]
    double lo = 0.0, hi = stage.duration_s * 1.05;
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
    double fa = eval(a), fb = eval(b);
    for (int it = 0; it < 60 && (hi - lo) > 1e-6 * stage.duration_s; ++it) {
        if (fa < fb) {
            lo = a; a = b; fa = fb;
            b = lo + phi * (hi - lo); fb = eval(b);
        } else {
            hi = b; b = a; fb = fa;
            a = hi - phi * (hi - lo); fa = eval(a);
        }
    }
    return std::max(fa, fb);
}

// Two-step model of the echo-train transfer: transverse polarization
// (lifetime T1) to the singlet-triplet coherence (lifetime T1/3) over
// pi/(4 dnu), then coherence to singlet population (lifetime TS) over
// pi/(8 dnu), with a lossless conversion between the stages. Passing J uses
// the echo-train timing 2*tau*n instead of the asymptotic durations.
inline double m2s_efficiency(double t1_s, double ts_s, double dnu_hz,
                             std::optional<double> j_hz = std::nullopt,
                             double step_scale = 1.0) {
    if (!(t1_s > 0) || !(ts_s > 0) || !(dnu_hz > 0))
        throw std::invalid_argument("m2s_efficiency: arguments must be positive");
    double dur1 = std::numbers::pi / (4.0 * dnu_hz);
    double dur2 = std::numbers::pi / (8.0 * dnu_hz);
    if (j_hz) {
        if (!(*j_hz > dnu_hz))
            throw std::invalid_argument("m2s_efficiency: requires J > dnu");
        const double nu_e = std::hypot(*j_hz, dnu_hz);
        const double tau = 1.0 / (4.0 * nu_e);
        const double n1 = std::numbers::pi / (2.0 * std::atan(dnu_hz / *j_hz));
        dur1 = 2.0 * tau * n1;
        dur2 = tau * n1;
    }
    const double t_coh = t1_s / 3.0;
    TransferStage s1{1.0 / (2.0 * dur1), t1_s, t_coh, harmonic_mean(t1_s, t_coh), dur1};
    TransferStage s2{1.0 / (2.0 * dur2), t_coh, ts_s, harmonic_mean(t_coh, ts_s), dur2};
    const StageState r1 = run_stage(0.5, s1, step_scale);
    const StageState r2 = run_stage(std::clamp(r1.p_dest, 0.0, 1.0), s2, step_scale);
    return 2.0 * r2.p_dest;
}

enum class SequenceKind { slic, m2s };

// Efficiency as a function of the dimensionless product T1*dnu at fixed
// TS/T1. The model is scale invariant, so dnu is fixed at 1 Hz and T1 swept.
inline ScanCurve efficiency_curve(SequenceKind kind, const std::vector<double>& t1_dnu_grid,
                                  double ts_over_t1, bool optimize_duration = false) {
    if (t1_dnu_grid.empty())
        throw std::invalid_argument("efficiency_curve: empty grid");
    ScanCurve curve;
    curve.type = ScanType::efficiency;
    curve.x_label = "t1_dnu";
    curve.y_label = kind == SequenceKind::slic ? "eff_slic" : "eff_m2s";
    curve.metadata.emplace_back("ts_over_t1", std::to_string(ts_over_t1));
    const double dnu = 1.0;
    for (double t1dnu : t1_dnu_grid) {
        if (!(t1dnu > 0))
            throw std::invalid_argument("efficiency_curve: grid values must be positive");
        const double t1 = t1dnu / dnu;
        const double ts = ts_over_t1 * t1;
        curve.x.push_back(t1dnu);
        curve.y.push_back(kind == SequenceKind::slic
                              ? slic_efficiency(t1, ts, dnu, optimize_duration)
                              : m2s_efficiency(t1, ts, dnu));
    }
    curve.validate();
    return curve;
}

}  // namespace slicsim
