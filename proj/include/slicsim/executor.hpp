#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "slicsim/density_state.hpp"
#include "slicsim/hamiltonian.hpp"
#include "slicsim/sequence.hpp"
#include "slicsim/spin_ops.hpp"

namespace slicsim {

// Raw deviation expectations at one instant. Populations are signed
// deviations from the maximally mixed background.
struct TrajectoryPoint {
    double t_s = 0.0;
    double mx = 0.0, my = 0.0, mz = 0.0;
    double p_s0 = 0.0, p_t0 = 0.0, p_tp = 0.0, p_tm = 0.0;
    double st_coherence = 0.0;
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;
    TrajectoryPoint final_point;
    DensityState final_state;
    // Transverse deviation magnitude right after the first hard pulse; the
    // normalization reference for reported observables (0 if no pulse fired).
    double initial_transverse = 0.0;
    // Signed Mx right after the first hard pulse (reference signal for scans).
    double reference_mx = 0.0;
};

namespace detail {

struct ObservableSet {
    Eigen::MatrixXcd fx, fy, fz, p_s0, p_t0, p_tp, p_tm;
    int pair_i, pair_j;
};

inline ObservableSet make_observable_set(int n, int i, int j) {
    return ObservableSet{collective_operator(n, Axis::x),
                         collective_operator(n, Axis::y),
                         collective_operator(n, Axis::z),
                         singlet_projector(n, i, j),
                         triplet_projector(n, i, j, 1),
                         triplet_projector(n, i, j, 0),
                         triplet_projector(n, i, j, 2),
                         i,
                         j};
}

inline TrajectoryPoint measure(const DensityState& state, const ObservableSet& obs, double t) {
    const Eigen::MatrixXcd dev = state.deviation();
    auto dot = [&](const Eigen::MatrixXcd& o) { return (dev * o).trace().real(); };
    TrajectoryPoint p;
    p.t_s = t;
    p.mx = dot(obs.fx);
    p.my = dot(obs.fy);
    p.mz = dot(obs.fz);
    p.p_s0 = dot(obs.p_s0);
    p.p_t0 = dot(obs.p_t0);
    p.p_tp = dot(obs.p_tp);
    p.p_tm = dot(obs.p_tm);
    p.st_coherence = st_coherence_magnitude(state, obs.pair_i, obs.pair_j);
    return p;
}

}  // namespace detail

// Runs a sequence on a spin system from the thermal state. Hard pulses are
// instantaneous; spin locks and delays evolve coherently under the matching
// Hamiltonian; evolve stages apply the relaxation channel only (identity
// without relaxation parameters). Observables are recorded at the sequence's
// record points for the designated pair (default spins 0 and 1).
inline Trajectory execute(const PulseSequence& seq, const SpinSystem& system,
                          const std::optional<RelaxationParams>& relax = std::nullopt,
                          int pair_i = 0, int pair_j = 1, double thermal_eps = 0.05) {
    seq.validate();
    system.validate();
    const int n = system.n_spins;
    if (pair_i < 0 || pair_j < 0 || pair_i >= n || pair_j >= n || pair_i == pair_j)
        throw std::invalid_argument("execute: invalid pair");

    const auto obs = detail::make_observable_set(n, pair_i, pair_j);
    const auto elements = expand_elements(seq.elements);

    Trajectory out{.points = {}, .final_point = {}, .final_state = thermal_state(n, thermal_eps),
                   .initial_transverse = 0.0, .reference_mx = 0.0};
    DensityState state = out.final_state;
    bool first_pulse_seen = false;

    double t = 0.0;
    size_t next_record = 0;
    const auto& grid = seq.record_points_s;

    // Samples at an element boundary capture the post-element state; a sample
    // coinciding with a hard pulse therefore sees the post-pulse state when
    // the pulse opens the sequence and the pre-pulse state otherwise.
    auto record_if_due = [&](double t_now) {
        while (next_record < grid.size() && grid[next_record] <= t_now + 1e-15) {
            out.points.push_back(detail::measure(state, obs, grid[next_record]));
            ++next_record;
        }
    };

    for (const auto& el : elements) {
        if (const auto* pulse = std::get_if<HardPulse>(&el)) {
            state = apply_hard_pulse(state, pulse->flip_rad, pulse->phase_rad);
            if (!first_pulse_seen) {
                first_pulse_seen = true;
                const double mx = expectation(state, obs.fx);
                const double my = expectation(state, obs.fy);
                out.initial_transverse = std::hypot(mx, my);
                out.reference_mx = mx;
            }
            continue;
        }
        const double dur = element_duration(el);
        if (dur == 0.0) continue;
        const double t_end = t + dur;

        if (std::holds_alternative<Evolve>(el)) {
            // sample inside the stage: the channel composes exactly in time
            while (next_record < grid.size() && grid[next_record] < t_end - 1e-15) {
                const double dt = grid[next_record] - t;
                DensityState sampled = relax
                    ? apply_evolve_relaxation(state, *relax, pair_i, pair_j, dt)
                    : state;
                out.points.push_back(detail::measure(sampled, obs, grid[next_record]));
                ++next_record;
            }
            if (relax) state = apply_evolve_relaxation(state, *relax, pair_i, pair_j, dur);
        } else {
            double nu_n = 0.0, phase = 0.0;
            bool is_lock = false;
            if (const auto* lock = std::get_if<SpinLock>(&el)) {
                nu_n = lock->nu_n_hz;
                phase = lock->phase_rad;
                is_lock = true;
            }
            const Eigen::MatrixXcd h = hamiltonian(system, nu_n, phase);
            const std::optional<double> damping =
                (is_lock && relax) ? relax->lock_damping_s : std::nullopt;
            while (next_record < grid.size() && grid[next_record] < t_end - 1e-15) {
                const double dt = grid[next_record] - t;
                DensityState sampled = propagate(state, h, dt);
                if (damping) sampled = apply_uniform_damping(sampled, *damping, dt);
                out.points.push_back(detail::measure(sampled, obs, grid[next_record]));
                ++next_record;
            }
            state = propagate(state, h, dur);
            if (damping) state = apply_uniform_damping(state, *damping, dur);
        }
        t = t_end;
        record_if_due(t);
    }
    // any trailing grid points at the final time
    while (next_record < grid.size()) {
        out.points.push_back(detail::measure(state, obs, grid[next_record]));
        ++next_record;
    }
    out.final_point = detail::measure(state, obs, t);
    out.final_state = state;
    return out;
}

}  // namespace slicsim
