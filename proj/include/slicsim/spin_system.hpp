#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace slicsim {

// A system of n spin-1/2 nuclei in the rotating frame: per-spin resonance
// offsets (Hz, relative to the carrier) and a symmetric scalar-coupling
// matrix J_ij (Hz, zero diagonal). Only n = 2 and n = 3 are supported.
struct SpinSystem {
    int n_spins = 2;
    std::vector<double> offsets_hz;
    Eigen::MatrixXd j_hz;

    SpinSystem(int n, std::vector<double> offsets, Eigen::MatrixXd j)
        : n_spins(n), offsets_hz(std::move(offsets)), j_hz(std::move(j)) {
        validate();
    }

    // Nearly-equivalent pair with carrier at the mean shift: offsets +-dnu/2.
    static SpinSystem pair(double j_hz_, double dnu_hz) {
        Eigen::MatrixXd j(2, 2);
        j << 0.0, j_hz_, j_hz_, 0.0;
        return SpinSystem(2, {dnu_hz / 2.0, -dnu_hz / 2.0}, std::move(j));
    }

    // Pair plus one spectator spin coupled to both members.
    static SpinSystem pair_with_spectator(double j_hz_, double dnu_hz,
                                          double j13_hz, double j23_hz,
                                          double offset3_hz) {
        Eigen::MatrixXd j(3, 3);
        j << 0.0, j_hz_, j13_hz,
             j_hz_, 0.0, j23_hz,
             j13_hz, j23_hz, 0.0;
        return SpinSystem(3, {dnu_hz / 2.0, -dnu_hz / 2.0, offset3_hz}, std::move(j));
    }

    int dim() const { return 1 << n_spins; }

    void validate() const {
        if (n_spins != 2 && n_spins != 3)
            throw std::invalid_argument("SpinSystem: n_spins must be 2 or 3");
        if (static_cast<int>(offsets_hz.size()) != n_spins)
            throw std::invalid_argument("SpinSystem: offsets size mismatch");
        if (j_hz.rows() != n_spins || j_hz.cols() != n_spins)
            throw std::invalid_argument("SpinSystem: J matrix size mismatch");
        for (double v : offsets_hz)
            if (!std::isfinite(v))
                throw std::invalid_argument("SpinSystem: non-finite offset");
        for (int i = 0; i < n_spins; ++i) {
            if (j_hz(i, i) != 0.0)
                throw std::invalid_argument("SpinSystem: J diagonal must be zero");
            for (int k = 0; k < n_spins; ++k) {
                if (!std::isfinite(j_hz(i, k)))
                    throw std::invalid_argument("SpinSystem: non-finite coupling");
                if (j_hz(i, k) != j_hz(k, i))
                    throw std::invalid_argument("SpinSystem: J matrix must be symmetric");
            }
        }
    }
};

// Phenomenological lifetimes (seconds). T2 defaults to T1, the
// singlet-triplet coherence lifetime to T1/3. An optional uniform damping
// time for spin-lock periods is off unless set.
struct RelaxationParams {
    double t1_s;
    double t2_s;
    double ts_s;
    double t_st_coherence_s;
    std::optional<double> lock_damping_s;

    RelaxationParams(double t1, double ts,
                     std::optional<double> t2 = std::nullopt,
                     std::optional<double> t_st_coh = std::nullopt,
                     std::optional<double> lock_damping = std::nullopt)
        : t1_s(t1),
          t2_s(t2.value_or(t1)),
          ts_s(ts),
          t_st_coherence_s(t_st_coh.value_or(t1 / 3.0)),
          lock_damping_s(lock_damping) {
        validate();
    }

    void validate() const {
        if (!(t1_s > 0.0) || !(t2_s > 0.0) || !(ts_s > 0.0) || !(t_st_coherence_s > 0.0))
            throw std::invalid_argument("RelaxationParams: lifetimes must be positive");
        if (lock_damping_s && !(*lock_damping_s > 0.0))
            throw std::invalid_argument("RelaxationParams: lock damping time must be positive");
    }
};

}  // namespace slicsim
