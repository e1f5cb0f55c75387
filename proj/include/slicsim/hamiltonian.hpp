#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "slicsim/spin_ops.hpp"
#include "slicsim/spin_system.hpp"

namespace slicsim {

// Rotating-frame Hamiltonian in angular frequency units (rad/s):
//   H = 2*pi * [ sum_{i<j} J_ij I_i.I_j + sum_i offset_i I_iz
//                + nu_n sum_i (I_ix cos(phase) + I_iy sin(phase)) ]
// nu_n is the spin-lock nutation frequency in Hz; nu_n = 0 gives free
// evolution under couplings and offsets alone.
inline Eigen::MatrixXcd hamiltonian(const SpinSystem& sys, double nu_n_hz,
                                    double phase_rad = 0.0) {
    if (nu_n_hz < 0.0)
        throw std::invalid_argument("hamiltonian: nutation frequency must be >= 0");
    const int n = sys.n_spins;
    const int d = sys.dim();
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(d, d);

    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (sys.j_hz(i, j) == 0.0) continue;
            h += sys.j_hz(i, j) *
                 (single_spin_operator(n, i, Axis::x) * single_spin_operator(n, j, Axis::x) +
                  single_spin_operator(n, i, Axis::y) * single_spin_operator(n, j, Axis::y) +
                  single_spin_operator(n, i, Axis::z) * single_spin_operator(n, j, Axis::z));
        }
    }
    for (int i = 0; i < n; ++i)
        h += sys.offsets_hz[i] * single_spin_operator(n, i, Axis::z);
    if (nu_n_hz != 0.0)
        h += nu_n_hz * (std::cos(phase_rad) * collective_operator(n, Axis::x) +
                        std::sin(phase_rad) * collective_operator(n, Axis::y));
    return 2.0 * std::numbers::pi * h;
}

// Gap between the two lowest eigenvalues, reported in Hz.
inline double lowest_gap_hz(const Eigen::MatrixXcd& h_angular) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h_angular, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return (ev(1) - ev(0)) / (2.0 * std::numbers::pi);
}

// Magnitude of the matrix element connecting the pair singlet to the dressed
// |T-x> triplet state (the m_x = -1 eigenstate of the lock term), in Hz.
// This is the element that opens the spin-lock induced crossing.
inline double singlet_coupling_hz(const SpinSystem& sys, double nu_n_hz,
                                  double phase_rad = 0.0) {
    if (sys.n_spins != 2)
        throw std::invalid_argument("singlet_coupling_hz: two-spin systems only");
    const Eigen::MatrixXcd h = hamiltonian(sys, nu_n_hz, phase_rad);
    const Eigen::MatrixXcd u = singlet_triplet_basis(2, 0, 1);
    const Eigen::MatrixXcd h_st = u.adjoint() * h * u;  // [T+, T0, T-, S0]
    // dressed triplet states for a lock along phase_rad; for phase 0 these are
    // the x-basis combinations (T+ -/+ sqrt2 e^{i phase} T0-ish); build them by
    // diagonalizing the 3x3 triplet block of the lock generator.
    Eigen::Matrix3cd fx_triplet;
    const double s2 = 1.0 / std::sqrt(2.0);
    const complexd e = std::polar(1.0, phase_rad);
    fx_triplet << 0.0, s2 * std::conj(e), 0.0,
                  s2 * e, 0.0, s2 * std::conj(e),
                  0.0, s2 * e, 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(fx_triplet);
    const Eigen::Vector3cd t_minus = es.eigenvectors().col(0);  // m = -1
    Eigen::Vector4cd tm4 = Eigen::Vector4cd::Zero();
    tm4.head<3>() = t_minus;
    Eigen::Vector4cd s0 = Eigen::Vector4cd::Zero();
    s0(3) = 1.0;
    const complexd elem = (s0.adjoint() * h_st * tm4)(0, 0);
    return std::abs(elem) / (2.0 * std::numbers::pi);
}

}  // namespace slicsim
