#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

#include "slicsim/spin_ops.hpp"
#include "slicsim/spin_system.hpp"

namespace slicsim {

// Full density matrix of the spin ensemble, stored as
// rho = 1/2^n + deviation. Unitary operations keep it Hermitian,
// unit-trace and positive semidefinite.
struct DensityState {
    int n_spins;
    Eigen::MatrixXcd rho;

    DensityState(int n, Eigen::MatrixXcd m) : n_spins(n), rho(std::move(m)) {
        if (rho.rows() != dim() || rho.cols() != dim())
            throw std::invalid_argument("DensityState: matrix dimension mismatch");
    }

    int dim() const { return 1 << n_spins; }

    Eigen::MatrixXcd deviation() const {
        return rho - Eigen::MatrixXcd::Identity(dim(), dim()) / double(dim());
    }

    // Checks Hermiticity (1e-12 relative), unit trace (1e-12) and
    // eigenvalues >= -1e-10. Throws on violation.
    void validate() const {
        const double scale = std::max(1.0, rho.norm());
        if ((rho - rho.adjoint()).norm() > 1e-12 * scale)
            throw std::runtime_error("DensityState: not Hermitian");
        if (std::abs(rho.trace() - 1.0) > 1e-12)
            throw std::runtime_error("DensityState: trace != 1");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-10)
            throw std::runtime_error("DensityState: negative eigenvalue");
    }
};

// High-temperature thermal state 1/2^n + eps * Fz. eps must keep the state
// positive; the default is safely inside that bound for n <= 3.
inline DensityState thermal_state(int n_spins, double eps = 0.05) {
    const int d = 1 << n_spins;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Identity(d, d) / double(d);
    rho += eps * collective_operator(n_spins, Axis::z);
    return DensityState(n_spins, std::move(rho));
}

inline DensityState maximally_mixed(int n_spins) {
    const int d = 1 << n_spins;
    return DensityState(n_spins, Eigen::MatrixXcd::Identity(d, d) / double(d));
}

namespace detail {

// exp(-i H t) for Hermitian H via eigendecomposition; exact at these sizes.
inline Eigen::MatrixXcd unitary_of(const Eigen::MatrixXcd& h_angular, double t) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h_angular);
    Eigen::VectorXcd phases(es.eigenvalues().size());
    for (int i = 0; i < phases.size(); ++i)
        phases(i) = std::polar(1.0, -es.eigenvalues()(i) * t);
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

// Coherent evolution rho' = U rho U+ with U = exp(-i H t), H in rad/s.
inline DensityState propagate(const DensityState& state, const Eigen::MatrixXcd& h_angular,
                              double t_s) {
    if (t_s < 0.0) throw std::invalid_argument("propagate: negative time");
    if (h_angular.rows() != state.dim() || h_angular.cols() != state.dim())
        throw std::invalid_argument("propagate: dimension mismatch");
    if ((h_angular - h_angular.adjoint()).norm() > 1e-9 * std::max(1.0, h_angular.norm()))
        throw std::invalid_argument("propagate: Hamiltonian not Hermitian");
    if (t_s == 0.0) return state;
    const Eigen::MatrixXcd u = detail::unitary_of(h_angular, t_s);
    return DensityState(state.n_spins, u * state.rho * u.adjoint());
}

// Instantaneous hard pulse: rotation of all spins by `flip` about the
// in-plane axis at `phase` (0 = x, pi/2 = y). U = exp(-i flip (Fx cos + Fy sin)),
// so a 90 degree pulse of phase y takes z polarization to +x.
inline DensityState apply_hard_pulse(const DensityState& state, double flip_rad,
                                     double phase_rad) {
    const int n = state.n_spins;
    const Eigen::MatrixXcd gen = std::cos(phase_rad) * collective_operator(n, Axis::x) +
                                 std::sin(phase_rad) * collective_operator(n, Axis::y);
    const Eigen::MatrixXcd u = detail::unitary_of(gen, flip_rad);
    return DensityState(n, u * state.rho * u.adjoint());
}

// Tr(rho O); the imaginary part must vanish for Hermitian observables.
inline double expectation(const DensityState& state, const Eigen::MatrixXcd& obs) {
    if (obs.rows() != state.dim() || obs.cols() != state.dim())
        throw std::invalid_argument("expectation: dimension mismatch");
    const complexd v = (state.rho * obs).trace();
    if (std::abs(v.imag()) > 1e-10 * std::max(1.0, std::abs(v.real())))
        throw std::runtime_error("expectation: non-real expectation value");
    return v.real();
}

inline double expectation(const DensityState& state, const Observable& obs) {
    return expectation(state, obs.matrix);
}

// Free-evolution relaxation channel, applied in the singlet/triplet basis of
// the pair (i, j): the singlet deviation populations decay with TS, all other
// deviation populations with T1, and every coherence with the singlet-triplet
// coherence lifetime. Deviations decay toward the maximally mixed background;
// polarization leaving a channel is lost, so the deviation trace drains
// unless all lifetimes are equal. Hermiticity and positivity are preserved.
inline DensityState apply_evolve_relaxation(const DensityState& state,
                                            const RelaxationParams& relax,
                                            int i, int j, double t_s) {
    if (t_s < 0.0) throw std::invalid_argument("apply_evolve_relaxation: negative time");
    relax.validate();
    if (t_s == 0.0) return state;
    const int n = state.n_spins;
    const int d = state.dim();
    const int n_spect = 1 << (n - 2);
    const Eigen::MatrixXcd u = singlet_triplet_basis(n, i, j);
    Eigen::MatrixXcd dev = u.adjoint() * state.deviation() * u;

    const double f_t1 = std::exp(-t_s / relax.t1_s);
    const double f_ts = std::exp(-t_s / relax.ts_s);
    const double f_coh = std::exp(-t_s / relax.t_st_coherence_s);
    auto is_singlet = [&](int idx) { return idx >= 3 * n_spect; };
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
            if (r == c)
                dev(r, c) *= is_singlet(r) ? f_ts : f_t1;
            else
                dev(r, c) *= f_coh;
        }
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Identity(d, d) / double(d) + u * dev * u.adjoint();
    return DensityState(n, std::move(rho));
}

// Uniform damping of the whole deviation, used for the optional lock-damping
// channel. Commutes with any unitary, so it can be applied once per element.
inline DensityState apply_uniform_damping(const DensityState& state, double lifetime_s,
                                          double t_s) {
    if (!(lifetime_s > 0.0))
        throw std::invalid_argument("apply_uniform_damping: lifetime must be positive");
    const int d = state.dim();
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Identity(d, d) / double(d) +
                           std::exp(-t_s / lifetime_s) * state.deviation();
    return DensityState(state.n_spins, std::move(rho));
}

// Magnitude of the singlet-triplet coherence block of the deviation for the
// pair (i, j): sqrt(sum |<S0 x s| dev |T_k x s'>|^2).
inline double st_coherence_magnitude(const DensityState& state, int i, int j) {
    const int n = state.n_spins;
    const int n_spect = 1 << (n - 2);
    const Eigen::MatrixXcd u = singlet_triplet_basis(n, i, j);
    const Eigen::MatrixXcd dev = u.adjoint() * state.deviation() * u;
    return dev.block(3 * n_spect, 0, n_spect, 3 * n_spect).norm();
}

}  // namespace slicsim
