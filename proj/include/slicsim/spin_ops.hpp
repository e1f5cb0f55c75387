#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "slicsim/spin_system.hpp"

namespace slicsim {

using complexd = std::complex<double>;

enum class Axis { x, y, z };

namespace detail {

inline Eigen::Matrix2cd half_spin(Axis axis) {
    Eigen::Matrix2cd m;
    switch (axis) {
        case Axis::x: m << 0.0, 0.5, 0.5, 0.0; break;
        case Axis::y: m << 0.0, complexd(0, -0.5), complexd(0, 0.5), 0.0; break;
        case Axis::z: m << 0.5, 0.0, 0.0, -0.5; break;
    }
    return m;
}

}  // namespace detail

// Angular-momentum operator I_k(axis) for spin k (0-based) embedded in the
// 2^n product space by Kronecker construction.
inline Eigen::MatrixXcd single_spin_operator(int n_spins, int k, Axis axis) {
    if (k < 0 || k >= n_spins)
        throw std::invalid_argument("single_spin_operator: spin index out of range");
    Eigen::MatrixXcd op = Eigen::MatrixXcd::Identity(1, 1);
    const Eigen::Matrix2cd id2 = Eigen::Matrix2cd::Identity();
    const Eigen::Matrix2cd s = detail::half_spin(axis);
    for (int i = 0; i < n_spins; ++i) {
        const Eigen::Matrix2cd& factor = (i == k) ? s : id2;
        Eigen::MatrixXcd next(op.rows() * 2, op.cols() * 2);
        for (int r = 0; r < op.rows(); ++r)
            for (int c = 0; c < op.cols(); ++c)
                next.block(2 * r, 2 * c, 2, 2) = op(r, c) * factor;
        op = std::move(next);
    }
    return op;
}

// Collective F_axis = sum_k I_k(axis).
inline Eigen::MatrixXcd collective_operator(int n_spins, Axis axis) {
    const int d = 1 << n_spins;
    Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(d, d);
    for (int k = 0; k < n_spins; ++k) f += single_spin_operator(n_spins, k, axis);
    return f;
}

// Unitary basis change from the product basis to the singlet/triplet basis
// of the pair (i, j), 0-based. Columns are ordered block-major
// [T+, T0, T-, S0], each block tensored with the spectator product states
// (natural binary order) when n = 3.
inline Eigen::MatrixXcd singlet_triplet_basis(int n_spins, int i, int j) {
    if (i == j || i < 0 || j < 0 || i >= n_spins || j >= n_spins)
        throw std::invalid_argument("singlet_triplet_basis: invalid pair");
    const int d = 1 << n_spins;
    const double s2 = 1.0 / std::sqrt(2.0);
    // pair states as (bit_i, bit_j, amplitude) lists; bit 0 = up
    struct Component { int bi, bj; double amp; };
    const std::vector<std::vector<Component>> pair_states = {
        {{0, 0, 1.0}},               // T+
        {{0, 1, s2}, {1, 0, s2}},    // T0
        {{1, 1, 1.0}},               // T-
        {{0, 1, s2}, {1, 0, -s2}},   // S0
    };
    std::vector<int> others;
    for (int k = 0; k < n_spins; ++k)
        if (k != i && k != j) others.push_back(k);
    const int n_spect = 1 << others.size();

    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(d, d);
    int col = 0;
    for (const auto& st : pair_states) {
        for (int spect = 0; spect < n_spect; ++spect, ++col) {
            for (const auto& comp : st) {
                int idx = 0;
                idx |= comp.bi << (n_spins - 1 - i);
                idx |= comp.bj << (n_spins - 1 - j);
                for (size_t m = 0; m < others.size(); ++m)
                    idx |= ((spect >> (others.size() - 1 - m)) & 1) << (n_spins - 1 - others[m]);
                u(idx, col) = comp.amp;
            }
        }
    }
    return u;
}

// Projector onto the singlet manifold of the pair (rank 2^(n-2)).
inline Eigen::MatrixXcd singlet_projector(int n_spins, int i, int j) {
    const Eigen::MatrixXcd u = singlet_triplet_basis(n_spins, i, j);
    const int n_spect = 1 << (n_spins - 2);
    const auto block = u.middleCols(3 * n_spect, n_spect);
    return block * block.adjoint();
}

// Projector onto one triplet manifold of the pair; which = 0 (T+), 1 (T0), 2 (T-).
inline Eigen::MatrixXcd triplet_projector(int n_spins, int i, int j, int which) {
    if (which < 0 || which > 2)
        throw std::invalid_argument("triplet_projector: which must be 0, 1 or 2");
    const Eigen::MatrixXcd u = singlet_triplet_basis(n_spins, i, j);
    const int n_spect = 1 << (n_spins - 2);
    const auto block = u.middleCols(which * n_spect, n_spect);
    return block * block.adjoint();
}

// A labeled Hermitian operator whose expectation value is reported by the
// sequence executor.
struct Observable {
    std::string label;
    Eigen::MatrixXcd matrix;
};

// The standard observable set for a designated pair: collective Mx, My, Mz
// and the four pair-basis population projectors.
inline std::vector<Observable> standard_observables(int n_spins, int i, int j) {
    std::vector<Observable> obs;
    obs.push_back({"Mx", collective_operator(n_spins, Axis::x)});
    obs.push_back({"My", collective_operator(n_spins, Axis::y)});
    obs.push_back({"Mz", collective_operator(n_spins, Axis::z)});
    obs.push_back({"P_S0", singlet_projector(n_spins, i, j)});
    obs.push_back({"P_T0", triplet_projector(n_spins, i, j, 1)});
    obs.push_back({"P_T+", triplet_projector(n_spins, i, j, 0)});
    obs.push_back({"P_T-", triplet_projector(n_spins, i, j, 2)});
    return obs;
}

}  // namespace slicsim
