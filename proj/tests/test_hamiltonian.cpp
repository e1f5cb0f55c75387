#include <catch2/catch.hpp>

#include <numbers>

#include "slicsim/hamiltonian.hpp"

using namespace slicsim;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TEST_CASE("rotating-frame Hamiltonian structure", "[hamiltonian]") {
    SECTION("matched lock makes the singlet degenerate with the lower dressed triplet") {
        // J/4 - nu_n = -3J/4 exactly when nu_n = J
        const auto sys = SpinSystem::pair(17.5, 0.0);
        const auto h = hamiltonian(sys, 17.5, 0.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
        const double e0 = es.eigenvalues()(0) / kTwoPi;
        const double e1 = es.eigenvalues()(1) / kTwoPi;
        REQUIRE(e0 == Approx(-3.0 * 17.5 / 4.0).epsilon(1e-12));
        REQUIRE(e1 == Approx(e0).margin(1e-10));
    }

    SECTION("avoided crossing splits by dnu/sqrt(2)") {
        const auto sys = SpinSystem::pair(17.5, 2.15);
        const auto h = hamiltonian(sys, 17.5, 0.0);
        const double gap = lowest_gap_hz(h);
        REQUIRE(gap == Approx(2.15 / std::sqrt(2.0)).epsilon(2e-4));
    }

    SECTION("without a lock the singlet is an eigenstate, <S0|H|T0> = dnu/2") {
        const auto sys = SpinSystem::pair(17.5, 2.15);
        const auto h = hamiltonian(sys, 0.0, 0.0);
        const auto u = singlet_triplet_basis(2, 0, 1);
        const Eigen::MatrixXcd h_st = u.adjoint() * h * u / kTwoPi;
        REQUIRE(std::abs(h_st(3, 1)) == Approx(2.15 / 2.0).epsilon(1e-12));
        // S0 couples to nothing else at zero lock
        REQUIRE(std::abs(h_st(3, 0)) < 1e-12);
        REQUIRE(std::abs(h_st(3, 2)) < 1e-12);
        REQUIRE(h_st(3, 3).real() == Approx(-3.0 * 17.5 / 4.0));
    }

    SECTION("dressed diagonal at lock nu_n") {
        const double j = 17.5, nu = 11.0;
        const auto sys = SpinSystem::pair(j, 0.0);
        const auto h = hamiltonian(sys, nu, 0.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
        std::vector<double> ev;
        for (int i = 0; i < 4; ++i) ev.push_back(es.eigenvalues()(i) / kTwoPi);
        std::sort(ev.begin(), ev.end());
        std::vector<double> expected{-3 * j / 4, j / 4 - nu, j / 4, j / 4 + nu};
        std::sort(expected.begin(), expected.end());
        for (int i = 0; i < 4; ++i) REQUIRE(ev[i] == Approx(expected[i]).margin(1e-10));
    }

    SECTION("negative nutation frequency rejected") {
        const auto sys = SpinSystem::pair(17.5, 2.15);
        REQUIRE_THROWS_AS(hamiltonian(sys, -1.0, 0.0), std::invalid_argument);
    }
}

TEST_CASE("singlet coupling matrix element", "[hamiltonian]") {
    SECTION("equals dnu/(2 sqrt 2) to 1e-10 for any dnu") {
        for (double dnu : {0.05, 0.5, 2.15, 2.8}) {
            const auto sys = SpinSystem::pair(17.5, dnu);
            const double g = singlet_coupling_hz(sys, 17.5, 0.0);
            REQUIRE(g == Approx(dnu / (2.0 * std::sqrt(2.0))).margin(1e-10));
        }
    }
    SECTION("independent of the lock phase") {
        const auto sys = SpinSystem::pair(17.5, 2.15);
        const double gx = singlet_coupling_hz(sys, 17.5, 0.0);
        const double gy = singlet_coupling_hz(sys, 17.5, std::numbers::pi / 2.0);
        REQUIRE(gx == Approx(gy).margin(1e-12));
    }
}

TEST_CASE("crossing location and gap in the nearly-ideal regime", "[hamiltonian]") {
    // With dnu << J the full-matrix minimum gap matches the two-level value
    // dnu/sqrt(2) to high accuracy and sits at nu_n = J.
    const double j = 17.5, dnu = 0.05;
    const auto sys = SpinSystem::pair(j, dnu);
    double best_nu = 0.0, best_gap = 1e300;
    for (double nu = j - 0.5; nu <= j + 0.5 + 1e-12; nu += 0.01) {
        const double gap = lowest_gap_hz(hamiltonian(sys, nu, 0.0));
        if (gap < best_gap) {
            best_gap = gap;
            best_nu = nu;
        }
    }
    REQUIRE(best_nu == Approx(j).margin(0.005));
    REQUIRE(best_gap == Approx(dnu / std::sqrt(2.0)).epsilon(1e-6));
}
