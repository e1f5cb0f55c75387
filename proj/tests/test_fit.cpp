#include <catch2/catch.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "slicsim/fit.hpp"
#include "slicsim/scan.hpp"

using namespace slicsim;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * double(i) / double(n - 1);
    return v;
}

ScanCurve make_curve(ScanType type, std::vector<double> x, std::vector<double> y) {
    ScanCurve c;
    c.type = type;
    c.x = std::move(x);
    c.y = std::move(y);
    return c;
}

}  // namespace

TEST_CASE("Lorentzian dip fit", "[fit]") {
    const double center = 17.5, width = 1.1, depth = 0.47, baseline = 0.99;
    const auto x = linspace(10.0, 25.0, 121);
    std::vector<double> y;
    for (double xx : x)
        y.push_back(baseline - depth * width * width /
                                   ((xx - center) * (xx - center) + width * width));
    const auto curve = make_curve(ScanType::dip, x, y);

    SECTION("noiseless self-consistency to 1e-6") {
        const auto fit = fit_lorentzian_dip(curve);
        REQUIRE(fit.converged);
        REQUIRE(fit.value("center") == Approx(center).epsilon(1e-6));
        REQUIRE(fit.value("width") == Approx(width).epsilon(1e-6));
        REQUIRE(fit.value("depth") == Approx(depth).epsilon(1e-6));
        REQUIRE(fit.value("baseline") == Approx(baseline).epsilon(1e-6));
    }

    SECTION("flat curve degenerates gracefully") {
        std::vector<double> flat(x.size(), 0.97);
        const auto fit = fit_lorentzian_dip(make_curve(ScanType::dip, x, flat));
        REQUIRE((!fit.converged || std::abs(fit.value("depth")) < 1e-6));
    }

    SECTION("Monte-Carlo noise: center within 3 standard errors in >= 95/100 seeds") {
        int within = 0;
        for (uint64_t seed = 1; seed <= 100; ++seed) {
            const auto noisy = add_noise(curve, 0.02, seed);
            const auto fit = fit_lorentzian_dip(noisy);
            if (!fit.converged) continue;
            if (std::abs(fit.value("center") - center) <= 3.0 * fit.std_error("center"))
                ++within;
        }
        REQUIRE(within >= 95);
    }

    SECTION("y scaling leaves the center untouched") {
        auto scaled = curve;
        for (auto& v : scaled.y) v *= 3.7;
        const auto a = fit_lorentzian_dip(curve);
        const auto b = fit_lorentzian_dip(scaled);
        REQUIRE(a.value("center") == Approx(b.value("center")).margin(1e-8));
        REQUIRE(b.value("depth") == Approx(3.7 * a.value("depth")).epsilon(1e-6));
    }

    SECTION("too few points rejected") {
        const auto x4 = linspace(15, 19, 4);
        REQUIRE_THROWS_AS(
            fit_lorentzian_dip(make_curve(ScanType::dip, x4, {1, 0.8, 0.8, 1})),
            std::invalid_argument);
    }
}

TEST_CASE("sin^4 fit", "[fit]") {
    const double dnu = 2.15;
    const double period = 2.0 * std::sqrt(2.0) / dnu;

    SECTION("period/dnu conversion constants") {
        REQUIRE(period == Approx(1.31555).epsilon(1e-4));
        REQUIRE(period / 4.0 == Approx(0.3289).epsilon(1e-3));
        // second pair: dnu = 2.13 puts the first maximum at 332 ms
        REQUIRE(2.0 * std::sqrt(2.0) / 2.13 / 4.0 == Approx(0.332).margin(1e-3));
    }

    SECTION("noiseless self-consistency and dnu report") {
        const auto x = linspace(0.01, 0.65, 65);
        std::vector<double> y;
        for (double xx : x) {
            const double s = std::sin(2 * std::numbers::pi * xx / period);
            y.push_back(0.41 * s * s * s * s);
        }
        const auto fit = fit_sin4(make_curve(ScanType::duration, x, y), false);
        REQUIRE(fit.converged);
        REQUIRE(fit.value("period") == Approx(period).epsilon(1e-6));
        REQUIRE(fit.value("amplitude") == Approx(0.41).epsilon(1e-6));
        REQUIRE(fit.value("delta_nu") == Approx(dnu).epsilon(1e-6));
    }

    SECTION("offset variant recovers the constant") {
        const auto x = linspace(0.01, 0.65, 65);
        std::vector<double> y;
        for (double xx : x) {
            const double s = std::sin(2 * std::numbers::pi * xx / period);
            y.push_back(0.30 * s * s * s * s + 0.07);
        }
        const auto fit = fit_sin4(make_curve(ScanType::duration, x, y), true);
        REQUIRE(fit.converged);
        REQUIRE(fit.value("offset") == Approx(0.07).margin(1e-6));
        REQUIRE(fit.value("delta_nu") == Approx(dnu).epsilon(1e-6));
    }

    SECTION("span shorter than half a period is unidentifiable") {
        const auto x = linspace(0.0, 0.05, 9);
        std::vector<double> y;
        for (double xx : x) {
            const double s = std::sin(2 * std::numbers::pi * xx / period);
            y.push_back(s * s * s * s);
        }
        REQUIRE_THROWS_AS(fit_sin4(make_curve(ScanType::duration, x, y), false),
                          std::invalid_argument);
    }
}

TEST_CASE("exponential fit", "[fit]") {
    SECTION("exact decay recovered to 1e-6") {
        const auto x = linspace(0.0, 40.0, 21);
        std::vector<double> y;
        for (double xx : x) y.push_back(0.42 * std::exp(-xx / 25.1));
        const auto fit = fit_exponential(make_curve(ScanType::evolve, x, y));
        REQUIRE(fit.converged);
        REQUIRE(fit.value("lifetime") == Approx(25.1).epsilon(1e-6));
        REQUIRE(fit.value("amplitude") == Approx(0.42).epsilon(1e-6));
    }

    SECTION("constant curve flagged non-identifiable") {
        const auto x = linspace(0.0, 10.0, 11);
        const std::vector<double> y(11, 0.37);
        const auto fit = fit_exponential(make_curve(ScanType::evolve, x, y));
        REQUIRE_FALSE(fit.converged);
        REQUIRE(std::isinf(fit.value("lifetime")));
    }

    SECTION("Monte-Carlo: 1% noise recovers the lifetime within 5% over 100 seeds") {
        const auto x = linspace(0.1, 8.0, 25);
        std::vector<double> y;
        for (double xx : x) y.push_back(std::exp(-xx / 2.15));
        const auto base = make_curve(ScanType::evolve, x, y);
        for (uint64_t seed = 1; seed <= 100; ++seed) {
            auto noisy = add_noise(base, 0.01, seed);
            for (auto& v : noisy.y) v = std::max(v, 1e-6);  // keep positivity
            const auto fit = fit_exponential(noisy);
            REQUIRE(fit.value("lifetime") == Approx(2.15).epsilon(0.05));
        }
    }

    SECTION("non-positive data rejected") {
        REQUIRE_THROWS_AS(
            fit_exponential(make_curve(ScanType::evolve, {0, 1, 2}, {1.0, 0.0, -0.1})),
            std::invalid_argument);
    }
}

TEST_CASE("fit engine contracts", "[fit]") {
    SECTION("residual norm never increases across accepted iterations") {
        const auto x = linspace(10.0, 25.0, 61);
        std::vector<double> y;
        for (double xx : x)
            y.push_back(1.0 - 0.5 * 1.2 * 1.2 / ((xx - 17.4) * (xx - 17.4) + 1.2 * 1.2));
        auto curve = make_curve(ScanType::dip, x, y);
        const auto noisy = add_noise(curve, 0.03, 7);
        const auto fit = fit_lorentzian_dip(noisy);
        for (size_t i = 1; i < fit.residual_history.size(); ++i)
            REQUIRE(fit.residual_history[i] <= fit.residual_history[i - 1] + 1e-12);
    }

    SECTION("standard errors are non-negative") {
        const auto x = linspace(0.0, 30.0, 16);
        std::vector<double> y;
        for (double xx : x) y.push_back(0.5 * std::exp(-xx / 10.0));
        const auto fit = fit_exponential(make_curve(ScanType::evolve, x, y));
        for (int i = 0; i < fit.std_errors.size(); ++i) REQUIRE(fit.std_errors(i) >= 0.0);
    }
}
