#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "slicsim/scan_curve.hpp"

namespace slicsim {

struct FitResult {
    std::vector<std::string> param_names;
    Eigen::VectorXd params;
    Eigen::VectorXd std_errors;
    double residual_norm = 0.0;
    bool converged = false;
    int iterations = 0;
    std::vector<double> residual_history;  // norm after each accepted step

    double value(const std::string& name) const { return params(index_of(name)); }
    double std_error(const std::string& name) const { return std_errors(index_of(name)); }

    int index_of(const std::string& name) const {
        for (size_t i = 0; i < param_names.size(); ++i)
            if (param_names[i] == name) return static_cast<int>(i);
        throw std::invalid_argument("FitResult: unknown parameter " + name);
    }
};

namespace detail {

using Model = std::function<double(double x, const Eigen::VectorXd& p)>;

inline Eigen::VectorXd residuals(const Model& model, const std::vector<double>& x,
                                 const std::vector<double>& y, const Eigen::VectorXd& p) {
    Eigen::VectorXd r(x.size());
    for (size_t i = 0; i < x.size(); ++i) r(i) = y[i] - model(x[i], p);
    return r;
}

inline Eigen::MatrixXd jacobian(const Model& model, const std::vector<double>& x,
                                const Eigen::VectorXd& p) {
    // central differences on the model; residual Jacobian is its negative
    Eigen::MatrixXd jac(x.size(), p.size());
    for (int k = 0; k < p.size(); ++k) {
        const double h = std::max(1e-8, 1e-7 * std::abs(p(k)));
        Eigen::VectorXd pp = p, pm = p;
        pp(k) += h;
        pm(k) -= h;
        for (size_t i = 0; i < x.size(); ++i)
            jac(i, k) = (model(x[i], pp) - model(x[i], pm)) / (2.0 * h);
    }
    return jac;
}

// Damped Gauss-Newton (Levenberg-Marquardt). Steps are accepted only when
// they reduce the residual norm; convergence is a relative parameter change
// below 1e-10 or 200 iterations.
inline FitResult levenberg_marquardt(const Model& model, const std::vector<double>& x,
                                     const std::vector<double>& y, Eigen::VectorXd p,
                                     std::vector<std::string> names) {
    constexpr int kMaxIter = 200;
    constexpr double kTol = 1e-10;
    FitResult res;
    res.param_names = std::move(names);

    double lambda = 1e-3;
    Eigen::VectorXd r = residuals(model, x, y, p);
    double cost = r.squaredNorm();
    res.residual_history.push_back(std::sqrt(cost));

    bool converged = false;
    int iter = 0;
    for (; iter < kMaxIter; ++iter) {
        const Eigen::MatrixXd jm = jacobian(model, x, p);  // d(model)/dp
        const Eigen::MatrixXd jtj = jm.transpose() * jm;
        const Eigen::VectorXd g = jm.transpose() * r;  // descent direction
        bool stepped = false;
        for (int tries = 0; tries < 25; ++tries) {
            Eigen::MatrixXd a = jtj;
            a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
            const Eigen::VectorXd step = a.ldlt().solve(g);
            if (!step.allFinite()) {
                lambda *= 10;
                continue;
            }
            const Eigen::VectorXd p_new = p + step;
            const Eigen::VectorXd r_new = residuals(model, x, y, p_new);
            const double cost_new = r_new.squaredNorm();
            if (cost_new <= cost) {
                const double rel =
                    step.norm() / std::max(p.norm(), std::numeric_limits<double>::min());
                p = p_new;
                r = r_new;
                cost = cost_new;
                res.residual_history.push_back(std::sqrt(cost));
                lambda = std::max(lambda * 0.3, 1e-14);
                stepped = true;
                if (rel < kTol) converged = true;
                break;
            }
            lambda *= 10;
        }
        if (converged) break;
        if (!stepped) {
            // no damping produced an improvement: at a stationary point if
            // the gradient has vanished, stuck otherwise
            converged = g.norm() <= 1e-8 * std::max(1.0, std::sqrt(cost));
            break;
        }
    }
    res.params = p;
    res.iterations = iter + 1;
    res.converged = converged;
    res.residual_norm = std::sqrt(cost);

    // covariance from the Jacobian at the optimum
    const int dof = static_cast<int>(x.size()) - static_cast<int>(p.size());
    const Eigen::MatrixXd jm = jacobian(model, x, p);
    const double sigma2 = dof > 0 ? cost / dof : 0.0;
    Eigen::MatrixXd jtj = jm.transpose() * jm;
    jtj.diagonal().array() += 1e-300;
    const Eigen::MatrixXd cov = sigma2 * jtj.inverse();
    res.std_errors = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    return res;
}

}  // namespace detail

// Lorentzian dip y = baseline - depth * w^2 / ((x-center)^2 + w^2).
// The fitted center locates the J-coupling in a nutation-frequency scan.
inline FitResult fit_lorentzian_dip(const ScanCurve& curve) {
    curve.validate();
    const auto& x = curve.x;
    const auto& y = curve.y;
    if (x.size() < 5) throw std::invalid_argument("fit_lorentzian_dip: need at least 5 points");

    const auto it_min = std::min_element(y.begin(), y.end());
    const size_t i_min = it_min - y.begin();
    const double baseline0 = *std::max_element(y.begin(), y.end());
    const double depth0 = std::max(baseline0 - *it_min, 1e-12);
    // half-depth crossing estimate for the width
    const double half_level = baseline0 - depth0 / 2.0;
    double w0 = (x.back() - x.front()) / 10.0;
    for (size_t i = i_min; i < y.size(); ++i)
        if (y[i] > half_level) {
            w0 = std::max(x[i] - x[i_min], (x.back() - x.front()) / double(x.size()));
            break;
        }
    Eigen::VectorXd p(4);
    p << x[i_min], w0, depth0, baseline0;

    auto model = [](double xx, const Eigen::VectorXd& q) {
        const double w2 = q(1) * q(1);
        return q(3) - q(2) * w2 / ((xx - q(0)) * (xx - q(0)) + w2);
    };
    FitResult res = detail::levenberg_marquardt(model, x, y, p, {"center", "width", "depth", "baseline"});
    res.params(1) = std::abs(res.params(1));  // width enters squared; report positive
    return res;
}

// y = A sin^4(2 pi x / T) (+ c). Reports the chemical-shift difference
// dnu = 2 sqrt(2) / T as a derived parameter.
inline FitResult fit_sin4(const ScanCurve& curve, bool with_offset = false) {
    curve.validate();
    const auto& x = curve.x;
    const auto& y = curve.y;
    if (x.size() < 8) throw std::invalid_argument("fit_sin4: need at least 8 points");

    // first interior maximum seeds the period estimate; a curve that never
    // turns over does not bracket it
    const double y_top = *std::max_element(y.begin(), y.end());
    size_t i_max = 0;
    for (size_t i = 1; i + 1 < y.size(); ++i) {
        if (y[i] >= y[i - 1] && y[i] >= y[i + 1] && y[i] > 0.5 * y_top) {
            i_max = i;
            break;
        }
    }
    if (i_max == 0)
        throw std::invalid_argument(
            "fit_sin4: period unidentifiable, curve spans less than half a period");
    double x_peak = x[i_max];
    {
        // parabolic interpolation through the three samples around the peak
        const double denom = y[i_max - 1] - 2 * y[i_max] + y[i_max + 1];
        if (std::abs(denom) > 1e-300) {
            const double delta = 0.5 * (y[i_max - 1] - y[i_max + 1]) / denom;
            if (std::abs(delta) < 1.0) x_peak += delta * (x[i_max + 1] - x[i_max]);
        }
    }
    const double t0 = 4.0 * x_peak;

    const double ymin = *std::min_element(y.begin(), y.end());
    const double ymax = *std::max_element(y.begin(), y.end());
    Eigen::VectorXd p(with_offset ? 3 : 2);
    std::vector<std::string> names{"period", "amplitude"};
    p(0) = t0;
    p(1) = std::max(ymax - (with_offset ? ymin : 0.0), 1e-12);
    if (with_offset) {
        p(2) = ymin;
        names.push_back("offset");
    }
    auto model = [with_offset](double xx, const Eigen::VectorXd& q) {
        const double s = std::sin(2.0 * std::numbers::pi * xx / q(0));
        const double s2 = s * s;
        return q(1) * s2 * s2 + (with_offset ? q(2) : 0.0);
    };
    FitResult res = detail::levenberg_marquardt(model, x, y, p, std::move(names));

    // derived dnu = 2 sqrt(2) / T with first-order error propagation
    const double period = res.params(0);
    const double dnu = 2.0 * std::sqrt(2.0) / period;
    const double dnu_err = res.std_errors(0) * dnu / period;
    res.param_names.push_back("delta_nu");
    res.params.conservativeResize(res.params.size() + 1);
    res.params(res.params.size() - 1) = dnu;
    res.std_errors.conservativeResize(res.std_errors.size() + 1);
    res.std_errors(res.std_errors.size() - 1) = dnu_err;
    return res;
}

// y = A exp(-x / lifetime). Initialized from a log-linear regression.
// A flat curve has no identifiable lifetime and is reported unconverged.
inline FitResult fit_exponential(const ScanCurve& curve) {
    curve.validate();
    const auto& x = curve.x;
    const auto& y = curve.y;
    if (x.size() < 3) throw std::invalid_argument("fit_exponential: need at least 3 points");
    for (double v : y)
        if (!(v > 0)) throw std::invalid_argument("fit_exponential: data must be positive");

    // log-linear least squares
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += std::log(y[i]);
        sxx += x[i] * x[i];
        sxy += x[i] * std::log(y[i]);
    }
    const double denom = n * sxx - sx * sx;
    const double slope = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
    const double icept = (sy - slope * sx) / n;

    FitResult res;
    if (slope > -1e-12) {
        // non-identifiable: no decay visible over the sampled span
        res.param_names = {"amplitude", "lifetime"};
        res.params = Eigen::Vector2d(std::exp(icept), std::numeric_limits<double>::infinity());
        res.std_errors = Eigen::Vector2d(0.0, std::numeric_limits<double>::infinity());
        res.converged = false;
        res.residual_norm = 0.0;
        for (size_t i = 0; i < x.size(); ++i) {
            const double d = y[i] - std::exp(icept);
            res.residual_norm += d * d;
        }
        res.residual_norm = std::sqrt(res.residual_norm);
        return res;
    }
    Eigen::VectorXd p(2);
    p << std::exp(icept), -1.0 / slope;
    auto model = [](double xx, const Eigen::VectorXd& q) { return q(0) * std::exp(-xx / q(1)); };
    return detail::levenberg_marquardt(model, x, y, p, {"amplitude", "lifetime"});
}

}  // namespace slicsim
