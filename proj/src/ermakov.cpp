// Adaptive embedded Runge–Kutta 5(4) (Dormand–Prince pair, FSAL) with fifth-order
// dense output, applied to the Ermakov equation b̈ + ω(t)²b = ω₀²/b³ as the
// first-order system y = (b, ḃ). Integration happens in the rescaled time s = ω₀t,
// which makes the equation parameter-free: u″ = 1/u³ − (ω/ω₀)²u. Local error is
// controlled per component against atol + rtol·max(|y_old|, |y_new|); the uniform
// output grid is filled from the dense interpolant of each accepted step, so the
// step sequence is independent of the requested sampling.

#include "qsl/ermakov.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "qsl/errors.hpp"

namespace qsl {

namespace {

using State = std::array<double, 2>;

// Dormand–Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// 5th-minus-4th-order error weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output weights.
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double collapse_floor = 1e-8;
constexpr long max_steps = 5'000'000;

struct DenseStep {
    double s_old = 0.0, h = 0.0;
    std::array<State, 5> rcont{};  // quartic-in-θ interpolant coefficients

    State eval(double theta) const {
        const double th1 = 1.0 - theta;
        State y;
        for (int i = 0; i < 2; ++i)
            y[i] = rcont[0][i] +
                   theta * (rcont[1][i] +
                            th1 * (rcont[2][i] + theta * (rcont[3][i] + th1 * rcont[4][i])));
        return y;
    }
};

} // namespace

Trajectory solve_ermakov(const FrequencyProtocol& protocol, int num_nodes, double rel_tol,
                         double abs_tol) {
    if (num_nodes < 2) throw std::invalid_argument("num_nodes must be >= 2");
    if (!(rel_tol > 0.0 && rel_tol <= 1e-2))
        throw std::invalid_argument("rel_tol must lie in (0, 1e-2]");
    if (!(abs_tol > 0.0 && abs_tol <= 1e-2))
        throw std::invalid_argument("abs_tol must lie in (0, 1e-2]");

    const double w0 = protocol.omega0;
    const double S = w0 * protocol.tau;  // horizon in rescaled time s = ω₀t

    // u″ = 1/u³ − (ω(s/ω₀)/ω₀)²·u; a collapsing u makes the RHS non-finite, which
    // the error control turns into a rejected step.
    auto rhs = [&](double s, const State& y) -> State {
        const double u = y[0];
        const double w2 = protocol.omega_sq(s / w0) / (w0 * w0);
        if (!(u > 0.0)) return {y[1], std::numeric_limits<double>::infinity()};
        return {y[1], 1.0 / (u * u * u) - w2 * u};
    };

    Trajectory traj;
    traj.omega0 = w0;
    traj.tau = protocol.tau;
    traj.driving = Driving::bare;
    const std::size_t n = static_cast<std::size_t>(num_nodes);
    traj.t.resize(n);
    traj.b.resize(n);
    traj.bdot.resize(n);
    traj.omega_sq.resize(n);
    const std::size_t intervals = n - 1;
    for (std::size_t i = 0; i < n; ++i)
        traj.t[i] = protocol.tau * (static_cast<double>(i) / static_cast<double>(intervals));

    // exact initial conditions at the first node
    traj.b[0] = 1.0;
    traj.bdot[0] = 0.0;
    traj.omega_sq[0] = protocol.omega_sq(0.0);
    std::size_t next_node = 1;

    auto record = [&](std::size_t i, const State& y) {
        if (!(y[0] > collapse_floor))
            throw numerical_error("scaling factor collapsed toward zero at t = " +
                                      std::to_string(traj.t[i]),
                                  traj.t[i]);
        traj.b[i] = y[0];
        traj.bdot[i] = y[1] * w0;  // du/ds → db/dt
        traj.omega_sq[i] = protocol.omega_sq(traj.t[i]);
    };

    double s = 0.0;
    State y{1.0, 0.0};
    State k1 = rhs(s, y);

    auto error_norm = [&](const State& y_old, const State& y_new, const State& err) {
        double acc = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double sk = abs_tol + rel_tol * std::max(std::abs(y_old[i]), std::abs(y_new[i]));
            const double r = err[i] / sk;
            acc += r * r;
        }
        return std::sqrt(acc / 2.0);
    };

    // initial step size: standard two-stage heuristic on the scaled derivative
    double h;
    {
        auto scaled_norm = [&](const State& v, const State& ref) {
            double acc = 0.0;
            for (int i = 0; i < 2; ++i) {
                const double sk = abs_tol + rel_tol * std::abs(ref[i]);
                const double r = v[i] / sk;
                acc += r * r;
            }
            return std::sqrt(acc / 2.0);
        };
        const double d0 = scaled_norm(y, y);
        const double d1n = scaled_norm(k1, y);
        double h0 = (d0 < 1e-10 || d1n < 1e-10) ? 1e-6 : 0.01 * d0 / d1n;
        h0 = std::min(h0, S);
        State y1{y[0] + h0 * k1[0], y[1] + h0 * k1[1]};
        State f1 = rhs(h0, y1);
        const double d2 = scaled_norm({f1[0] - k1[0], f1[1] - k1[1]}, y) / h0;
        double h1;
        if (std::max(d1n, d2) <= 1e-15)
            h1 = std::max(1e-6, h0 * 1e-3);
        else
            h1 = std::pow(0.01 / std::max(d1n, d2), 0.2);
        h = std::min({100.0 * h0, h1, S});
    }

    long steps = 0;
    bool rejected = false;
    const double s_done = 32.0 * std::numeric_limits<double>::epsilon() * S;
    while (S - s > s_done) {
        if (++steps > max_steps)
            throw numerical_error("step limit exceeded at t = " + std::to_string(s / w0), s / w0);
        const double h_min = 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(s), S);
        if (h < h_min)
            throw numerical_error("step size underflow at t = " + std::to_string(s / w0), s / w0);
        h = std::min(h, S - s);

        auto stage = [&](double c, const std::initializer_list<std::pair<double, const State*>>& terms) {
            State ys = y;
            for (const auto& [a, k] : terms)
                for (int i = 0; i < 2; ++i) ys[i] += h * a * (*k)[i];
            return rhs(s + c * h, ys);
        };

        const State k2 = stage(c2, {{a21, &k1}});
        const State k3 = stage(c3, {{a31, &k1}, {a32, &k2}});
        const State k4 = stage(c4, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
        const State k5 = stage(c5, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
        const State k6 = stage(1.0, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});

        State y_new;
        for (int i = 0; i < 2; ++i)
            y_new[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        const State k7 = rhs(s + h, y_new);

        State err;
        for (int i = 0; i < 2; ++i)
            err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                          e7 * k7[i]);

        const double err_norm = error_norm(y, y_new, err);
        if (!std::isfinite(err_norm) || err_norm > 1.0) {
            // reject: shrink and retry
            const double fac = std::isfinite(err_norm)
                                   ? std::max(0.2, 0.9 * std::pow(err_norm, -0.2))
                                   : 0.1;
            h *= std::min(fac, 1.0);
            rejected = true;
            continue;
        }

        // accept: build the dense interpolant and sample any grid nodes inside
        DenseStep dense;
        dense.s_old = s;
        dense.h = h;
        for (int i = 0; i < 2; ++i) {
            const double ydiff = y_new[i] - y[i];
            const double bspl = h * k1[i] - ydiff;
            dense.rcont[0][i] = y[i];
            dense.rcont[1][i] = ydiff;
            dense.rcont[2][i] = bspl;
            dense.rcont[3][i] = ydiff - h * k7[i] - bspl;
            dense.rcont[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                     d6 * k6[i] + d7 * k7[i]);
        }

        const double s_new = s + h;
        const double reach = s_new + 4.0 * std::numeric_limits<double>::epsilon() * S;
        while (next_node < n) {
            const double sg = S * (static_cast<double>(next_node) / static_cast<double>(intervals));
            if (sg > reach) break;
            const double theta = std::clamp((sg - s) / h, 0.0, 1.0);
            record(next_node, dense.eval(theta));
            ++next_node;
        }

        if (!(y_new[0] > collapse_floor))
            throw numerical_error("scaling factor collapsed toward zero at t = " +
                                      std::to_string(s_new / w0),
                                  s_new / w0);

        // step-size controller
        double fac = 0.9 * std::pow(std::max(err_norm, 1e-30), -0.2);
        fac = std::clamp(fac, 0.2, rejected ? 1.0 : 5.0);
        s = s_new;
        y = y_new;
        k1 = k7;  // FSAL
        h *= fac;
        rejected = false;
    }

    // any nodes not reached by interpolation (end-of-interval round-off) take the
    // final state
    while (next_node < n) record(next_node++, y);

    return traj;
}

std::pair<double, double> analytic_tof(double omega0, double t) {
    if (!(std::isfinite(omega0) && omega0 > 0.0))
        throw std::invalid_argument("omega0 must be finite and > 0");
    if (!(std::isfinite(t) && t >= 0.0)) throw std::invalid_argument("t must be finite and >= 0");
    const double b = std::sqrt(1.0 + omega0 * omega0 * t * t);
    return {b, omega0 * omega0 * t / b};
}

Trajectory adiabatic_scaling(const FrequencyProtocol& protocol, int num_nodes) {
    if (num_nodes < 2) throw std::invalid_argument("num_nodes must be >= 2");
    const double w0 = protocol.omega0;
    const std::size_t n = static_cast<std::size_t>(num_nodes);
    Trajectory traj;
    traj.omega0 = w0;
    traj.tau = protocol.tau;
    traj.driving = Driving::counterdiabatic;
    traj.t.resize(n);
    traj.b.resize(n);
    traj.bdot.resize(n);
    traj.omega_sq.resize(n);
    const std::size_t intervals = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = protocol.tau * (static_cast<double>(i) / static_cast<double>(intervals));
        const double w2 = protocol.omega_sq(t);
        if (!(w2 > 0.0))
            throw std::domain_error(
                "adiabatic reference undefined: omega(t) <= 0 at t = " + std::to_string(t));
        const double b = std::sqrt(w0 / std::sqrt(w2));
        traj.t[i] = t;
        traj.b[i] = b;
        // ḃ = d/dt √(ω₀/ω) = −(b/4)·(dω²/dt)/ω²
        traj.bdot[i] = -0.25 * b * protocol.omega_sq_dot(t) / w2;
        traj.omega_sq[i] = w2;
    }
    return traj;
}

} // namespace qsl
