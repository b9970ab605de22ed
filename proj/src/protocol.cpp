// Frequency-protocol implementations. Closed-form kinds evaluate exactly; the
// tabulated kind interpolates ω²(t) with the Fritsch–Carlson monotone piecewise
// cubic (interpolating in ω², not ω, because ω² may legitimately be negative for
// shortcut protocols with transient trap inversion).

#include "qsl/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace qsl {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

// Quintic smoothstep P(s) = 10s³ − 15s⁴ + 6s⁵ and derivatives. The factored forms
// of P′ and P″ vanish exactly at s = 0 and s = 1.
double p5(double s) { return s * s * s * (10.0 + s * (-15.0 + 6.0 * s)); }
double p5_d1(double s) { return 30.0 * s * s * (1.0 - s) * (1.0 - s); }
double p5_d2(double s) { return 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s); }
double p5_d3(double s) { return 60.0 - 360.0 * s + 360.0 * s * s; }

// Third time derivative of the quintic scaling-factor ansatz (needed for the
// analytic dω²/dt of the reverse-engineered protocol).
double sta_bdddot(double t, double tau, double b_tau) {
    const double s = t / tau;
    return (b_tau - 1.0) * p5_d3(s) / (tau * tau * tau);
}

// Clamp t into [0, τ] while rejecting genuinely out-of-range arguments; a relative
// slack absorbs floating-point round-off from grid construction.
double clamp_time(double t, double tau) {
    const double slack = 1e-9 * std::max(1.0, tau);
    if (!(t >= -slack && t <= tau + slack))
        throw std::domain_error("time " + std::to_string(t) + " outside protocol domain [0, " +
                                std::to_string(tau) + "]");
    return std::min(std::max(t, 0.0), tau);
}

void check_common(double omega0, double tau) {
    require(std::isfinite(omega0) && omega0 > 0.0, "omega0 must be finite and > 0");
    require(std::isfinite(tau) && tau > 0.0, "tau must be finite and > 0");
}

// Fritsch–Carlson monotone-cubic node slopes for (x, y) samples.
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> d(n, 0.0);
    if (n == 2) {
        d[0] = d[1] = (y[1] - y[0]) / (x[1] - x[0]);
        return d;
    }
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        delta[i] = (y[i + 1] - y[i]) / h[i];
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] == 0.0 || delta[i] == 0.0 || (delta[i - 1] > 0.0) != (delta[i] > 0.0)) {
            d[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    auto edge = [](double h0, double h1, double d0, double d1) {
        double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (s * d0 <= 0.0)
            s = 0.0;
        else if (d0 * d1 < 0.0 && std::abs(s) > 3.0 * std::abs(d0))
            s = 3.0 * d0;
        return s;
    };
    d[0] = edge(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = edge(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    return d;
}

std::size_t segment_of(const std::vector<double>& xs, double x) {
    // rightmost segment whose left node is ≤ x; x is already clamped into range
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = static_cast<std::size_t>(it - xs.begin());
    if (i == 0) return 0;
    if (i >= xs.size()) return xs.size() - 2;
    return i - 1;
}

double hermite_eval(const std::vector<double>& xs, const std::vector<double>& ys,
                    const std::vector<double>& ds, double x) {
    const std::size_t i = segment_of(xs, x);
    const double h = xs[i + 1] - xs[i];
    const double th = (x - xs[i]) / h;
    const double h00 = (1.0 + 2.0 * th) * (1.0 - th) * (1.0 - th);
    const double h10 = th * (1.0 - th) * (1.0 - th);
    const double h01 = th * th * (3.0 - 2.0 * th);
    const double h11 = th * th * (th - 1.0);
    return ys[i] * h00 + h * ds[i] * h10 + ys[i + 1] * h01 + h * ds[i + 1] * h11;
}

double hermite_eval_d1(const std::vector<double>& xs, const std::vector<double>& ys,
                       const std::vector<double>& ds, double x) {
    const std::size_t i = segment_of(xs, x);
    const double h = xs[i + 1] - xs[i];
    const double th = (x - xs[i]) / h;
    const double g00 = 6.0 * th * (th - 1.0);
    const double g10 = (3.0 * th - 1.0) * (th - 1.0);
    const double g01 = -g00;
    const double g11 = th * (3.0 * th - 2.0);
    return (ys[i] * g00 + ys[i + 1] * g01) / h + ds[i] * g10 + ds[i + 1] * g11;
}

} // namespace

double FrequencyProtocol::omega_sq(double t) const {
    t = clamp_time(t, tau);
    switch (kind) {
        case ProtocolKind::constant:
            return omega0 * omega0;
        case ProtocolKind::linear_ramp: {
            const double w = omega0 + (omega_f - omega0) * (t / tau);
            return w * w;
        }
        case ProtocolKind::sta_polynomial:
            return sta_frequency(t, tau, omega0, omega_f);
        case ProtocolKind::tqd_reference: {
            const double w = tqd_reference_frequency(t, tau, omega0, omega_f);
            return w * w;
        }
        case ProtocolKind::time_of_flight:
            return 0.0;
        case ProtocolKind::tabulated:
            return hermite_eval(table_t, table_w2, table_d, t);
    }
    throw std::invalid_argument("unrecognized protocol kind");
}

double FrequencyProtocol::omega_sq_dot(double t) const {
    t = clamp_time(t, tau);
    switch (kind) {
        case ProtocolKind::constant:
            return 0.0;
        case ProtocolKind::linear_ramp: {
            const double w = omega0 + (omega_f - omega0) * (t / tau);
            return 2.0 * w * (omega_f - omega0) / tau;
        }
        case ProtocolKind::sta_polynomial: {
            const double b_tau = std::sqrt(omega0 / omega_f);
            const auto [b, bdot, bddot] = sta_scaling_factor(t, tau, b_tau);
            const double b3dot = sta_bdddot(t, tau, b_tau);
            // d/dt (ω₀²/b⁴ − b̈/b) = −4ω₀²ḃ/b⁵ − b⃛/b + b̈ḃ/b²
            return -4.0 * omega0 * omega0 * bdot / std::pow(b, 5) - b3dot / b +
                   bddot * bdot / (b * b);
        }
        case ProtocolKind::tqd_reference: {
            const double s = t / tau;
            const double w = tqd_reference_frequency(t, tau, omega0, omega_f);
            const double wdot = (omega_f - omega0) * p5_d1(s) / tau;
            return 2.0 * w * wdot;
        }
        case ProtocolKind::time_of_flight:
            return 0.0;
        case ProtocolKind::tabulated:
            return hermite_eval_d1(table_t, table_w2, table_d, t);
    }
    throw std::invalid_argument("unrecognized protocol kind");
}

double FrequencyProtocol::x() const {
    switch (kind) {
        case ProtocolKind::constant:
            return 1.0;
        case ProtocolKind::linear_ramp:
        case ProtocolKind::sta_polynomial:
        case ProtocolKind::tqd_reference:
            return omega_f / omega0;
        case ProtocolKind::time_of_flight:
            return 0.0;
        case ProtocolKind::tabulated: {
            const double w2_end = table_w2.back();
            if (w2_end < 0.0) return std::numeric_limits<double>::quiet_NaN();
            return std::sqrt(w2_end) / omega0;
        }
    }
    throw std::invalid_argument("unrecognized protocol kind");
}

FrequencyProtocol constant_protocol(double omega0, double tau) {
    check_common(omega0, tau);
    FrequencyProtocol p;
    p.kind = ProtocolKind::constant;
    p.omega0 = omega0;
    p.omega_f = omega0;
    p.tau = tau;
    return p;
}

FrequencyProtocol linear_ramp(double omega0, double omega_f, double tau) {
    check_common(omega0, tau);
    require(std::isfinite(omega_f) && omega_f >= 0.0, "omega_f must be finite and >= 0");
    FrequencyProtocol p;
    p.kind = ProtocolKind::linear_ramp;
    p.omega0 = omega0;
    p.omega_f = omega_f;
    p.tau = tau;
    return p;
}

StaPoint sta_scaling_factor(double t, double tau, double b_tau) {
    require(std::isfinite(tau) && tau > 0.0, "tau must be finite and > 0");
    require(std::isfinite(b_tau) && b_tau > 0.0, "target scaling factor must be finite and > 0");
    t = clamp_time(t, tau);
    const double s = t / tau;
    const double a = b_tau - 1.0;
    return {1.0 + a * p5(s), a * p5_d1(s) / tau, a * p5_d2(s) / (tau * tau)};
}

double sta_frequency(double t, double tau, double omega0, double omega_f) {
    check_common(omega0, tau);
    require(std::isfinite(omega_f) && omega_f > 0.0, "omega_f must be finite and > 0");
    const double b_tau = std::sqrt(omega0 / omega_f);
    const auto [b, bdot, bddot] = sta_scaling_factor(t, tau, b_tau);
    (void)bdot;
    const double b2 = b * b;
    return omega0 * omega0 / (b2 * b2) - bddot / b;
}

FrequencyProtocol sta_protocol(double omega0, double omega_f, double tau) {
    check_common(omega0, tau);
    require(std::isfinite(omega_f) && omega_f > 0.0, "omega_f must be finite and > 0");
    FrequencyProtocol p;
    p.kind = ProtocolKind::sta_polynomial;
    p.omega0 = omega0;
    p.omega_f = omega_f;
    p.tau = tau;
    return p;
}

double tqd_reference_frequency(double t, double tau, double omega0, double omega_f) {
    check_common(omega0, tau);
    require(std::isfinite(omega_f) && omega_f > 0.0, "omega_f must be finite and > 0");
    t = clamp_time(t, tau);
    return omega0 + (omega_f - omega0) * p5(t / tau);
}

FrequencyProtocol tqd_reference_protocol(double omega0, double omega_f, double tau) {
    check_common(omega0, tau);
    require(std::isfinite(omega_f) && omega_f > 0.0, "omega_f must be finite and > 0");
    FrequencyProtocol p;
    p.kind = ProtocolKind::tqd_reference;
    p.omega0 = omega0;
    p.omega_f = omega_f;
    p.tau = tau;
    return p;
}

FrequencyProtocol tof_protocol(double omega0, double tau) {
    check_common(omega0, tau);
    FrequencyProtocol p;
    p.kind = ProtocolKind::time_of_flight;
    p.omega0 = omega0;
    p.omega_f = 0.0;
    p.tau = tau;
    return p;
}

FrequencyProtocol tabulated_protocol(const std::vector<std::pair<double, double>>& samples) {
    require(samples.size() >= 2, "tabulated protocol needs at least 2 samples");
    FrequencyProtocol p;
    p.kind = ProtocolKind::tabulated;
    p.table_t.reserve(samples.size());
    p.table_w2.reserve(samples.size());
    for (const auto& [t, w2] : samples) {
        require(std::isfinite(t) && std::isfinite(w2), "tabulated samples must be finite");
        p.table_t.push_back(t);
        p.table_w2.push_back(w2);
    }
    require(p.table_t.front() == 0.0, "tabulated samples must start at t = 0");
    for (std::size_t i = 0; i + 1 < p.table_t.size(); ++i)
        require(p.table_t[i] < p.table_t[i + 1],
                "tabulated sample times must be strictly increasing (violated at sample " +
                    std::to_string(i + 1) + ")");
    require(p.table_w2.front() > 0.0, "tabulated protocol must start trapped: omega_sq(0) > 0");
    p.tau = p.table_t.back();
    p.omega0 = std::sqrt(p.table_w2.front());
    p.omega_f = p.table_w2.back() >= 0.0 ? std::sqrt(p.table_w2.back())
                                         : std::numeric_limits<double>::quiet_NaN();
    p.table_d = pchip_slopes(p.table_t, p.table_w2);
    return p;
}

} // namespace qsl
