// QSL metric implementations. Two algebraic choices matter for robustness:
// fidelity-like powers X^(−σ²) are evaluated as exp(−σ²·log X) so many-body σ²
// never overflows the powering, and the path-length radicand ω²[(Q*)²−1] is
// expanded to ω₀²K² − ω² (K the Q* bracket), which is division-free in ω and
// therefore stays defined on untrapped (ω = 0) and inverted (ω² < 0) segments.

#include "qsl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

#include "qsl/errors.hpp"
#include "qsl/quadrature.hpp"

namespace qsl {

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be finite");
}

// (b²/4)[(1 + 1/b²)² + (ḃ/(ω₀b))²] — equals 1 exactly in equilibrium (b=1, ḃ=0).
double overlap_bracket(double b, double bdot, double omega0) {
    const double u = 1.0 + 1.0 / (b * b);
    const double v = bdot / (omega0 * b);
    return 0.25 * b * b * (u * u + v * v);
}

// Q* bracket K = 1/(2b²) + ω²b²/(2ω₀²) + ḃ²/(2ω₀²); Q* = (ω₀/ω)·K for ω > 0.
double q_star_bracket(double b, double bdot, double omega_sq, double omega0) {
    const double w0sq = omega0 * omega0;
    return 0.5 / (b * b) + 0.5 * omega_sq * b * b / w0sq + 0.5 * bdot * bdot / w0sq;
}

// Dispersion radicand ω²[(Q*)² − 1] in its ω-division-free form ω₀²K² − ω².
double dispersion_radicand(double b, double bdot, double omega_sq, double omega0) {
    const double k = q_star_bracket(b, bdot, omega_sq, omega0);
    return omega0 * omega0 * k * k - omega_sq;
}

double alpha_of(double x) { return x < 1.0 ? 1.0 : -1.0; }

} // namespace

double log_fidelity(double b, double bdot, double sigma2, double omega0) {
    require_finite(b, "b");
    require_finite(bdot, "bdot");
    require_finite(sigma2, "sigma2");
    require_finite(omega0, "omega0");
    if (!(b > 0.0)) throw std::invalid_argument("b must be > 0");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be > 0");
    if (!(omega0 > 0.0)) throw std::invalid_argument("omega0 must be > 0");
    return -sigma2 * std::log(overlap_bracket(b, bdot, omega0));
}

double fidelity(double b, double bdot, double sigma2, double omega0) {
    return std::exp(log_fidelity(b, bdot, sigma2, omega0));
}

double bures_angle(double F) {
    if (!(F >= -1e-12 && F <= 1.0 + 1e-12))
        throw std::invalid_argument("fidelity outside [0, 1] beyond tolerance: " +
                                    std::to_string(F));
    F = std::clamp(F, 0.0, 1.0);
    return std::acos(std::sqrt(F));
}

double q_star(double b, double bdot, double omega, double omega0) {
    require_finite(b, "b");
    require_finite(bdot, "bdot");
    require_finite(omega, "omega");
    require_finite(omega0, "omega0");
    if (!(b > 0.0)) throw std::invalid_argument("b must be > 0");
    if (!(omega0 > 0.0)) throw std::invalid_argument("omega0 must be > 0");
    if (!(omega > 0.0))
        throw std::domain_error("Q* undefined for untrapped/inverted configurations (omega <= 0)");
    return (omega0 / omega) * q_star_bracket(b, bdot, omega * omega, omega0);
}

double energy_variance(double q_star, double omega, double sigma2) {
    require_finite(q_star, "q_star");
    require_finite(omega, "omega");
    require_finite(sigma2, "sigma2");
    if (q_star < 1.0 - 1e-9)
        throw std::invalid_argument("q_star below 1 beyond tolerance signals an upstream fault: " +
                                    std::to_string(q_star));
    q_star = std::max(q_star, 1.0);
    return omega * omega * sigma2 * (q_star * q_star - 1.0);  // ħ = 1
}

double quantum_fisher(double var_h) {
    require_finite(var_h, "var_h");
    if (var_h < 0.0) throw std::invalid_argument("energy variance must be nonnegative");
    return 4.0 * var_h;  // ħ = 1
}

std::vector<double> path_length(const Trajectory& traj, double sigma2) {
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
        throw std::invalid_argument("sigma2 must be finite and > 0");
    const std::size_t n = traj.t.size();
    if (n < 2) throw std::invalid_argument("trajectory needs at least 2 nodes");
    const double sigma = std::sqrt(sigma2);
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (traj.driving == Driving::counterdiabatic) {
            g[i] = sigma * std::abs(traj.bdot[i] / traj.b[i]);
        } else {
            double w = dispersion_radicand(traj.b[i], traj.bdot[i], traj.omega_sq[i], traj.omega0);
            if (w < -1e-12)
                throw numerical_error("negative dispersion radicand at t = " +
                                          std::to_string(traj.t[i]),
                                      traj.t[i]);
            g[i] = sigma * std::sqrt(std::max(w, 0.0));
        }
    }
    const double h = traj.t[1] - traj.t[0];
    std::vector<double> gamma = cumulative_simpson(g, h);
    // enforce exact monotonicity (half-panel rules can dip by round-off)
    double peak = 0.0;
    for (double& v : gamma) {
        peak = std::max(peak, v);
        v = peak;
    }
    return gamma;
}

double excess_bures(double gamma_tau, double bures_tau) {
    require_finite(gamma_tau, "gamma_tau");
    require_finite(bures_tau, "bures_tau");
    const double d = gamma_tau - bures_tau;
    if (d < -1e-9)
        throw numerical_error("path length below Bures angle beyond tolerance: bound violation");
    return std::max(d, 0.0);
}

double qsl_time(double bures_tau, double mean_dispersion) {
    require_finite(bures_tau, "bures_tau");
    require_finite(mean_dispersion, "mean_dispersion");
    if (mean_dispersion <= 0.0) {
        if (bures_tau <= 1e-12) return 0.0;
        throw std::invalid_argument(
            "zero mean dispersion is inconsistent with a nonzero Bures angle");
    }
    return bures_tau / mean_dispersion;  // ħ = 1
}

double tqd_fidelity(double x, double sigma2) {
    require_finite(x, "x");
    require_finite(sigma2, "sigma2");
    if (!(x > 0.0)) throw std::invalid_argument("frequency ratio x must be > 0");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be > 0");
    const double r = (1.0 + x) * (1.0 + x) / (4.0 * x);
    return std::exp(-sigma2 * std::log(r));
}

double tqd_gamma(double x, double sigma2, double alpha) {
    require_finite(x, "x");
    require_finite(sigma2, "sigma2");
    if (!(x > 0.0)) throw std::invalid_argument("frequency ratio x must be > 0");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be > 0");
    if (x == 1.0) return 0.0;
    if (alpha != 1.0 && alpha != -1.0)
        throw std::invalid_argument("alpha must be +1 (expansion) or -1 (compression)");
    if (alpha != alpha_of(x))
        throw std::invalid_argument("alpha inconsistent with x: expansion (x < 1) takes +1, "
                                    "compression (x > 1) takes -1");
    return -alpha * 0.5 * std::sqrt(sigma2) * std::log(x);
}

double tqd_excess_bures(double x, double sigma2) {
    if (x == 1.0) {
        require_finite(sigma2, "sigma2");
        return 0.0;
    }
    const double gamma = tqd_gamma(x, sigma2, alpha_of(x));
    const double bures = bures_angle(tqd_fidelity(x, sigma2));
    return excess_bures(gamma, bures);
}

double tqd_excess_bures_series(double x, double sigma2) {
    require_finite(x, "x");
    require_finite(sigma2, "sigma2");
    if (!(x > 0.0)) throw std::invalid_argument("frequency ratio x must be > 0");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be > 0");
    const double sigma = std::sqrt(sigma2);
    const double alpha = alpha_of(x);
    const double u = 1.0 - x;
    return alpha * sigma * u + 0.5 * alpha * sigma * u * u;
}

double tqd_energy_variance(double b, double bdot, double sigma2) {
    require_finite(b, "b");
    require_finite(bdot, "bdot");
    require_finite(sigma2, "sigma2");
    if (!(b > 0.0)) throw std::invalid_argument("b must be > 0");
    const double r = bdot / b;
    return r * r * sigma2;  // ħ = 1
}

double adiabatic_q_star(double omega, double omega_dot) {
    require_finite(omega, "omega");
    require_finite(omega_dot, "omega_dot");
    if (!(omega > 0.0)) throw std::domain_error("adiabatic Q* requires omega > 0");
    const double w2 = omega * omega;
    return 1.0 + omega_dot * omega_dot / (8.0 * w2 * w2);
}

double generating_function(double b, double sigma2) {
    require_finite(b, "b");
    require_finite(sigma2, "sigma2");
    if (!(b > 0.0)) throw std::invalid_argument("b must be > 0");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be > 0");
    return std::exp(-sigma2 * std::log(0.5 * (b + 1.0 / b)));
}

QslReport build_report(const Trajectory& traj, double sigma2, ReportQuadrature quad) {
    const std::size_t n = traj.t.size();
    if (n < 2) throw std::invalid_argument("trajectory needs at least 2 nodes");
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
        throw std::invalid_argument("sigma2 must be finite and > 0");

    QslReport rep;
    rep.sigma2 = sigma2;
    rep.tau = traj.tau;
    rep.t = traj.t;
    rep.fidelity.resize(n);
    rep.log_fidelity.resize(n);
    rep.bures.resize(n);
    rep.q_star.resize(n);
    rep.var_h.resize(n);

    const bool cd = traj.driving == Driving::counterdiabatic;
    const double sigma = std::sqrt(sigma2);
    std::vector<double> g(n);  // dispersion integrand √(var H)·σ-normalized, ħ = 1
    for (std::size_t i = 0; i < n; ++i) {
        const double b = traj.b[i];
        const double bdot = traj.bdot[i];
        const double w2 = traj.omega_sq[i];
        // counterdiabatic driving holds the state on the adiabatic reference, whose
        // overlap with the initial state carries no velocity term
        rep.log_fidelity[i] = log_fidelity(b, cd ? 0.0 : bdot, sigma2, traj.omega0);
        rep.fidelity[i] = std::exp(rep.log_fidelity[i]);
        rep.bures[i] = bures_angle(rep.fidelity[i]);
        rep.q_star[i] = w2 > 0.0 ? q_star(b, bdot, std::sqrt(w2), traj.omega0) : nan_v;
        if (cd) {
            rep.var_h[i] = tqd_energy_variance(b, bdot, sigma2);
            g[i] = sigma * std::abs(bdot / b);
        } else {
            const double w = dispersion_radicand(b, bdot, w2, traj.omega0);
            if (w < -1e-12)
                throw numerical_error("negative dispersion radicand at t = " +
                                          std::to_string(traj.t[i]),
                                      traj.t[i]);
            const double wc = std::max(w, 0.0);
            rep.var_h[i] = sigma2 * wc;  // ħ²ω²σ²[(Q*)²−1] in division-free form
            g[i] = sigma * std::sqrt(wc);
        }
    }

    const double h = traj.t[1] - traj.t[0];
    const std::vector<double> simpson = cumulative_simpson(g, h);
    const std::vector<double> trapezoid = cumulative_trapezoid(g, h);
    rep.quadrature_error = std::abs(simpson.back() - trapezoid.back());
    rep.gamma_cum = (quad == ReportQuadrature::simpson) ? simpson : trapezoid;
    double peak = 0.0;
    for (double& v : rep.gamma_cum) {
        peak = std::max(peak, v);
        v = peak;
    }

    const double gamma_tau = rep.gamma_cum.back();
    const double bures_tau = rep.bures.back();
    rep.delta_l = excess_bures(gamma_tau, bures_tau);
    rep.mean_dispersion = gamma_tau / traj.tau;
    rep.tau_qsl = qsl_time(bures_tau, rep.mean_dispersion);
    return rep;
}

} // namespace qsl
