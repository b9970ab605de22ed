// Quantum-speed-limit metrics for scale-invariant dynamics, all functions of
// (b, ḃ, ω, σ²) in natural units ħ = m = 1:
//
//   fidelity       F = [ (b²/4)((1 + 1/b²)² + (ḃ/(ω₀b))²) ]^(−σ²)   (log-space powering)
//   Bures angle    ℒ = arccos √F
//   Q*             nonadiabatic factor (ω₀/ω)[1/(2b²) + ω²b²/(2ω₀²) + ḃ²/(2ω₀²)], ≥ 1
//   energy var.    var H = ħ²ω²σ²[(Q*)² − 1]
//   path length    γ(t) = σ∫₀ᵗ √(ω²[(Q*)² − 1]) dt′, computed division-free in ω
//   excess angle   δℒ(τ) = γ(τ) − ℒ(τ) ≥ 0
//   QSL time       τ_QSL = ħℒ(τ)/ΔH̄ with ΔH̄ = γ(τ)·ħ/τ
//
// plus the counterdiabatic closed forms in x = ω(τ)/ω₀ and the dilatation
// generating function A(b) = [(b/2)(1 + 1/b²)]^(−σ²) whose derivatives at b = 1
// give the squeezing-operator moments.

#pragma once

#include <vector>

#include "qsl/ermakov.hpp"

namespace qsl {

// log F; always ≤ 0. Finite even when F itself underflows (σ² can reach 10⁴–10⁶
// for many-body systems).
double log_fidelity(double b, double bdot, double sigma2, double omega0);

// F ∈ [0, 1]; evaluated as exp(log_fidelity), so extreme many-body decay
// underflows gracefully to 0.
double fidelity(double b, double bdot, double sigma2, double omega0);

// arccos √F. Accepts F within 1e−12 outside [0, 1] (clamped); rejects worse.
double bures_angle(double F);

// Nonadiabatic factor; requires ω > 0 (throws std::domain_error otherwise: Q* is
// undefined for untrapped or inverted configurations). Equals 1 in the
// instantaneous ground state and in the adiabatic limit.
double q_star(double b, double bdot, double omega, double omega0);

// ħ²ω²σ²[(Q*)² − 1]. Q* values within 1e−9 below 1 are clamped to 1; anything
// lower signals an upstream numerical fault (std::invalid_argument).
double energy_variance(double q_star, double omega, double sigma2);

// Quantum Fisher information I_Q = 4·var H/ħ².
double quantum_fisher(double var_h);

// Cumulative path length γ(t_m) on the trajectory grid: composite-Simpson
// quadrature of the energy-dispersion integrand, clamped nonnegative and
// nondecreasing. For bare driving the integrand σ√(ω₀²K² − ω²) (K the Q* bracket)
// is used — algebraically equal to σ√(ω²[(Q*)²−1]) wherever ω > 0 but free of any
// division by ω, so free-expansion segments stay well-defined. Counterdiabatic
// trajectories integrate σ|ḃ/b|. A radicand below −1e−12 throws numerical_error.
std::vector<double> path_length(const Trajectory& traj, double sigma2);

// γ(τ) − ℒ(τ), floored at 0 when within −1e−9 of it; a larger violation of the
// dispersion bound throws numerical_error.
double excess_bures(double gamma_tau, double bures_tau);

// ħℒ(τ)/ΔH̄. Zero dispersion is only consistent with ℒ = 0 (returns 0); zero
// dispersion with nonzero Bures angle throws std::invalid_argument.
double qsl_time(double bures_tau, double mean_dispersion);

// ---- counterdiabatic (transitionless-driving) closed forms, x = ω(τ)/ω₀ ----

// F(τ) = [(1 + x)²/(4x)]^(−σ²); symmetric under x → 1/x.
double tqd_fidelity(double x, double sigma2);

// γ(τ) = −α(σ/2)·log x with α = +1 for expansion (x < 1), −1 for compression.
// Inconsistent α/x combinations are rejected.
double tqd_gamma(double x, double sigma2, double alpha);

// δℒ(τ) = −α(σ/2)log x − arccos[((1 + x)/(2√x))^(−σ²)], α = sgn(1 − x); ≥ 0,
// symmetric under x → 1/x, and 0 at x = 1.
double tqd_excess_bures(double x, double sigma2);

// Quadratic small-(1 − x) expansion ασ(1 − x) + (ασ/2)(1 − x)², kept for
// reference only: it disagrees with the exact closed form near x = 1, where the
// exact δℒ vanishes to (at least) third order in (1 − x) — e.g. at x = 0.99,
// σ² = 1 the exact value is ≈ 2.1e−8 while this expansion gives ≈ 1.005e−2.
// Never used by the pipelines; see the README numerical notes.
double tqd_excess_bures_series(double x, double sigma2);

// var H_T = ħ²σ²(ḃ/b)² — energy variance of the counterdiabatic drive.
double tqd_energy_variance(double b, double bdot, double sigma2);

// Adiabatic-limit nonadiabatic factor Q* = 1 + ω̇²/(8ω⁴); requires ω > 0.
double adiabatic_q_star(double omega, double omega_dot);

// Dilatation generating function A(b) = [(b/2)(1 + 1/b²)]^(−σ²); A(1) = 1, and its
// derivatives at b = 1 encode the squeezing-operator moments (⟨C⟩ = 0, ⟨C²⟩ = ħ²σ²).
double generating_function(double b, double sigma2);

// ---- report assembly ----

// Which quadrature the report builder applies to the dispersion integrand.
enum class ReportQuadrature { simpson, trapezoid };

// Per-time QSL metrics on a trajectory grid, with a nested trapezoid-vs-Simpson
// disagreement recorded as the quadrature error estimate. q_star is NaN at nodes
// with ω² ≤ 0 (untrapped/inverted), where Q* is undefined.
struct QslReport {
    std::vector<double> t;
    std::vector<double> fidelity;
    std::vector<double> log_fidelity;
    std::vector<double> bures;
    std::vector<double> q_star;
    std::vector<double> var_h;
    std::vector<double> gamma_cum;
    double sigma2 = 0.0;
    double tau = 0.0;
    double delta_l = 0.0;
    double tau_qsl = 0.0;
    double mean_dispersion = 0.0;
    double quadrature_error = 0.0;  // |Simpson − trapezoid| at γ(τ)
};

QslReport build_report(const Trajectory& traj, double sigma2,
                       ReportQuadrature quad = ReportQuadrature::simpson);

} // namespace qsl
