// Trap-frequency schedules ω(t)² on [0, τ]: constant hold, linear ramp, the
// reverse-engineered shortcut-to-adiabaticity (STA) modulation built from a quintic
// scaling-factor ansatz, the smooth counterdiabatic reference ramp, sudden trap
// release (time of flight), and tabulated data interpolated with a monotone cubic.
//
// Every protocol is evaluated analytically — no numerical differentiation happens
// here. ω(t)² may be negative only for the STA kind and for tabulated data that
// encode one (transient trap inversion); ω(0) = ω₀ for every kind except time of
// flight, where ω ≡ 0.

#pragma once

#include <utility>
#include <vector>

namespace qsl {

enum class ProtocolKind {
    constant,
    linear_ramp,
    sta_polynomial,
    tqd_reference,
    time_of_flight,
    tabulated,
};

// Quintic scaling-factor ansatz value and derivatives at one time.
struct StaPoint {
    double b;      // scaling factor
    double bdot;   // ḃ
    double bddot;  // b̈
};

struct FrequencyProtocol {
    ProtocolKind kind = ProtocolKind::constant;
    double omega0 = 1.0;   // initial trap frequency (> 0)
    double omega_f = 1.0;  // final trap frequency (≥ 0; meaning depends on kind)
    double tau = 1.0;      // duration (> 0)

    // Tabulated kind only: strictly increasing times covering [0, τ], ω² samples,
    // and the monotone-cubic node slopes dω²/dt.
    std::vector<double> table_t;
    std::vector<double> table_w2;
    std::vector<double> table_d;

    // ω(t)² at t ∈ [0, τ]; throws std::domain_error outside the interval
    // (a relative slack of ~1e−9·τ absorbs grid round-off).
    double omega_sq(double t) const;

    // Analytic dω²/dt at t ∈ [0, τ].
    double omega_sq_dot(double t) const;

    // Final-to-initial frequency ratio x = ω(τ)/ω₀ (0 for time of flight; NaN for
    // tabulated data ending in an inverted trap).
    double x() const;
};

FrequencyProtocol constant_protocol(double omega0, double tau);

// ω(t) = ω₀ + (ω_F − ω₀)·t/τ.
FrequencyProtocol linear_ramp(double omega0, double omega_f, double tau);

// Quintic interpolation b(t) = 1 + (b_τ − 1)(10s³ − 15s⁴ + 6s⁵), s = t/τ, and its
// first two time derivatives. Boundary values b(0)=1, b(τ)=b_τ and vanishing
// ḃ, b̈ at both endpoints hold to machine precision.
StaPoint sta_scaling_factor(double t, double tau, double b_tau);

// Reverse-engineered STA trap frequency ω(t)² = ω₀²/b⁴ − b̈/b for the quintic b
// with target b_τ = √(ω₀/ω_F). May be negative mid-protocol (trap inversion).
double sta_frequency(double t, double tau, double omega0, double omega_f);

FrequencyProtocol sta_protocol(double omega0, double omega_f, double tau);

// Smooth reference ramp ω(t) = ω₀ + (ω_F − ω₀)(10s³ − 15s⁴ + 6s⁵): monotone, with
// ω̇ = ω̈ = 0 at both endpoints. Used as the counterdiabatic driving reference and
// as a kick-free ramp for adiabatic-limit studies.
double tqd_reference_frequency(double t, double tau, double omega0, double omega_f);

FrequencyProtocol tqd_reference_protocol(double omega0, double omega_f, double tau);

// Sudden release of the trap: ω(t) ≡ 0 on (0, τ]. ω₀ is the equilibrium frequency
// the cloud was prepared in; the duration is the observation window.
FrequencyProtocol tof_protocol(double omega0, double tau);

// Monotone piecewise-cubic interpolation of (t, ω²) samples. Requires ≥ 2 samples,
// strictly increasing times starting at 0, and ω²(0) > 0 (the initial trap must
// exist); exact at the sample points.
FrequencyProtocol tabulated_protocol(const std::vector<std::pair<double, double>>& samples);

} // namespace qsl
