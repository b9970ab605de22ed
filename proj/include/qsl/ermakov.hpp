// Ermakov equation integration: b̈ + ω(t)²b = ω₀²/b³ with b(0) = 1, ḃ(0) = 0,
// solved for any frequency protocol with an adaptive embedded Runge–Kutta 5(4)
// integrator and quintic dense output, sampled onto a uniform grid. Analytic
// solutions (free expansion, adiabatic reference) are provided directly.
//
// The ODE is integrated in natural units (time rescaled to s = ω₀t), so protocols
// supplied in any consistent unit system are handled identically.

#pragma once

#include <utility>
#include <vector>

#include "qsl/protocol.hpp"

namespace qsl {

// How the trajectory's state is driven. Bare dynamics follow the trap alone; a
// counterdiabatic trajectory tracks the adiabatic reference exactly by means of an
// auxiliary squeezing field, which changes the energy-dispersion integrand used by
// the metrics layer (σ|ḃ/b| instead of the bare-trap form).
enum class Driving { bare, counterdiabatic };

// Uniformly sampled scaling-factor history. b₀ = 1 and ḃ₀ = 0 exactly for solver
// output; b > 0 everywhere.
struct Trajectory {
    std::vector<double> t;         // uniform grid on [0, τ]
    std::vector<double> b;         // scaling factor
    std::vector<double> bdot;      // ḃ (units of ω₀)
    std::vector<double> omega_sq;  // protocol ω(t)² at the nodes
    double omega0 = 1.0;
    double tau = 0.0;
    Driving driving = Driving::bare;
};

struct SolverSettings {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    int num_nodes = 2001;  // uniform output nodes, endpoints included

    bool operator==(const SolverSettings&) const = default;
};

// Adaptive integration with local error control at (rel_tol, abs_tol); dense output
// sampled on num_nodes uniform nodes. Throws std::invalid_argument for bad settings
// and qsl::numerical_error (with the failure time) on step-size underflow, step-count
// exhaustion, or collapse of the scaling factor (b ≤ 1e−8).
Trajectory solve_ermakov(const FrequencyProtocol& protocol, int num_nodes = 2001,
                         double rel_tol = 1e-10, double abs_tol = 1e-12);

inline Trajectory solve_ermakov(const FrequencyProtocol& protocol, const SolverSettings& s) {
    return solve_ermakov(protocol, s.num_nodes, s.rel_tol, s.abs_tol);
}

// Free expansion after sudden release: b = √(1 + ω₀²t²), ḃ = ω₀²t/b.
std::pair<double, double> analytic_tof(double omega0, double t);

// Adiabatic reference trajectory b(t) = √(ω₀/ω(t)), ḃ by the chain rule, tagged as
// counterdiabatic driving. Requires ω(t) > 0 at every grid node (throws
// std::domain_error otherwise).
Trajectory adiabatic_scaling(const FrequencyProtocol& protocol, int num_nodes = 2001);

} // namespace qsl
