// End-to-end pipelines: simulate a protocol into a QslReport, sweep a parameter
// axis (in parallel, with per-value failure capture), ingest measured cloud-size
// series, and propagate measurement uncertainty into every derived metric with the
// first-order formula s_X = √(Σ_m (∂X/∂b_m)² s_{b_m}²), the partial derivatives
// taken by central finite differences.

#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qsl/ermakov.hpp"
#include "qsl/metrics.hpp"
#include "qsl/protocol.hpp"
#include "qsl/system.hpp"

namespace qsl {

// Measured cloud-size time series b(t_m) ± s_{b_m} on a uniform grid t_m = mτ/M,
// with the trap protocol ω²(t_m) alongside (required by Q* and the dispersion).
struct MeasuredSeries {
    std::vector<double> t;
    std::vector<double> b;
    std::vector<double> s_b;
    std::vector<double> omega_sq;
};

// Validates lengths, uniform increasing times, positive b, nonnegative s_b.
// Returns true when b₀ is NOT within 3·s_{b₀} of 1 — a warning condition (the
// series does not start at equilibrium), deliberately not an error.
bool validate_series(const MeasuredSeries& series);

enum class SweepAxis { tau, omega_f, sigma2 };

struct SweepRow {
    double axis_value = 0.0;
    double b_tau = 0.0;
    double f_tau = 0.0;
    double bures_tau = 0.0;
    double gamma_tau = 0.0;
    double delta_l = 0.0;
    double tau_qsl = 0.0;
    bool ok = false;
    bool numerical_failure = false;  // distinguishes integrator faults from bad parameters
    std::string error;
};

struct SweepResult {
    std::string axis;
    std::vector<SweepRow> rows;
};

// Solve the protocol and assemble the full metric report for the system's σ².
QslReport run_protocol(const SystemSpec& spec, const FrequencyProtocol& protocol,
                       const SolverSettings& settings = {});

// Counterdiabatic pipeline: adiabatic reference trajectory of the protocol
// (requires ω > 0 throughout) with the transitionless-driving dispersion.
QslReport run_counterdiabatic(const SystemSpec& spec, const FrequencyProtocol& protocol,
                              int num_nodes = 2001);

// One run per axis value, rows in input order; values may be processed in
// parallel (jobs ≤ 0 selects the hardware thread count). A failing value is
// recorded in its row without aborting the sweep. The prototype protocol supplies
// the parameters the axis does not override; tau/omega_f axes require a
// closed-form protocol kind (not tabulated), and the sigma2 axis reuses the
// prototype as-is while sweeping the system constant.
SweepResult sweep(const SystemSpec& spec, const FrequencyProtocol& prototype, SweepAxis axis,
                  const std::vector<double>& values, const SolverSettings& settings = {},
                  int jobs = 0);

// Duration-free closed-form sweep over x = ω(τ)/ω₀ for counterdiabatic driving:
// per row b_τ = 1/√x, the closed-form fidelity/Bures angle/path length/excess
// angle, and tau_qsl = NaN (no duration exists in these expressions).
SweepResult tqd_closed_form_sweep(const SystemSpec& spec, const std::vector<double>& x_values);

// Forward difference ḃ_m = (b_{m+1} − b_m)·M/τ, with a backward difference at the
// final node where the forward stencil does not exist.
std::vector<double> discretized_derivative(const MeasuredSeries& series);

// Same metric pipeline as run_protocol, fed by the measured b_m and the
// discretized ḃ_m; cumulative γ by trapezoid quadrature (measured data are not
// smooth enough for Simpson to help).
QslReport metrics_from_data(const SystemSpec& spec, const MeasuredSeries& series);

// Scalar metrics of a measured series that uncertainty can be propagated into.
enum class Metric { gamma_tau, bures_tau, fidelity_tau, delta_l, tau_qsl, b_final };

std::string_view metric_name(Metric m);

// (X, s_X): the metric evaluated on the series and its first-order propagated
// standard deviation. Partials use per-node central steps h_m = max(1e−6, 1e−6·b_m);
// nodes with s_{b_m} = 0 contribute nothing and are skipped. Throws
// numerical_error if the metric turns non-finite at a perturbed point.
std::pair<double, double> propagate_uncertainty(const SystemSpec& spec,
                                                const MeasuredSeries& series, Metric target);

} // namespace qsl
