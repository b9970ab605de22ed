// Serialization boundary: CSV tables (trajectory, report, measured series, sweep,
// ω² tables) and JSON (system specs, run configuration, summaries). Doubles are
// written with 17 significant digits so every emitted file parses back to the
// exact same binary values; nothing here depends on wall-clock state, so identical
// inputs produce byte-identical outputs.
//
// CSV schemas (headers are exact):
//   trajectory      t,b,bdot,omega_sq
//   report          t,F,logF,bures,q_star,var_h,gamma_cum
//   measured series t,b,s_b[,omega_sq]
//   sweep           axis_value,b_tau,F_tau,bures_tau,gamma_tau,delta_l,tau_qsl
//   ω² table        t,omega_sq
//
// Parse errors identify the offending line number. Unknown JSON fields are
// rejected everywhere a schema is defined.

#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "qsl/ermakov.hpp"
#include "qsl/experiment.hpp"
#include "qsl/metrics.hpp"
#include "qsl/protocol.hpp"
#include "qsl/system.hpp"

namespace qsl::io {

// Shortest faithful text form: %.17g. "nan"/"inf" spellings round-trip too.
std::string format_double(double x);

// Strict scalar parse (whole token must be consumed); throws std::invalid_argument.
double parse_double(const std::string& token);

// ---- CSV ----

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

// Reads the sampled columns; ω₀ is inferred from √(ω²(0)) (1 when the series starts
// untrapped), the duration from the last time, and driving defaults to bare.
Trajectory read_trajectory_csv(std::istream& is);

void write_report_csv(std::ostream& os, const QslReport& report);

// Reads the per-time columns and recomputes the scalar summary fields from them.
QslReport read_report_csv(std::istream& is, double sigma2 = 0.0);

void write_series_csv(std::ostream& os, const MeasuredSeries& series);
MeasuredSeries read_series_csv(std::istream& is);

void write_sweep_csv(std::ostream& os, const SweepResult& result);

// Rows whose metric columns are all NaN are marked as failed.
SweepResult read_sweep_csv(std::istream& is);

void write_omega_table_csv(std::ostream& os, const std::vector<std::pair<double, double>>& samples);
std::vector<std::pair<double, double>> read_omega_table_csv(std::istream& is);

// ---- JSON ----

// {"kind": "...", ...} with per-kind fields: d; n, d; n, d; n; n, lambda;
// e0_over_hw0; sigma2. Unknown or inapplicable fields are rejected.
SystemSpec system_from_json(const nlohmann::json& j);
nlohmann::json system_to_json(const SystemSpec& spec);

struct ProtocolConfig {
    std::string kind = "linear";  // constant | linear | sta | tqd_reference | tof | tabulated
    double omega0 = 1.0;
    double omega_f = 1.0;
    double tau = 10.0;
    std::string table;  // CSV path, tabulated kind only

    bool operator==(const ProtocolConfig&) const = default;
};

enum class OutputFormat { csv, json };

struct OutputConfig {
    std::string dir;  // empty: resolved by the caller (QSL_OUT_DIR or ".")
    OutputFormat format = OutputFormat::csv;

    bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
    SystemSpec system{SystemKind::custom, 1, 1, 0.0, 0.0, 1.0};
    ProtocolConfig protocol;
    SolverSettings solver;
    OutputConfig output;
    Driving driving = Driving::bare;

    bool operator==(const RunConfig&) const = default;
};

// Lossless round trip: config_from_json(config_to_json(c)) == c. Sections and
// fields are optional (defaults apply); unknown fields anywhere are rejected.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& config);

// Instantiate the configured protocol (loads the ω² table from disk for the
// tabulated kind).
FrequencyProtocol build_protocol(const ProtocolConfig& pc);

// Endpoint summary: σ², τ, b(τ), F(τ), log F(τ), ℒ(τ), γ(τ), δℒ, τ_QSL, ΔH̄, and
// the quadrature error estimate.
nlohmann::json summary_json(const QslReport& report, double b_tau);

// Full per-time arrays (the --format json alternative to the CSV tables).
// Non-finite entries (e.g. q_star where ω² ≤ 0) serialize as null.
nlohmann::json report_json(const QslReport& report);
nlohmann::json trajectory_json(const Trajectory& traj);

} // namespace qsl::io
