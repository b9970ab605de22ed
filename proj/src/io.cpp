// CSV/JSON serialization: exact-header tables with 17-significant-digit doubles
// (lossless round trips), line-numbered parse errors, strict JSON schemas that
// reject unknown fields, and canonical emitters so identical inputs always yield
// byte-identical files.

#include "qsl/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qsl::io {

using nlohmann::json;

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_double(const std::string& token) {
    if (token.empty()) throw std::invalid_argument("empty numeric field");
    const char* begin = token.c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end != begin + token.size())
        throw std::invalid_argument("invalid number '" + token + "'");
    return value;
}

namespace {

[[noreturn]] void fail_line(std::size_t line_no, const std::string& what) {
    throw std::invalid_argument("line " + std::to_string(line_no) + ": " + what);
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

// Reads a numeric CSV whose header must equal one of `headers` exactly; returns
// the index of the header that matched and the data in column-major order.
std::pair<std::size_t, std::vector<std::vector<double>>>
read_numeric_csv(std::istream& is, const std::vector<std::string>& headers) {
    std::string line;
    if (!std::getline(is, line))
        fail_line(1, "missing header, expected '" + headers.front() + "'");
    line = strip_cr(line);
    std::size_t which = headers.size();
    for (std::size_t i = 0; i < headers.size(); ++i)
        if (line == headers[i]) { which = i; break; }
    if (which == headers.size())
        fail_line(1, "unexpected header '" + line + "', expected '" + headers.front() + "'");
    const std::size_t ncols =
        1 + static_cast<std::size_t>(std::count(headers[which].begin(), headers[which].end(), ','));
    std::vector<std::vector<double>> cols(ncols);
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        line = strip_cr(line);
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t pos = line.find(',', start);
            if (pos == std::string::npos) {
                fields.push_back(line.substr(start));
                break;
            }
            fields.push_back(line.substr(start, pos - start));
            start = pos + 1;
        }
        if (fields.size() != ncols)
            fail_line(line_no, "expected " + std::to_string(ncols) + " fields, got " +
                                   std::to_string(fields.size()));
        for (std::size_t c = 0; c < ncols; ++c) {
            try {
                cols[c].push_back(parse_double(fields[c]));
            } catch (const std::exception&) {
                fail_line(line_no, "invalid number '" + fields[c] + "'");
            }
        }
    }
    if (cols[0].empty()) fail_line(2, "no data rows");
    return {which, std::move(cols)};
}

void write_row(std::ostream& os, std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
        if (!first) os << ',';
        os << format_double(v);
        first = false;
    }
    os << '\n';
}

} // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "t,b,bdot,omega_sq\n";
    for (std::size_t i = 0; i < traj.t.size(); ++i)
        write_row(os, {traj.t[i], traj.b[i], traj.bdot[i], traj.omega_sq[i]});
}

Trajectory read_trajectory_csv(std::istream& is) {
    auto [which, cols] = read_numeric_csv(is, {"t,b,bdot,omega_sq"});
    (void)which;
    Trajectory traj;
    traj.t = std::move(cols[0]);
    traj.b = std::move(cols[1]);
    traj.bdot = std::move(cols[2]);
    traj.omega_sq = std::move(cols[3]);
    traj.omega0 = traj.omega_sq.front() > 0.0 ? std::sqrt(traj.omega_sq.front()) : 1.0;
    traj.tau = traj.t.back();
    traj.driving = Driving::bare;
    return traj;
}

void write_report_csv(std::ostream& os, const QslReport& report) {
    os << "t,F,logF,bures,q_star,var_h,gamma_cum\n";
    for (std::size_t i = 0; i < report.t.size(); ++i)
        write_row(os, {report.t[i], report.fidelity[i], report.log_fidelity[i], report.bures[i],
                       report.q_star[i], report.var_h[i], report.gamma_cum[i]});
}

QslReport read_report_csv(std::istream& is, double sigma2) {
    auto [which, cols] = read_numeric_csv(is, {"t,F,logF,bures,q_star,var_h,gamma_cum"});
    (void)which;
    QslReport report;
    report.t = std::move(cols[0]);
    report.fidelity = std::move(cols[1]);
    report.log_fidelity = std::move(cols[2]);
    report.bures = std::move(cols[3]);
    report.q_star = std::move(cols[4]);
    report.var_h = std::move(cols[5]);
    report.gamma_cum = std::move(cols[6]);
    report.sigma2 = sigma2;
    report.tau = report.t.back();
    report.delta_l = report.gamma_cum.back() - report.bures.back();
    report.mean_dispersion = report.tau > 0.0 ? report.gamma_cum.back() / report.tau : 0.0;
    report.tau_qsl = qsl_time(report.bures.back(), report.mean_dispersion);
    report.quadrature_error = 0.0;  // not recorded in the CSV form
    return report;
}

void write_series_csv(std::ostream& os, const MeasuredSeries& series) {
    const bool with_w2 = !series.omega_sq.empty();
    os << (with_w2 ? "t,b,s_b,omega_sq\n" : "t,b,s_b\n");
    for (std::size_t i = 0; i < series.t.size(); ++i) {
        if (with_w2)
            write_row(os, {series.t[i], series.b[i], series.s_b[i], series.omega_sq[i]});
        else
            write_row(os, {series.t[i], series.b[i], series.s_b[i]});
    }
}

MeasuredSeries read_series_csv(std::istream& is) {
    auto [which, cols] = read_numeric_csv(is, {"t,b,s_b,omega_sq", "t,b,s_b"});
    MeasuredSeries series;
    series.t = std::move(cols[0]);
    series.b = std::move(cols[1]);
    series.s_b = std::move(cols[2]);
    if (which == 0) series.omega_sq = std::move(cols[3]);
    return series;
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
    os << "axis_value,b_tau,F_tau,bures_tau,gamma_tau,delta_l,tau_qsl\n";
    for (const SweepRow& row : result.rows)
        write_row(os, {row.axis_value, row.b_tau, row.f_tau, row.bures_tau, row.gamma_tau,
                       row.delta_l, row.tau_qsl});
}

SweepResult read_sweep_csv(std::istream& is) {
    auto [which, cols] =
        read_numeric_csv(is, {"axis_value,b_tau,F_tau,bures_tau,gamma_tau,delta_l,tau_qsl"});
    (void)which;
    SweepResult result;
    result.rows.resize(cols[0].size());
    for (std::size_t i = 0; i < cols[0].size(); ++i) {
        SweepRow& row = result.rows[i];
        row.axis_value = cols[0][i];
        row.b_tau = cols[1][i];
        row.f_tau = cols[2][i];
        row.bures_tau = cols[3][i];
        row.gamma_tau = cols[4][i];
        row.delta_l = cols[5][i];
        row.tau_qsl = cols[6][i];
        const bool all_nan = std::isnan(row.b_tau) && std::isnan(row.f_tau) &&
                             std::isnan(row.bures_tau) && std::isnan(row.gamma_tau) &&
                             std::isnan(row.delta_l) && std::isnan(row.tau_qsl);
        row.ok = !all_nan;
        row.numerical_failure = false;
        if (all_nan) row.error = "row recorded as failed";
    }
    return result;
}

void write_omega_table_csv(std::ostream& os,
                           const std::vector<std::pair<double, double>>& samples) {
    os << "t,omega_sq\n";
    for (const auto& [t, w2] : samples) write_row(os, {t, w2});
}

std::vector<std::pair<double, double>> read_omega_table_csv(std::istream& is) {
    auto [which, cols] = read_numeric_csv(is, {"t,omega_sq"});
    (void)which;
    std::vector<std::pair<double, double>> samples;
    samples.reserve(cols[0].size());
    for (std::size_t i = 0; i < cols[0].size(); ++i) samples.emplace_back(cols[0][i], cols[1][i]);
    return samples;
}

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* key : allowed)
            if (it.key() == key) { ok = true; break; }
        if (!ok)
            throw std::invalid_argument("unknown field '" + it.key() + "' in " + where);
    }
}

double json_number(const json& j, const char* key, const char* where) {
    if (!j.contains(key))
        throw std::invalid_argument(std::string(where) + " requires field '" + key + "'");
    const json& v = j.at(key);
    if (!v.is_number())
        throw std::invalid_argument("field '" + std::string(key) + "' in " + where +
                                    " must be a number");
    return v.get<double>();
}

double json_number_or(const json& j, const char* key, double fallback, const char* where) {
    return j.contains(key) ? json_number(j, key, where) : fallback;
}

int json_int_or(const json& j, const char* key, int fallback, const char* where) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer())
        throw std::invalid_argument("field '" + std::string(key) + "' in " + where +
                                    " must be an integer");
    return v.get<int>();
}

std::string json_string(const json& j, const char* key, const char* where) {
    const json& v = j.at(key);
    if (!v.is_string())
        throw std::invalid_argument("field '" + std::string(key) + "' in " + where +
                                    " must be a string");
    return v.get<std::string>();
}

} // namespace

SystemSpec system_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("system spec must be a JSON object");
    if (!j.contains("kind"))
        throw std::invalid_argument("system spec requires a 'kind' string");
    const std::string kind = json_string(j, "kind", "system spec");
    if (kind == "single_oscillator") {
        check_keys(j, {"kind", "d"}, "system spec");
        return single_oscillator(json_int_or(j, "d", 3, "system spec"));
    }
    if (kind == "ideal_bose") {
        check_keys(j, {"kind", "n", "d"}, "system spec");
        return ideal_bose(json_int_or(j, "n", 1, "system spec"),
                          json_int_or(j, "d", 3, "system spec"));
    }
    if (kind == "polarized_fermi") {
        check_keys(j, {"kind", "n", "d"}, "system spec");
        return polarized_fermi(json_int_or(j, "n", 1, "system spec"),
                               json_int_or(j, "d", 3, "system spec"));
    }
    if (kind == "tonks_girardeau") {
        check_keys(j, {"kind", "n"}, "system spec");
        return tonks_girardeau(json_int_or(j, "n", 1, "system spec"));
    }
    if (kind == "calogero_sutherland") {
        check_keys(j, {"kind", "n", "lambda"}, "system spec");
        return calogero_sutherland(json_int_or(j, "n", 1, "system spec"),
                                   json_number_or(j, "lambda", 0.0, "system spec"));
    }
    if (kind == "unitary_fermi") {
        check_keys(j, {"kind", "e0_over_hw0"}, "system spec");
        return unitary_fermi(json_number(j, "e0_over_hw0", "system spec"));
    }
    if (kind == "custom") {
        check_keys(j, {"kind", "sigma2"}, "system spec");
        return custom_system(json_number(j, "sigma2", "system spec"));
    }
    throw std::invalid_argument("unknown system kind '" + kind + "'");
}

json system_to_json(const SystemSpec& spec) {
    json j;
    j["kind"] = std::string(kind_name(spec.kind));
    switch (spec.kind) {
        case SystemKind::single_oscillator:
            j["d"] = spec.d;
            break;
        case SystemKind::ideal_bose:
        case SystemKind::polarized_fermi:
            j["n"] = spec.n;
            j["d"] = spec.d;
            break;
        case SystemKind::tonks_girardeau:
            j["n"] = spec.n;
            break;
        case SystemKind::calogero_sutherland:
            j["n"] = spec.n;
            j["lambda"] = spec.lambda;
            break;
        case SystemKind::unitary_fermi:
            j["e0_over_hw0"] = spec.e0_over_hw0;
            break;
        case SystemKind::custom:
            j["sigma2"] = spec.sigma2;
            break;
    }
    return j;
}

RunConfig config_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("run config must be a JSON object");
    check_keys(j, {"system", "protocol", "solver", "output", "driving"}, "run config");
    RunConfig config;
    if (j.contains("system")) config.system = system_from_json(j.at("system"));
    if (j.contains("protocol")) {
        const json& p = j.at("protocol");
        if (!p.is_object()) throw std::invalid_argument("'protocol' must be a JSON object");
        check_keys(p, {"kind", "omega0", "omega_f", "tau", "table"}, "protocol config");
        if (p.contains("kind")) {
            const std::string kind = json_string(p, "kind", "protocol config");
            if (kind != "constant" && kind != "linear" && kind != "sta" &&
                kind != "tqd_reference" && kind != "tof" && kind != "tabulated")
                throw std::invalid_argument("unknown protocol kind '" + kind + "'");
            config.protocol.kind = kind;
        }
        config.protocol.omega0 =
            json_number_or(p, "omega0", config.protocol.omega0, "protocol config");
        config.protocol.omega_f =
            json_number_or(p, "omega_f", config.protocol.omega_f, "protocol config");
        config.protocol.tau = json_number_or(p, "tau", config.protocol.tau, "protocol config");
        if (p.contains("table")) config.protocol.table = json_string(p, "table", "protocol config");
    }
    if (j.contains("solver")) {
        const json& s = j.at("solver");
        if (!s.is_object()) throw std::invalid_argument("'solver' must be a JSON object");
        check_keys(s, {"rel_tol", "abs_tol", "num_nodes"}, "solver config");
        config.solver.rel_tol = json_number_or(s, "rel_tol", config.solver.rel_tol, "solver config");
        config.solver.abs_tol = json_number_or(s, "abs_tol", config.solver.abs_tol, "solver config");
        config.solver.num_nodes =
            json_int_or(s, "num_nodes", config.solver.num_nodes, "solver config");
    }
    if (j.contains("output")) {
        const json& o = j.at("output");
        if (!o.is_object()) throw std::invalid_argument("'output' must be a JSON object");
        check_keys(o, {"dir", "format"}, "output config");
        if (o.contains("dir")) config.output.dir = json_string(o, "dir", "output config");
        if (o.contains("format")) {
            const std::string format = json_string(o, "format", "output config");
            if (format == "csv")
                config.output.format = OutputFormat::csv;
            else if (format == "json")
                config.output.format = OutputFormat::json;
            else
                throw std::invalid_argument("output format must be 'csv' or 'json', got '" +
                                            format + "'");
        }
    }
    if (j.contains("driving")) {
        const std::string driving = json_string(j, "driving", "run config");
        if (driving == "bare")
            config.driving = Driving::bare;
        else if (driving == "counterdiabatic")
            config.driving = Driving::counterdiabatic;
        else
            throw std::invalid_argument("driving must be 'bare' or 'counterdiabatic', got '" +
                                        driving + "'");
    }
    return config;
}

json config_to_json(const RunConfig& config) {
    json j;
    j["system"] = system_to_json(config.system);
    json p;
    p["kind"] = config.protocol.kind;
    p["omega0"] = config.protocol.omega0;
    p["omega_f"] = config.protocol.omega_f;
    p["tau"] = config.protocol.tau;
    if (!config.protocol.table.empty()) p["table"] = config.protocol.table;
    j["protocol"] = p;
    json s;
    s["rel_tol"] = config.solver.rel_tol;
    s["abs_tol"] = config.solver.abs_tol;
    s["num_nodes"] = config.solver.num_nodes;
    j["solver"] = s;
    json o;
    if (!config.output.dir.empty()) o["dir"] = config.output.dir;
    o["format"] = config.output.format == OutputFormat::csv ? "csv" : "json";
    j["output"] = o;
    j["driving"] = config.driving == Driving::bare ? "bare" : "counterdiabatic";
    return j;
}

FrequencyProtocol build_protocol(const ProtocolConfig& pc) {
    if (pc.kind == "constant") return constant_protocol(pc.omega0, pc.tau);
    if (pc.kind == "linear") return linear_ramp(pc.omega0, pc.omega_f, pc.tau);
    if (pc.kind == "sta") return sta_protocol(pc.omega0, pc.omega_f, pc.tau);
    if (pc.kind == "tqd_reference") return tqd_reference_protocol(pc.omega0, pc.omega_f, pc.tau);
    if (pc.kind == "tof") return tof_protocol(pc.omega0, pc.tau);
    if (pc.kind == "tabulated") {
        if (pc.table.empty())
            throw std::invalid_argument("tabulated protocol requires a 'table' CSV path");
        std::ifstream in(pc.table);
        if (!in) throw std::invalid_argument("cannot open frequency table '" + pc.table + "'");
        return tabulated_protocol(read_omega_table_csv(in));
    }
    throw std::invalid_argument("unknown protocol kind '" + pc.kind + "'");
}

json summary_json(const QslReport& report, double b_tau) {
    if (report.t.empty()) throw std::invalid_argument("cannot summarize an empty report");
    json j;
    j["sigma2"] = report.sigma2;
    j["tau"] = report.tau;
    j["b_tau"] = b_tau;
    j["fidelity_tau"] = report.fidelity.back();
    j["log_fidelity_tau"] = report.log_fidelity.back();
    j["bures_tau"] = report.bures.back();
    j["gamma_tau"] = report.gamma_cum.back();
    j["delta_l"] = report.delta_l;
    j["tau_qsl"] = report.tau_qsl;
    j["mean_dispersion"] = report.mean_dispersion;
    j["quadrature_error"] = report.quadrature_error;
    return j;
}

json report_json(const QslReport& report) {
    json j;
    j["t"] = report.t;
    j["fidelity"] = report.fidelity;
    j["log_fidelity"] = report.log_fidelity;
    j["bures"] = report.bures;
    j["q_star"] = report.q_star;
    j["var_h"] = report.var_h;
    j["gamma_cum"] = report.gamma_cum;
    j["sigma2"] = report.sigma2;
    j["tau"] = report.tau;
    j["delta_l"] = report.delta_l;
    j["tau_qsl"] = report.tau_qsl;
    j["mean_dispersion"] = report.mean_dispersion;
    j["quadrature_error"] = report.quadrature_error;
    return j;
}

json trajectory_json(const Trajectory& traj) {
    json j;
    j["t"] = traj.t;
    j["b"] = traj.b;
    j["bdot"] = traj.bdot;
    j["omega_sq"] = traj.omega_sq;
    j["omega0"] = traj.omega0;
    j["tau"] = traj.tau;
    j["driving"] = traj.driving == Driving::bare ? "bare" : "counterdiabatic";
    return j;
}

} // namespace qsl::io
