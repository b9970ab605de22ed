// qsl — command-line front end for the quantum-speed-limit diagnostics library.
//
// Subcommands:
//   simulate   integrate a trap-frequency protocol, write trajectory/report/summary
//   sweep      scan one parameter axis (tau, omega-f, sigma2, or closed-form x)
//   ingest     compute metrics + uncertainties from a measured cloud-size series
//   catalog    list the built-in systems and their σ² constants
//
// Configuration precedence: command-line flags > --config JSON file > defaults.
// Output directory: --out > QSL_OUT_DIR environment variable > current directory.
// Exit codes: 0 success, 2 usage/config error, 3 numerical failure.
// Outputs are deterministic: identical inputs yield byte-identical files.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qsl/ermakov.hpp"
#include "qsl/errors.hpp"
#include "qsl/experiment.hpp"
#include "qsl/io.hpp"
#include "qsl/metrics.hpp"
#include "qsl/protocol.hpp"
#include "qsl/system.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Raw option storage for the flags shared by simulate/sweep/ingest. Whether a
// flag was actually given is queried through the subcommand (flag > config file).
struct ModelArgs {
    std::string config_path;
    std::string system_arg;
    std::string protocol_kind = "linear";
    double omega0 = 1.0;
    double omega_f = 1.0;
    double tau = 10.0;
    std::string table;
    std::string driving = "bare";
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    int nodes = 2001;
    std::string out_dir;
    std::string format = "csv";
    double omega0_hz = 0.0;
    double omega_f_hz = 0.0;
    double tau_s = 0.0;
};

void add_model_options(CLI::App* sub, ModelArgs& a, bool with_driving) {
    sub->add_option("--config", a.config_path, "JSON run-configuration file");
    sub->add_option("--system", a.system_arg,
                    "system spec: inline JSON or @file (default: custom sigma2=1)");
    sub->add_option("--protocol", a.protocol_kind,
                    "frequency protocol kind (default: linear)")
        ->check(CLI::IsMember({"constant", "linear", "sta", "tqd_reference", "tof", "tabulated"}));
    sub->add_option("--omega0", a.omega0, "initial trap frequency omega0 (default 1)");
    sub->add_option("--omega-f", a.omega_f, "final trap frequency omega_F (default 1)");
    sub->add_option("--tau", a.tau, "protocol duration in units of 1/omega0 (default 10)");
    sub->add_option("--table", a.table, "omega^2 table CSV (tabulated protocol)");
    if (with_driving)
        sub->add_option("--driving", a.driving, "bare | counterdiabatic (default: bare)")
            ->check(CLI::IsMember({"bare", "counterdiabatic"}));
    sub->add_option("--rel-tol", a.rel_tol, "integrator relative tolerance (default 1e-10)");
    sub->add_option("--abs-tol", a.abs_tol, "integrator absolute tolerance (default 1e-12)");
    sub->add_option("--nodes", a.nodes, "output grid size (default 2001)");
    sub->add_option("--out", a.out_dir, "output directory (default: $QSL_OUT_DIR or .)");
    sub->add_option("--format", a.format, "per-time output format: csv | json (default csv)")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--omega0-hz", a.omega0_hz,
                    "physical initial frequency f0 in Hz (omega0 = 2*pi*f0); switches the "
                    "boundary to physical units");
    sub->add_option("--omega-f-hz", a.omega_f_hz, "physical final frequency in Hz");
    sub->add_option("--tau-s", a.tau_s, "physical protocol duration in seconds");
}

qsl::SystemSpec parse_system_arg(const std::string& arg) {
    json j;
    if (!arg.empty() && arg.front() == '@') {
        const std::string path = arg.substr(1);
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("cannot open system file '" + path + "'");
        j = json::parse(in);
    } else {
        j = json::parse(arg);
    }
    return qsl::io::system_from_json(j);
}

// Merge precedence: defaults < --config file < explicit flags; physical-unit
// flags, when present, convert f0/f_F/tau_s at the boundary and override the
// dimensionless protocol parameters.
qsl::io::RunConfig resolve_config(CLI::App* sub, const ModelArgs& a) {
    qsl::io::RunConfig config;
    if (sub->count("--config")) {
        std::ifstream in(a.config_path);
        if (!in) throw std::invalid_argument("cannot open config '" + a.config_path + "'");
        config = qsl::io::config_from_json(json::parse(in));
    }
    if (sub->count("--system")) config.system = parse_system_arg(a.system_arg);
    if (sub->count("--protocol")) config.protocol.kind = a.protocol_kind;
    if (sub->count("--omega0")) config.protocol.omega0 = a.omega0;
    if (sub->count("--omega-f")) config.protocol.omega_f = a.omega_f;
    if (sub->count("--tau")) config.protocol.tau = a.tau;
    if (sub->count("--table")) config.protocol.table = a.table;
    const CLI::Option* driving_opt = sub->get_option_no_throw("--driving");
    if (driving_opt != nullptr && driving_opt->count() != 0u)
        config.driving = a.driving == "bare" ? qsl::Driving::bare : qsl::Driving::counterdiabatic;
    if (sub->count("--rel-tol")) config.solver.rel_tol = a.rel_tol;
    if (sub->count("--abs-tol")) config.solver.abs_tol = a.abs_tol;
    if (sub->count("--nodes")) config.solver.num_nodes = a.nodes;
    if (sub->count("--out")) config.output.dir = a.out_dir;
    if (sub->count("--format"))
        config.output.format =
            a.format == "csv" ? qsl::io::OutputFormat::csv : qsl::io::OutputFormat::json;

    const bool any_hz =
        sub->count("--omega0-hz") || sub->count("--omega-f-hz") || sub->count("--tau-s");
    if (any_hz) {
        if (!sub->count("--omega0-hz"))
            throw std::invalid_argument("--omega-f-hz/--tau-s require --omega0-hz");
        if (!(a.omega0_hz > 0.0) || !std::isfinite(a.omega0_hz))
            throw std::invalid_argument("--omega0-hz must be finite and > 0");
        config.protocol.omega0 = 1.0;  // natural units: time measured in 1/omega0
        if (sub->count("--omega-f-hz")) {
            if (!(a.omega_f_hz >= 0.0) || !std::isfinite(a.omega_f_hz))
                throw std::invalid_argument("--omega-f-hz must be finite and >= 0");
            config.protocol.omega_f = a.omega_f_hz / a.omega0_hz;
        }
        if (sub->count("--tau-s")) {
            if (!(a.tau_s > 0.0) || !std::isfinite(a.tau_s))
                throw std::invalid_argument("--tau-s must be finite and > 0");
            config.protocol.tau = 2.0 * std::numbers::pi * a.omega0_hz * a.tau_s;
        }
    }

    if (config.output.dir.empty()) {
        const char* env = std::getenv("QSL_OUT_DIR");
        config.output.dir = (env != nullptr && *env != '\0') ? env : ".";
    }
    return config;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("failed while writing '" + path.string() + "'");
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

int run_simulate(CLI::App* sub, const ModelArgs& a) {
    const qsl::io::RunConfig config = resolve_config(sub, a);
    const double sigma2 = qsl::sigma2_of(config.system);
    const qsl::FrequencyProtocol protocol = qsl::io::build_protocol(config.protocol);
    const qsl::Trajectory traj =
        config.driving == qsl::Driving::counterdiabatic
            ? qsl::adiabatic_scaling(protocol, config.solver.num_nodes)
            : qsl::solve_ermakov(protocol, config.solver.num_nodes, config.solver.rel_tol,
                                 config.solver.abs_tol);
    const qsl::QslReport report = qsl::build_report(traj, sigma2);

    const fs::path dir{config.output.dir};
    fs::create_directories(dir);
    if (config.output.format == qsl::io::OutputFormat::csv) {
        std::ostringstream tcsv;
        qsl::io::write_trajectory_csv(tcsv, traj);
        write_file(dir / "trajectory.csv", tcsv.str());
        std::ostringstream rcsv;
        qsl::io::write_report_csv(rcsv, report);
        write_file(dir / "report.csv", rcsv.str());
    } else {
        write_file(dir / "trajectory.json", dump_json(qsl::io::trajectory_json(traj)));
        write_file(dir / "report.json", dump_json(qsl::io::report_json(report)));
    }
    const json summary = qsl::io::summary_json(report, traj.b.back());
    write_file(dir / "summary.json", dump_json(summary));
    std::cout << summary.dump(2) << "\n";
    return 0;
}

std::vector<double> parse_value_list(const std::string& csv) {
    std::vector<double> values;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = csv.find(',', start);
        const std::string token =
            pos == std::string::npos ? csv.substr(start) : csv.substr(start, pos - start);
        values.push_back(qsl::io::parse_double(token));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return values;
}

int run_sweep(CLI::App* sub, const ModelArgs& a, const std::string& axis,
              const std::string& values_csv, double from, double to, int steps,
              const std::string& closed_form, bool keep_going, int jobs) {
    const qsl::io::RunConfig config = resolve_config(sub, a);

    std::vector<double> values;
    if (sub->count("--values")) {
        if (sub->count("--from") || sub->count("--to"))
            throw std::invalid_argument("give either --values or --from/--to, not both");
        values = parse_value_list(values_csv);
    } else {
        if (!sub->count("--from") || !sub->count("--to"))
            throw std::invalid_argument("sweep needs --values or both --from and --to");
        if (steps < 1) throw std::invalid_argument("--steps must be >= 1");
        if (steps == 1) {
            values.push_back(from);
        } else {
            values.reserve(static_cast<std::size_t>(steps));
            // the final point is pinned to `to` so the range endpoint is hit exactly
            for (int i = 0; i < steps; ++i)
                values.push_back(i + 1 == steps
                                     ? to
                                     : from + (to - from) * static_cast<double>(i) /
                                                  static_cast<double>(steps - 1));
        }
    }

    qsl::SweepResult result;
    json manifest;
    if (axis == "x") {
        if (closed_form != "tqd")
            throw std::invalid_argument("--axis x requires --closed-form tqd");
        result = qsl::tqd_closed_form_sweep(config.system, values);
        manifest["closed_form"] = "tqd";
    } else {
        if (sub->count("--closed-form"))
            throw std::invalid_argument("--closed-form applies only to --axis x");
        const qsl::SweepAxis sweep_axis = axis == "tau"       ? qsl::SweepAxis::tau
                                          : axis == "omega-f" ? qsl::SweepAxis::omega_f
                                                              : qsl::SweepAxis::sigma2;
        const qsl::FrequencyProtocol prototype = qsl::io::build_protocol(config.protocol);
        result = qsl::sweep(config.system, prototype, sweep_axis, values, config.solver, jobs);
        const json full = qsl::io::config_to_json(config);
        manifest["protocol"] = full.at("protocol");
        manifest["solver"] = full.at("solver");
    }
    manifest["axis"] = result.axis;
    manifest["values"] = values;
    manifest["system"] = qsl::io::system_to_json(config.system);
    json rows = json::array();
    for (const qsl::SweepRow& row : result.rows) {
        json r;
        r["axis_value"] = row.axis_value;
        r["ok"] = row.ok;
        if (!row.ok) r["error"] = row.error;
        rows.push_back(std::move(r));
    }
    manifest["rows"] = std::move(rows);

    if (!keep_going) {
        for (const qsl::SweepRow& row : result.rows) {
            if (row.ok) continue;
            const std::string at = "sweep value " + qsl::io::format_double(row.axis_value);
            if (row.numerical_failure) throw qsl::numerical_error(at + ": " + row.error);
            throw std::invalid_argument(at + ": " + row.error);
        }
    }

    const fs::path dir{config.output.dir};
    fs::create_directories(dir);
    std::ostringstream csv;
    qsl::io::write_sweep_csv(csv, result);
    write_file(dir / "sweep.csv", csv.str());
    write_file(dir / "sweep_manifest.json", dump_json(manifest));

    std::size_t failed = 0;
    for (const qsl::SweepRow& row : result.rows)
        if (!row.ok) ++failed;
    if (failed > 0)
        std::cerr << "warning: " << failed << " of " << result.rows.size()
                  << " sweep rows failed (recorded in sweep_manifest.json)\n";
    return 0;
}

int run_ingest(CLI::App* sub, const ModelArgs& a, const std::string& data_path) {
    const qsl::io::RunConfig config = resolve_config(sub, a);
    std::ifstream in(data_path);
    if (!in) throw std::invalid_argument("cannot open data file '" + data_path + "'");
    qsl::MeasuredSeries series = qsl::io::read_series_csv(in);

    if (qsl::validate_series(series))
        std::cerr << "warning: first sample b = " << qsl::io::format_double(series.b.front())
                  << " deviates from 1 by more than 3 standard deviations; the metrics assume "
                     "the series starts from the trap ground state (b(0) = 1)\n";

    if (series.omega_sq.empty()) {
        if (!sub->count("--protocol") && !sub->count("--config") && !sub->count("--table"))
            throw std::invalid_argument(
                "data file has no omega_sq column; pass --protocol/--omega0/--omega-f/--tau "
                "(or --config) so the trap frequency is known");
        const qsl::FrequencyProtocol protocol = qsl::io::build_protocol(config.protocol);
        series.omega_sq.reserve(series.t.size());
        for (double t : series.t) series.omega_sq.push_back(protocol.omega_sq(t));
    }

    const qsl::QslReport report = qsl::metrics_from_data(config.system, series);

    json uncertainties;
    for (qsl::Metric m :
         {qsl::Metric::gamma_tau, qsl::Metric::bures_tau, qsl::Metric::fidelity_tau,
          qsl::Metric::delta_l, qsl::Metric::tau_qsl, qsl::Metric::b_final}) {
        const auto [value, std_dev] = qsl::propagate_uncertainty(config.system, series, m);
        uncertainties[std::string(qsl::metric_name(m))] = json{{"value", value}, {"std", std_dev}};
    }

    const fs::path dir{config.output.dir};
    fs::create_directories(dir);
    if (config.output.format == qsl::io::OutputFormat::csv) {
        std::ostringstream rcsv;
        qsl::io::write_report_csv(rcsv, report);
        write_file(dir / "report.csv", rcsv.str());
    } else {
        write_file(dir / "report.json", dump_json(qsl::io::report_json(report)));
    }
    const json summary = qsl::io::summary_json(report, series.b.back());
    write_file(dir / "summary.json", dump_json(summary));
    write_file(dir / "uncertainties.json", dump_json(uncertainties));
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int run_catalog() {
    struct RowT {
        const char* kind;
        const char* formula;
        const char* example;
    };
    const RowT rows[] = {
        {"single_oscillator", "D/2", "D=3 → 1.5"},
        {"ideal_bose", "ND/2", "N=5, D=3 → 7.5"},
        {"polarized_fermi", "N²D/2", "N=5, D=1 → 12.5"},
        {"tonks_girardeau", "N²/2", "N=2 → 2"},
        {"calogero_sutherland", "N[1+λ(N−1)]/2", "N=3, λ=2 → 7.5"},
        {"unitary_fermi", "E(0)/(ħω₀)", "E(0)=2.5ħω₀ → 2.5"},
        {"custom", "σ² given directly", "σ²=1 → 1"},
    };
    std::cout << "system                sigma^2 formula        example\n";
    for (const RowT& row : rows) {
        std::ostringstream line;
        line << row.kind;
        for (std::size_t i = std::string(row.kind).size(); i < 22; ++i) line << ' ';
        line << row.formula;
        // unicode-aware padding is overkill here; a tab separates the columns
        std::cout << line.str() << "\t" << row.example << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "qsl — quantum-speed-limit diagnostics for scale-invariant trapped-gas dynamics"};
    app.require_subcommand(1);

    CLI::App* sim = app.add_subcommand(
        "simulate", "Integrate a trap-frequency protocol and write trajectory/report/summary");
    ModelArgs sim_args;
    add_model_options(sim, sim_args, /*with_driving=*/true);

    CLI::App* swp = app.add_subcommand(
        "sweep", "Scan one parameter axis and tabulate endpoint metrics per value");
    ModelArgs swp_args;
    add_model_options(swp, swp_args, /*with_driving=*/false);
    std::string axis;
    swp->add_option("--axis", axis, "sweep axis: tau | omega-f | sigma2 | x")
        ->required()
        ->check(CLI::IsMember({"tau", "omega-f", "sigma2", "x"}));
    std::string values_csv;
    swp->add_option("--values", values_csv, "comma-separated axis values");
    double from = 0.0;
    double to = 0.0;
    int steps = 20;
    swp->add_option("--from", from, "first axis value (with --to)");
    swp->add_option("--to", to, "last axis value (with --from)");
    swp->add_option("--steps", steps, "number of points between --from and --to (default 20)");
    std::string closed_form;
    swp->add_option("--closed-form", closed_form,
                    "evaluate duration-free closed forms instead of integrating (axis x)")
        ->check(CLI::IsMember({"tqd"}));
    bool keep_going = false;
    swp->add_flag("--keep-going", keep_going,
                  "record failed rows (NaN metrics) instead of aborting");
    int jobs = 0;
    swp->add_option("--jobs", jobs, "worker threads (default: logical CPU count)");

    CLI::App* ing = app.add_subcommand(
        "ingest", "Compute metrics and uncertainties from a measured cloud-size series");
    ModelArgs ing_args;
    add_model_options(ing, ing_args, /*with_driving=*/false);
    std::string data_path;
    ing->add_option("--data", data_path, "measured series CSV: t,b,s_b[,omega_sq]")->required();

    CLI::App* cat =
        app.add_subcommand("catalog", "List built-in systems and their σ² constants");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sim->parsed()) return run_simulate(sim, sim_args);
        if (swp->parsed())
            return run_sweep(swp, swp_args, axis, values_csv, from, to, steps, closed_form,
                             keep_going, jobs);
        if (ing->parsed()) return run_ingest(ing, ing_args, data_path);
        if (cat->parsed()) return run_catalog();
    } catch (const qsl::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
