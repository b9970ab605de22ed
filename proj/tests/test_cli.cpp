// End-to-end tests for the qsl command-line tool: exit codes, output files,
// determinism, flag/config precedence, and the measured-data pipeline.
// The binary path is injected at compile time through the QSL_CLI_PATH macro;
// each invocation runs through the shell with stdout/stderr captured to files.

#include "doctest.h"

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "qsl/ermakov.hpp"
#include "qsl/experiment.hpp"
#include "qsl/io.hpp"
#include "qsl/metrics.hpp"
#include "qsl/protocol.hpp"
#include "qsl/system.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qsl;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(static_cast<bool>(in), "cannot open " << path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_file(const fs::path& path) { return json::parse(slurp(path)); }

// Fresh per-test scratch directory under the system temp root.
fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "qsl_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

CliResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path dir = fs::temp_directory_path() / "qsl_cli_tests";
    fs::create_directories(dir);
    const fs::path out_file = dir / ("stdout_" + std::to_string(counter) + ".txt");
    const fs::path err_file = dir / ("stderr_" + std::to_string(counter) + ".txt");
    ++counter;
    const std::string cmd = std::string("\"") + QSL_CLI_PATH + "\" " + args + " > \"" +
                            out_file.string() + "\" 2> \"" + err_file.string() + "\"";
    const int status = std::system(cmd.c_str());
    CliResult result;
    if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
    result.out = slurp(out_file);
    result.err = slurp(err_file);
    return result;
}

const std::string kCustomSigma1 = " --system '{\"kind\":\"custom\",\"sigma2\":1}'";

// Quintic-shortcut cloud-size series (ω₀ = 1, ω_F = ω₀/16) with ω² column.
MeasuredSeries cli_sta_series(int m_count, double tau, double s_b) {
    MeasuredSeries s;
    for (int m = 0; m <= m_count; ++m) {
        const double t = tau * m / m_count;
        s.t.push_back(t);
        s.b.push_back(sta_scaling_factor(t, tau, 4.0).b);
        s.s_b.push_back(s_b);
        s.omega_sq.push_back(sta_frequency(t, tau, 1.0, 0.0625));
    }
    return s;
}

void write_spike_table(const fs::path& path) {
    std::ofstream out(path);
    io::write_omega_table_csv(out, {{0.0, 1.0}, {1e-3, 1e18}, {10.0, 1e18}});
}

} // namespace

TEST_CASE("cli: catalog lists every built-in system") {
    const CliResult r = run_cli("catalog");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("single_oscillator") != std::string::npos);
    CHECK(r.out.find("ideal_bose") != std::string::npos);
    CHECK(r.out.find("polarized_fermi") != std::string::npos);
    CHECK(r.out.find("tonks_girardeau") != std::string::npos);
    CHECK(r.out.find("calogero_sutherland") != std::string::npos);
    CHECK(r.out.find("unitary_fermi") != std::string::npos);
    CHECK(r.out.find("custom") != std::string::npos);
    CHECK(r.out.find("N²D/2") != std::string::npos);
    CHECK(r.out.find("N[1+λ(N−1)]/2") != std::string::npos);
    // header plus seven rows
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') >= 8);
}

TEST_CASE("cli: simulate writes trajectory, report, and summary") {
    const fs::path dir = fresh_dir("simulate_linear");
    const CliResult r = run_cli("simulate" + kCustomSigma1 +
                                " --protocol linear --omega-f 0.0625 --tau 10 --out \"" +
                                dir.string() + "\"");
    REQUIRE(r.exit_code == 0);

    const json summary = parse_file(dir / "summary.json");
    CHECK(summary.at("b_tau").get<double>() == doctest::Approx(2.4272144198).epsilon(1e-6));
    CHECK(summary.at("gamma_tau").get<double>() == doctest::Approx(0.9294785128).epsilon(1e-5));
    CHECK(summary.at("delta_l").get<double>() == doctest::Approx(0.1330214213).epsilon(1e-4));
    CHECK(summary.at("tau_qsl").get<double>() == doctest::Approx(8.5688596401).epsilon(1e-5));
    CHECK(summary.at("tau").get<double>() == 10.0);
    CHECK(summary.at("sigma2").get<double>() == 1.0);
    // the summary document is repeated on stdout
    CHECK(r.out.find("\"b_tau\"") != std::string::npos);

    // both per-time files parse back through the library readers
    std::ifstream tcsv(dir / "trajectory.csv");
    const Trajectory traj = io::read_trajectory_csv(tcsv);
    REQUIRE(traj.t.size() == 2001);
    CHECK(traj.b.back() == summary.at("b_tau").get<double>());
    std::ifstream rcsv(dir / "report.csv");
    const QslReport rep = io::read_report_csv(rcsv, 1.0);
    REQUIRE(rep.t.size() == 2001);
    CHECK(rep.gamma_cum.back() == summary.at("gamma_tau").get<double>());
}

TEST_CASE("cli: simulate quintic shortcut reaches the target width") {
    const fs::path dir = fresh_dir("simulate_sta");
    const CliResult r = run_cli("simulate --protocol sta --omega-f 0.0625 --tau 10 --out \"" +
                                dir.string() + "\"");
    REQUIRE(r.exit_code == 0);
    const json summary = parse_file(dir / "summary.json");
    CHECK(std::abs(summary.at("b_tau").get<double>() - 4.0) < 1e-6);
    CHECK(summary.at("delta_l").get<double>() > 0.0);
}

TEST_CASE("cli: simulate constant trap is the trivial run") {
    const fs::path dir = fresh_dir("simulate_const");
    const CliResult r =
        run_cli("simulate --protocol constant --tau 5 --out \"" + dir.string() + "\"");
    REQUIRE(r.exit_code == 0);
    const json summary = parse_file(dir / "summary.json");
    CHECK(summary.at("b_tau").get<double>() == 1.0);
    CHECK(summary.at("fidelity_tau").get<double>() == 1.0);
    CHECK(summary.at("gamma_tau").get<double>() == 0.0);
    CHECK(summary.at("delta_l").get<double>() == 0.0);
}

TEST_CASE("cli: counterdiabatic driving follows the adiabatic track") {
    const fs::path dir = fresh_dir("simulate_cd");
    const CliResult r = run_cli(
        "simulate --protocol tqd_reference --omega-f 0.0625 --tau 10 "
        "--driving counterdiabatic --out \"" +
        dir.string() + "\"");
    REQUIRE(r.exit_code == 0);
    const json summary = parse_file(dir / "summary.json");
    CHECK(summary.at("b_tau").get<double>() == 4.0);
    CHECK(summary.at("delta_l").get<double>() ==
          doctest::Approx(tqd_excess_bures(0.0625, 1.0)).epsilon(1e-6));
    CHECK(summary.at("gamma_tau").get<double>() ==
          doctest::Approx(tqd_gamma(0.0625, 1.0, 1.0)).epsilon(1e-6));
}

TEST_CASE("cli: json output format writes json per-time documents") {
    const fs::path dir = fresh_dir("json_format");
    const CliResult r = run_cli(
        "simulate --protocol constant --tau 1 --nodes 51 --format json --out \"" +
        dir.string() + "\"");
    REQUIRE(r.exit_code == 0);
    CHECK(fs::exists(dir / "trajectory.json"));
    CHECK(fs::exists(dir / "report.json"));
    CHECK(!fs::exists(dir / "trajectory.csv"));
    CHECK(!fs::exists(dir / "report.csv"));
    const json rep = parse_file(dir / "report.json");
    CHECK(rep.at("t").size() == 51);
    const json traj = parse_file(dir / "trajectory.json");
    CHECK(traj.at("b").size() == 51);
    CHECK(traj.at("driving") == "bare");
}

TEST_CASE("cli: flags override the configuration file") {
    const fs::path dir = fresh_dir("precedence");
    {
        std::ofstream out(dir / "config.json");
        out << R"({"system": {"kind": "custom", "sigma2": 1},
                   "protocol": {"kind": "linear", "omega_f": 0.0625, "tau": 10}})"
            << "\n";
    }
    const CliResult r = run_cli("simulate --config \"" + (dir / "config.json").string() +
                                "\" --tau 5 --out \"" + dir.string() + "\"");
    REQUIRE(r.exit_code == 0);
    const json summary = parse_file(dir / "summary.json");
    // --tau wins over the file; the file's protocol kind and omega_f survive
    CHECK(summary.at("tau").get<double>() == 5.0);
    CHECK(summary.at("b_tau").get<double>() > 1.5);
}

TEST_CASE("cli: usage and configuration errors exit with code 2") {
    CHECK(run_cli("").exit_code == 2);  // a subcommand is required
    CHECK(run_cli("simulate --no-such-flag").exit_code == 2);
    CHECK(run_cli("simulate --protocol quadratic").exit_code == 2);
    CHECK(run_cli("simulate --format yaml").exit_code == 2);
    CHECK(run_cli("simulate --omega-f-hz 300").exit_code == 2);  // needs --omega0-hz
    CHECK(run_cli("sweep --axis tau").exit_code == 2);           // no values
    CHECK(run_cli("ingest").exit_code == 2);                     // --data is required

    const CliResult bad_json = run_cli("simulate --system 'not json'");
    CHECK(bad_json.exit_code == 2);
    CHECK(!bad_json.err.empty());
    CHECK(run_cli("simulate --system '{\"kind\":\"bogus\",\"sigma2\":1}'").exit_code == 2);

    const fs::path dir = fresh_dir("bad_config");
    {
        std::ofstream out(dir / "config.json");
        out << "{\"not_a_field\": 1}\n";
    }
    const CliResult bad_cfg =
        run_cli("simulate --config \"" + (dir / "config.json").string() + "\"");
    CHECK(bad_cfg.exit_code == 2);
    CHECK(bad_cfg.err.find("error") != std::string::npos);

    const CliResult help = run_cli("--help");
    CHECK(help.exit_code == 0);
    CHECK(help.out.find("simulate") != std::string::npos);
    CHECK(help.out.find("sweep") != std::string::npos);
    CHECK(help.out.find("ingest") != std::string::npos);
    CHECK(help.out.find("catalog") != std::string::npos);
}

TEST_CASE("cli: a collapsing tabulated protocol exits with code 3") {
    const fs::path dir = fresh_dir("collapse");
    write_spike_table(dir / "spike.csv");
    const CliResult r = run_cli("simulate --protocol tabulated --table \"" +
                                (dir / "spike.csv").string() + "\" --out \"" + dir.string() +
                                "\"");
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("numerical failure") != std::string::npos);
    CHECK(!fs::exists(dir / "summary.json"));
}

TEST_CASE("cli: repeated runs produce byte-identical outputs") {
    const fs::path a = fresh_dir("determinism_a");
    const fs::path b = fresh_dir("determinism_b");
    const std::string args = "simulate --protocol sta --omega-f 0.25 --tau 8 --nodes 801";
    REQUIRE(run_cli(args + " --out \"" + a.string() + "\"").exit_code == 0);
    REQUIRE(run_cli(args + " --out \"" + b.string() + "\"").exit_code == 0);
    for (const char* name : {"trajectory.csv", "report.csv", "summary.json"})
        CHECK(slurp(a / name) == slurp(b / name));
}

TEST_CASE("cli: closed-form sweep hits the range endpoint exactly") {
    const fs::path dir = fresh_dir("sweep_closed_form");
    const CliResult r = run_cli(
        "sweep --closed-form tqd --axis x --from 0.05 --to 1.0 --steps 20 --out \"" +
        dir.string() + "\"");
    REQUIRE(r.exit_code == 0);

    std::ifstream csv(dir / "sweep.csv");
    const SweepResult sw = io::read_sweep_csv(csv);
    REQUIRE(sw.rows.size() == 20);
    for (const SweepRow& row : sw.rows) {
        CHECK(row.ok);
        CHECK(row.delta_l >= 0.0);
    }
    CHECK(sw.rows.front().axis_value == 0.05);
    // the last grid point lands on x = 1 exactly, where every diagnostic vanishes
    CHECK(sw.rows.back().axis_value == 1.0);
    CHECK(sw.rows.back().b_tau == 1.0);
    CHECK(sw.rows.back().delta_l == 0.0);

    const json manifest = parse_file(dir / "sweep_manifest.json");
    CHECK(manifest.at("axis") == "x");
    CHECK(manifest.at("closed_form") == "tqd");
    REQUIRE(manifest.at("rows").size() == 20);
    for (const json& row : manifest.at("rows")) CHECK(row.at("ok").get<bool>());
}

TEST_CASE("cli: closed-form sweep excess grows with the dispersion constant") {
    const fs::path lo = fresh_dir("sweep_sigma_lo");
    const fs::path hi = fresh_dir("sweep_sigma_hi");
    REQUIRE(run_cli("sweep --closed-form tqd --axis x --values 0.05"
                    " --system '{\"kind\":\"custom\",\"sigma2\":0.5}' --out \"" +
                    lo.string() + "\"")
                .exit_code == 0);
    REQUIRE(run_cli("sweep --closed-form tqd --axis x --values 0.05"
                    " --system '{\"kind\":\"custom\",\"sigma2\":2}' --out \"" +
                    hi.string() + "\"")
                .exit_code == 0);
    std::ifstream lo_csv(lo / "sweep.csv");
    std::ifstream hi_csv(hi / "sweep.csv");
    const SweepResult sw_lo = io::read_sweep_csv(lo_csv);
    const SweepResult sw_hi = io::read_sweep_csv(hi_csv);
    REQUIRE(sw_lo.rows.size() == 1);
    REQUIRE(sw_hi.rows.size() == 1);
    CHECK(sw_hi.rows[0].delta_l > sw_lo.rows[0].delta_l);
}

TEST_CASE("cli: a one-value sweep row matches the simulate summary") {
    const fs::path sweep_dir = fresh_dir("single_sweep");
    const fs::path sim_dir = fresh_dir("single_simulate");
    REQUIRE(run_cli("sweep --axis tau --values 10 --protocol linear --omega-f 0.0625 --out \"" +
                    sweep_dir.string() + "\"")
                .exit_code == 0);
    REQUIRE(run_cli("simulate --protocol linear --omega-f 0.0625 --tau 10 --out \"" +
                    sim_dir.string() + "\"")
                .exit_code == 0);
    std::ifstream csv(sweep_dir / "sweep.csv");
    const SweepResult sw = io::read_sweep_csv(csv);
    REQUIRE(sw.rows.size() == 1);
    const json summary = parse_file(sim_dir / "summary.json");
    CHECK(sw.rows[0].b_tau == summary.at("b_tau").get<double>());
    CHECK(sw.rows[0].gamma_tau == summary.at("gamma_tau").get<double>());
    CHECK(sw.rows[0].delta_l == summary.at("delta_l").get<double>());
    CHECK(sw.rows[0].tau_qsl == summary.at("tau_qsl").get<double>());
}

TEST_CASE("cli: sweep aborts on a failed row unless --keep-going is given") {
    const fs::path dir = fresh_dir("sweep_failure");
    const std::string base = "sweep --axis omega-f --values 0.5,-1,2 --protocol linear --tau 10";

    const CliResult strict = run_cli(base + " --out \"" + dir.string() + "\"");
    CHECK(strict.exit_code == 2);
    CHECK(strict.err.find("sweep value") != std::string::npos);
    CHECK(!fs::exists(dir / "sweep.csv"));

    const CliResult relaxed = run_cli(base + " --keep-going --out \"" + dir.string() + "\"");
    CHECK(relaxed.exit_code == 0);
    CHECK(relaxed.err.find("1 of 3") != std::string::npos);
    std::ifstream csv(dir / "sweep.csv");
    const SweepResult sw = io::read_sweep_csv(csv);
    REQUIRE(sw.rows.size() == 3);
    CHECK(sw.rows[0].ok);
    CHECK(!sw.rows[1].ok);
    CHECK(std::isnan(sw.rows[1].b_tau));
    CHECK(sw.rows[2].ok);
    const json manifest = parse_file(dir / "sweep_manifest.json");
    CHECK(manifest.at("rows")[1].at("ok") == false);
    CHECK(!manifest.at("rows")[1].at("error").get<std::string>().empty());
}

TEST_CASE("cli: sweep exits 3 when a row fails numerically") {
    const fs::path dir = fresh_dir("sweep_numerical");
    write_spike_table(dir / "spike.csv");
    const CliResult r = run_cli("sweep --axis sigma2 --values 1 --protocol tabulated --table \"" +
                                (dir / "spike.csv").string() + "\" --out \"" + dir.string() +
                                "\"");
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("numerical failure") != std::string::npos);
    CHECK(!fs::exists(dir / "sweep.csv"));
}

TEST_CASE("cli: ingest reproduces simulated metrics from a dense series") {
    const fs::path dir = fresh_dir("ingest_dense");
    {
        std::ofstream out(dir / "series.csv");
        io::write_series_csv(out, cli_sta_series(2000, 10.0, 0.0));
    }
    const CliResult r = run_cli("ingest --data \"" + (dir / "series.csv").string() + "\"" +
                                kCustomSigma1 + " --out \"" + dir.string() + "\"");
    REQUIRE(r.exit_code == 0);

    const json summary = parse_file(dir / "summary.json");
    const QslReport ref = run_protocol(custom_system(1.0), sta_protocol(1.0, 0.0625, 10.0));
    CHECK(std::abs(summary.at("gamma_tau").get<double>() / ref.gamma_cum.back() - 1.0) < 0.01);
    CHECK(std::abs(summary.at("bures_tau").get<double>() - ref.bures.back()) < 1e-3);
    CHECK(summary.at("b_tau").get<double>() == doctest::Approx(4.0).epsilon(1e-12));

    const json unc = parse_file(dir / "uncertainties.json");
    for (const char* name :
         {"gamma_tau", "bures_tau", "fidelity_tau", "delta_l", "tau_qsl", "b_final"}) {
        REQUIRE_MESSAGE(unc.contains(name), name);
        CHECK(std::isfinite(unc.at(name).at("value").get<double>()));
        // noise-free input propagates to exactly zero spread
        CHECK(unc.at(name).at("std").get<double>() == 0.0);
    }
}

TEST_CASE("cli: ingest propagates last-sample noise to the final width") {
    const fs::path dir = fresh_dir("ingest_noise");
    MeasuredSeries series = cli_sta_series(200, 10.0, 0.0);
    series.s_b.back() = 0.02;
    {
        std::ofstream out(dir / "series.csv");
        io::write_series_csv(out, series);
    }
    const CliResult r = run_cli("ingest --data \"" + (dir / "series.csv").string() + "\"" +
                                kCustomSigma1 + " --out \"" + dir.string() + "\"");
    REQUIRE(r.exit_code == 0);
    const json unc = parse_file(dir / "uncertainties.json");
    CHECK(unc.at("b_final").at("value").get<double>() == series.b.back());
    CHECK(unc.at("b_final").at("std").get<double>() == doctest::Approx(0.02).epsilon(1e-9));
    CHECK(unc.at("fidelity_tau").at("std").get<double>() > 0.0);
}

TEST_CASE("cli: ingest fills the trap frequency from a protocol when absent") {
    const fs::path dir = fresh_dir("ingest_tof");
    {
        MeasuredSeries series;
        const int m_count = 200;
        for (int m = 0; m <= m_count; ++m) {
            const double t = 10.0 * m / m_count;
            series.t.push_back(t);
            series.b.push_back(std::sqrt(1.0 + t * t));
            series.s_b.push_back(0.0);
        }
        std::ofstream out(dir / "tof.csv");
        io::write_series_csv(out, series);  // three columns: no omega_sq
    }
    const std::string data = (dir / "tof.csv").string();

    const CliResult missing = run_cli("ingest --data \"" + data + "\"" + kCustomSigma1);
    CHECK(missing.exit_code == 2);
    CHECK(missing.err.find("omega_sq") != std::string::npos);

    const CliResult ok = run_cli("ingest --data \"" + data + "\"" + kCustomSigma1 +
                                 " --protocol tof --tau 10 --out \"" + dir.string() + "\"");
    REQUIRE(ok.exit_code == 0);
    const json summary = parse_file(dir / "summary.json");
    // loop back through the library on the identical series
    MeasuredSeries ref_series;
    {
        std::ifstream in(dir / "tof.csv");
        ref_series = io::read_series_csv(in);
    }
    ref_series.omega_sq.assign(ref_series.t.size(), 0.0);
    const QslReport ref = metrics_from_data(custom_system(1.0), ref_series);
    CHECK(summary.at("gamma_tau").get<double>() == ref.gamma_cum.back());
    CHECK(summary.at("bures_tau").get<double>() == ref.bures.back());
}

TEST_CASE("cli: ingest warns when the series does not start from equilibrium") {
    const fs::path dir = fresh_dir("ingest_warn");
    {
        MeasuredSeries series;
        for (int m = 0; m <= 10; ++m) {
            series.t.push_back(0.1 * m);
            series.b.push_back(1.02);
            series.s_b.push_back(0.001);
            series.omega_sq.push_back(1.0);
        }
        std::ofstream out(dir / "series.csv");
        io::write_series_csv(out, series);
    }
    const CliResult r = run_cli("ingest --data \"" + (dir / "series.csv").string() + "\"" +
                                kCustomSigma1 + " --out \"" + dir.string() + "\"");
    CHECK(r.exit_code == 0);
    CHECK(r.err.find("deviates from 1") != std::string::npos);
}

TEST_CASE("cli: ingest reports the line of a malformed data row") {
    const fs::path dir = fresh_dir("ingest_malformed");
    {
        std::ofstream out(dir / "bad.csv");
        out << "t,b,s_b\n0,1,0\n0.1,not_a_number,0\n";
    }
    const CliResult r = run_cli("ingest --data \"" + (dir / "bad.csv").string() + "\"");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("line 3") != std::string::npos);
}

TEST_CASE("cli: the output directory falls back to QSL_OUT_DIR") {
    const fs::path dir = fresh_dir("env_out");
    REQUIRE(setenv("QSL_OUT_DIR", dir.string().c_str(), 1) == 0);
    const CliResult r = run_cli("simulate --protocol constant --tau 1 --nodes 101");
    unsetenv("QSL_OUT_DIR");
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(dir / "summary.json"));
    CHECK(fs::exists(dir / "trajectory.csv"));
    CHECK(fs::exists(dir / "report.csv"));
}

TEST_CASE("cli: physical-unit flags map onto the dimensionless boundary") {
    const fs::path phys = fresh_dir("physical_units");
    const fs::path nat = fresh_dir("natural_units");
    REQUIRE(run_cli("simulate --protocol linear --omega0-hz 1200 --omega-f-hz 300 "
                    "--tau-s 0.0008 --out \"" +
                    phys.string() + "\"")
                .exit_code == 0);
    // same run stated in natural units: omega_F/omega0 = 300/1200, tau = 2π f0 tau_s
    const double tau = 2.0 * std::numbers::pi * 1200.0 * 0.0008;
    REQUIRE(run_cli("simulate --protocol linear --omega-f 0.25 --tau " +
                    io::format_double(tau) + " --out \"" + nat.string() + "\"")
                .exit_code == 0);
    CHECK(slurp(phys / "summary.json") == slurp(nat / "summary.json"));
    CHECK(slurp(phys / "trajectory.csv") == slurp(nat / "trajectory.csv"));
    const json summary = parse_file(phys / "summary.json");
    CHECK(summary.at("tau").get<double>() == tau);
}
