// Pipeline implementations: protocol → report, parallel parameter sweeps with
// per-value failure capture, measured-series ingestion (forward-difference ḃ,
// trapezoid γ), and first-order uncertainty propagation with central-difference
// partials — validated elsewhere against Monte-Carlo resampling.

#include "qsl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qsl/errors.hpp"

namespace qsl {

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

FrequencyProtocol rebuild(const FrequencyProtocol& proto, SweepAxis axis, double value) {
    const double omega0 = proto.omega0;
    const double omega_f = axis == SweepAxis::omega_f ? value : proto.omega_f;
    const double tau = axis == SweepAxis::tau ? value : proto.tau;
    switch (proto.kind) {
        case ProtocolKind::constant:       return constant_protocol(omega0, tau);
        case ProtocolKind::linear_ramp:    return linear_ramp(omega0, omega_f, tau);
        case ProtocolKind::sta_polynomial: return sta_protocol(omega0, omega_f, tau);
        case ProtocolKind::tqd_reference:  return tqd_reference_protocol(omega0, omega_f, tau);
        case ProtocolKind::time_of_flight: return tof_protocol(omega0, tau);
        case ProtocolKind::tabulated:
            throw std::invalid_argument("tau/omega_f sweep axes require a closed-form protocol kind");
    }
    throw std::invalid_argument("unrecognized protocol kind");
}

SweepRow failed_row(double value, bool numerical, const std::string& message) {
    SweepRow row;
    row.axis_value = value;
    row.b_tau = row.f_tau = row.bures_tau = row.gamma_tau = row.delta_l = row.tau_qsl = nan_v;
    row.ok = false;
    row.numerical_failure = numerical;
    row.error = message;
    return row;
}

void run_indexed(std::size_t count, int jobs, const std::function<void(std::size_t)>& work) {
    unsigned hw = std::thread::hardware_concurrency();
    std::size_t threads = jobs > 0 ? static_cast<std::size_t>(jobs) : std::max(1u, hw);
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) work(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < count;) work(i);
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

} // namespace

QslReport run_protocol(const SystemSpec& spec, const FrequencyProtocol& protocol,
                       const SolverSettings& settings) {
    const double sigma2 = sigma2_of(spec);
    const Trajectory traj =
        solve_ermakov(protocol, settings.num_nodes, settings.rel_tol, settings.abs_tol);
    return build_report(traj, sigma2);
}

QslReport run_counterdiabatic(const SystemSpec& spec, const FrequencyProtocol& protocol,
                              int num_nodes) {
    const double sigma2 = sigma2_of(spec);
    const Trajectory traj = adiabatic_scaling(protocol, num_nodes);
    return build_report(traj, sigma2);
}

SweepResult sweep(const SystemSpec& spec, const FrequencyProtocol& prototype, SweepAxis axis,
                  const std::vector<double>& values, const SolverSettings& settings, int jobs) {
    if (values.empty()) throw std::invalid_argument("sweep needs at least one axis value");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("sweep axis values must be finite");
    if (axis != SweepAxis::sigma2 && prototype.kind == ProtocolKind::tabulated)
        throw std::invalid_argument("tau/omega_f sweep axes require a closed-form protocol kind");
    if (axis == SweepAxis::omega_f && (prototype.kind == ProtocolKind::constant ||
                                       prototype.kind == ProtocolKind::time_of_flight))
        throw std::invalid_argument(
            "omega_f sweep axis requires a protocol with a final frequency");
    const double base_sigma2 = sigma2_of(spec);  // reject invalid system parameters up front
    (void)base_sigma2;

    SweepResult result;
    result.axis = axis == SweepAxis::tau ? "tau" : axis == SweepAxis::omega_f ? "omega_f" : "sigma2";
    result.rows.resize(values.size());

    auto eval_one = [&](std::size_t i) {
        const double v = values[i];
        try {
            const SystemSpec row_spec = axis == SweepAxis::sigma2 ? custom_system(v) : spec;
            const FrequencyProtocol proto =
                axis == SweepAxis::sigma2 ? prototype : rebuild(prototype, axis, v);
            const double sigma2 = sigma2_of(row_spec);
            const Trajectory traj =
                solve_ermakov(proto, settings.num_nodes, settings.rel_tol, settings.abs_tol);
            const QslReport rep = build_report(traj, sigma2);
            SweepRow row;
            row.axis_value = v;
            row.b_tau = traj.b.back();
            row.f_tau = rep.fidelity.back();
            row.bures_tau = rep.bures.back();
            row.gamma_tau = rep.gamma_cum.back();
            row.delta_l = rep.delta_l;
            row.tau_qsl = rep.tau_qsl;
            row.ok = true;
            result.rows[i] = std::move(row);
        } catch (const numerical_error& e) {
            result.rows[i] = failed_row(v, true, e.what());
        } catch (const std::exception& e) {
            result.rows[i] = failed_row(v, false, e.what());
        }
    };
    run_indexed(values.size(), jobs, eval_one);
    return result;
}

SweepResult tqd_closed_form_sweep(const SystemSpec& spec, const std::vector<double>& x_values) {
    if (x_values.empty()) throw std::invalid_argument("sweep needs at least one axis value");
    const double sigma2 = sigma2_of(spec);
    SweepResult result;
    result.axis = "x";
    result.rows.reserve(x_values.size());
    for (double x : x_values) {
        try {
            SweepRow row;
            row.axis_value = x;
            const double f = tqd_fidelity(x, sigma2);
            row.b_tau = 1.0 / std::sqrt(x);
            row.f_tau = f;
            row.bures_tau = bures_angle(f);
            row.gamma_tau = x == 1.0 ? 0.0 : tqd_gamma(x, sigma2, x < 1.0 ? 1.0 : -1.0);
            row.delta_l = tqd_excess_bures(x, sigma2);
            row.tau_qsl = nan_v;  // duration-free closed forms carry no timescale
            row.ok = true;
            result.rows.push_back(std::move(row));
        } catch (const std::exception& e) {
            result.rows.push_back(failed_row(x, false, e.what()));
        }
    }
    return result;
}

bool validate_series(const MeasuredSeries& series) {
    const std::size_t n = series.t.size();
    if (n < 2) throw std::invalid_argument("measured series needs at least 2 samples");
    if (series.b.size() != n || series.s_b.size() != n)
        throw std::invalid_argument("measured series columns must have equal lengths");
    if (!series.omega_sq.empty() && series.omega_sq.size() != n)
        throw std::invalid_argument("omega_sq column length must match the time grid");
    const double h = series.t[1] - series.t[0];
    if (!(h > 0.0)) throw std::invalid_argument("measured times must be increasing");
    for (std::size_t i = 1; i < n; ++i) {
        const double step = series.t[i] - series.t[i - 1];
        if (std::abs(step - h) > 1e-9 * std::max(1.0, std::abs(h)))
            throw std::invalid_argument("measured times must be uniform (violated at sample " +
                                        std::to_string(i) + ")");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(series.b[i] > 0.0) || !std::isfinite(series.b[i]))
            throw std::invalid_argument("measured b must be finite and > 0 (violated at sample " +
                                        std::to_string(i) + ")");
        if (!(series.s_b[i] >= 0.0) || !std::isfinite(series.s_b[i]))
            throw std::invalid_argument(
                "uncertainties s_b must be finite and >= 0 (violated at sample " +
                std::to_string(i) + ")");
    }
    // warning condition, not an error: the series should start at equilibrium b ≈ 1
    return std::abs(series.b[0] - 1.0) > 3.0 * series.s_b[0];
}

std::vector<double> discretized_derivative(const MeasuredSeries& series) {
    validate_series(series);
    const std::size_t n = series.t.size();
    const double h = series.t[1] - series.t[0];
    std::vector<double> bdot(n);
    for (std::size_t i = 0; i + 1 < n; ++i) bdot[i] = (series.b[i + 1] - series.b[i]) / h;
    bdot[n - 1] = (series.b[n - 1] - series.b[n - 2]) / h;  // backward at the last node
    return bdot;
}

QslReport metrics_from_data(const SystemSpec& spec, const MeasuredSeries& series) {
    validate_series(series);
    if (series.omega_sq.empty())
        throw std::invalid_argument("measured series lacks omega_sq values; supply the protocol");
    const double sigma2 = sigma2_of(spec);
    Trajectory traj;
    traj.t = series.t;
    traj.b = series.b;
    traj.bdot = discretized_derivative(series);
    traj.omega_sq = series.omega_sq;
    traj.omega0 = 1.0;  // measured series are expressed in natural units
    traj.tau = series.t.back();
    traj.driving = Driving::bare;
    return build_report(traj, sigma2, ReportQuadrature::trapezoid);
}

std::string_view metric_name(Metric m) {
    switch (m) {
        case Metric::gamma_tau:    return "gamma_tau";
        case Metric::bures_tau:    return "bures_tau";
        case Metric::fidelity_tau: return "fidelity_tau";
        case Metric::delta_l:      return "delta_l";
        case Metric::tau_qsl:      return "tau_qsl";
        case Metric::b_final:      return "b_final";
    }
    throw std::invalid_argument("unrecognized metric selector");
}

namespace {

double metric_of(const SystemSpec& spec, const MeasuredSeries& series, Metric target) {
    if (target == Metric::b_final) return series.b.back();
    const QslReport rep = metrics_from_data(spec, series);
    switch (target) {
        case Metric::gamma_tau:    return rep.gamma_cum.back();
        case Metric::bures_tau:    return rep.bures.back();
        case Metric::fidelity_tau: return rep.fidelity.back();
        case Metric::delta_l:      return rep.delta_l;
        case Metric::tau_qsl:      return rep.tau_qsl;
        case Metric::b_final:      break;
    }
    throw std::invalid_argument("unrecognized metric selector");
}

} // namespace

std::pair<double, double> propagate_uncertainty(const SystemSpec& spec,
                                                const MeasuredSeries& series, Metric target) {
    validate_series(series);
    const double value = metric_of(spec, series, target);
    if (!std::isfinite(value))
        throw numerical_error(std::string("metric ") + std::string(metric_name(target)) +
                              " is not finite on the measured series");
    double acc = 0.0;
    MeasuredSeries probe = series;
    for (std::size_t m = 0; m < series.b.size(); ++m) {
        const double s = series.s_b[m];
        if (s == 0.0) continue;
        const double h = std::max(1e-6, 1e-6 * series.b[m]);
        probe.b[m] = series.b[m] + h;
        const double up = metric_of(spec, probe, target);
        probe.b[m] = series.b[m] - h;
        const double down = metric_of(spec, probe, target);
        probe.b[m] = series.b[m];
        if (!std::isfinite(up) || !std::isfinite(down))
            throw numerical_error("metric not finite at a perturbed sample (index " +
                                  std::to_string(m) + ")");
        const double partial = (up - down) / (2.0 * h);
        acc += partial * partial * s * s;
    }
    return {value, std::sqrt(acc)};
}

} // namespace qsl
