// σ² catalog implementation: validation and the closed-form constants per system
// kind. σ² is the only quantity downstream code ever consumes.

#include "qsl/system.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qsl {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

void check_n(int n) { require(n >= 1, "particle count N must be >= 1, got " + std::to_string(n)); }

void check_d(int d) {
    require(d >= 1 && d <= 3, "spatial dimension D must be in {1,2,3}, got " + std::to_string(d));
}

} // namespace

SystemSpec single_oscillator(int d) {
    check_d(d);
    return {SystemKind::single_oscillator, 1, d, 0.0, 0.0, 0.0};
}

SystemSpec ideal_bose(int n, int d) {
    check_n(n);
    check_d(d);
    return {SystemKind::ideal_bose, n, d, 0.0, 0.0, 0.0};
}

SystemSpec polarized_fermi(int n, int d) {
    check_n(n);
    check_d(d);
    return {SystemKind::polarized_fermi, n, d, 0.0, 0.0, 0.0};
}

SystemSpec tonks_girardeau(int n) {
    check_n(n);
    return {SystemKind::tonks_girardeau, n, 1, 0.0, 0.0, 0.0};
}

SystemSpec calogero_sutherland(int n, double lambda) {
    check_n(n);
    require(std::isfinite(lambda) && lambda >= 0.0, "coupling lambda must be finite and >= 0");
    return {SystemKind::calogero_sutherland, n, 1, lambda, 0.0, 0.0};
}

SystemSpec unitary_fermi(double e0_over_hw0) {
    require(std::isfinite(e0_over_hw0) && e0_over_hw0 > 0.0,
            "ground-state energy E(0)/(hbar*omega0) must be finite and > 0");
    return {SystemKind::unitary_fermi, 1, 3, 0.0, e0_over_hw0, 0.0};
}

SystemSpec custom_system(double sigma2) {
    require(std::isfinite(sigma2) && sigma2 > 0.0, "custom sigma2 must be finite and > 0");
    SystemSpec spec{SystemKind::custom, 1, 1, 0.0, 0.0, sigma2};
    return spec;
}

double sigma2_of(const SystemSpec& spec) {
    const double n = spec.n;
    switch (spec.kind) {
        case SystemKind::single_oscillator:
            check_d(spec.d);
            return spec.d / 2.0;
        case SystemKind::ideal_bose:
            check_n(spec.n);
            check_d(spec.d);
            return n * spec.d / 2.0;
        case SystemKind::polarized_fermi:
            check_n(spec.n);
            check_d(spec.d);
            return n * n * spec.d / 2.0;
        case SystemKind::tonks_girardeau:
            check_n(spec.n);
            return n * n / 2.0;
        case SystemKind::calogero_sutherland:
            check_n(spec.n);
            require(std::isfinite(spec.lambda) && spec.lambda >= 0.0,
                    "coupling lambda must be finite and >= 0");
            return n * (1.0 + spec.lambda * (n - 1.0)) / 2.0;
        case SystemKind::unitary_fermi:
            require(std::isfinite(spec.e0_over_hw0) && spec.e0_over_hw0 > 0.0,
                    "ground-state energy E(0)/(hbar*omega0) must be finite and > 0");
            return spec.e0_over_hw0;
        case SystemKind::custom:
            require(std::isfinite(spec.sigma2) && spec.sigma2 > 0.0,
                    "custom sigma2 must be finite and > 0");
            return spec.sigma2;
    }
    throw std::invalid_argument("unrecognized system kind");
}

std::string_view kind_name(SystemKind kind) {
    switch (kind) {
        case SystemKind::single_oscillator:   return "single_oscillator";
        case SystemKind::ideal_bose:          return "ideal_bose";
        case SystemKind::polarized_fermi:     return "polarized_fermi";
        case SystemKind::tonks_girardeau:     return "tonks_girardeau";
        case SystemKind::calogero_sutherland: return "calogero_sutherland";
        case SystemKind::unitary_fermi:       return "unitary_fermi";
        case SystemKind::custom:              return "custom";
    }
    throw std::invalid_argument("unrecognized system kind");
}

} // namespace qsl
