// Physical-system catalog: maps a trapped-gas system to its dimensionless
// cloud-size constant σ², the single scalar all QSL metrics depend on.
//
//   single harmonic oscillator   σ² = D/2
//   ideal Bose gas               σ² = N·D/2
//   spin-polarized Fermi gas     σ² = N²·D/2
//   Tonks–Girardeau gas          σ² = N²/2          (≡ polarized Fermi, D = 1)
//   Calogero–Sutherland gas      σ² = N[1+λ(N−1)]/2 (λ = 0 recovers ideal Bose, D = 1)
//   unitary Fermi gas            σ² = E(0)/(ħω₀)    (ground-state energy supplied directly)
//   custom                       σ² given directly
//
// All internal computation uses natural units ħ = m = 1 with time measured in 1/ω₀;
// unit conversion happens only at I/O boundaries.

#pragma once

#include <string_view>

namespace qsl {

enum class SystemKind {
    single_oscillator,
    ideal_bose,
    polarized_fermi,
    tonks_girardeau,
    calogero_sutherland,
    unitary_fermi,
    custom,
};

// Tagged parameter container; construct through the factory functions below,
// which validate. Fields not used by a kind keep their defaults.
struct SystemSpec {
    SystemKind kind = SystemKind::single_oscillator;
    int n = 1;                 // particle count, N ≥ 1
    int d = 1;                 // spatial dimension, D ∈ {1,2,3}
    double lambda = 0.0;       // Calogero–Sutherland coupling, λ ≥ 0
    double e0_over_hw0 = 0.0;  // unitary Fermi ground-state energy in units of ħω₀
    double sigma2 = 0.0;       // custom σ² > 0

    bool operator==(const SystemSpec&) const = default;
};

SystemSpec single_oscillator(int d);
SystemSpec ideal_bose(int n, int d);
SystemSpec polarized_fermi(int n, int d);
SystemSpec tonks_girardeau(int n);
SystemSpec calogero_sutherland(int n, double lambda);
SystemSpec unitary_fermi(double e0_over_hw0);
SystemSpec custom_system(double sigma2);

// σ² for a spec; validates the parameters and throws std::invalid_argument when
// they are out of range. Strictly positive for every valid spec.
double sigma2_of(const SystemSpec& spec);

// Canonical lowercase kind name ("tonks_girardeau", ...), as used by JSON/CLI I/O.
std::string_view kind_name(SystemKind kind);

} // namespace qsl
