// Cumulative quadrature on uniformly spaced samples.
//
// cumulative_simpson returns the running integral using composite Simpson panels:
// each pair of intervals contributes through the quadratic fitted to its three
// nodes (the half-panel value at the middle node comes from integrating that same
// quadratic over half the panel), and an odd leftover interval is handled with the
// quadratic through the last three nodes. Exact for polynomials up to degree 2 on
// every prefix; O(h⁴) on smooth integrands at full panels.
//
// cumulative_trapezoid is the plain running trapezoid rule — preferred for
// measured data, where smoothness assumptions do not hold.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qsl {

inline std::vector<double> cumulative_trapezoid(const std::vector<double>& f, double h) {
    if (f.size() < 2) throw std::invalid_argument("cumulative_trapezoid: need at least 2 samples");
    std::vector<double> out(f.size());
    out[0] = 0.0;
    for (std::size_t i = 1; i < f.size(); ++i)
        out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
    return out;
}

inline std::vector<double> cumulative_simpson(const std::vector<double>& f, double h) {
    const std::size_t n = f.size();
    if (n < 2) throw std::invalid_argument("cumulative_simpson: need at least 2 samples");
    std::vector<double> out(n);
    out[0] = 0.0;
    if (n == 2) { // single interval: trapezoid is the best available
        out[1] = 0.5 * h * (f[0] + f[1]);
        return out;
    }
    std::size_t k = 0;
    for (; k + 2 < n; k += 2) {
        // quadratic through nodes k, k+1, k+2: half-panel then full-panel integral
        out[k + 1] = out[k] + (h / 12.0) * (5.0 * f[k] + 8.0 * f[k + 1] - f[k + 2]);
        out[k + 2] = out[k] + (h / 3.0) * (f[k] + 4.0 * f[k + 1] + f[k + 2]);
    }
    if (k + 1 < n) {
        // odd leftover interval [n−2, n−1]: quadratic through the last three nodes
        out[n - 1] = out[n - 2] +
                     (h / 12.0) * (-f[n - 3] + 8.0 * f[n - 2] + 5.0 * f[n - 1]);
    }
    return out;
}

} // namespace qsl
