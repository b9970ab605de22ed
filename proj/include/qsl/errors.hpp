// Error types shared across the library. Configuration and domain errors use the
// standard exceptions (std::invalid_argument, std::domain_error); numerical failures
// of the adaptive integrator or a downstream routine throw qsl::numerical_error,
// which carries the evolution time at which the failure occurred when known.

#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace qsl {

class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what,
                             double where = std::numeric_limits<double>::quiet_NaN())
        : std::runtime_error(what), where_(where) {}

    // Time (natural units) at which the failure occurred; NaN if not applicable.
    double where() const noexcept { return where_; }

private:
    double where_;
};

} // namespace qsl
