#pragma once

#include <stdexcept>
#include <string>

namespace casq {

// Steady-state or spectral query outside the domain where a stationary
// solution exists (at or above the lasing threshold).
class stability_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A closed-form variance came out non-positive, which signals an invalid
// parameter regime for that expression rather than a physical result.
class physicality_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Fock-space truncation too small for the requested accuracy.
class truncation_error : public std::runtime_error {
public:
    truncation_error(const std::string& msg, int required)
        : std::runtime_error(msg), required_n_max(required) {}
    int required_n_max;
};

// Bad CLI flags or config file contents (maps to exit code 2).
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace casq
