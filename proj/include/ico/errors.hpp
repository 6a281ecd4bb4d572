#pragma once

#include <stdexcept>
#include <string>

namespace ico {

// Error taxonomy shared by the whole library. The C API and the CLI map
// these onto status/exit codes, so new error kinds should reuse one of the
// existing bases.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed configuration: bad JSON, unknown family names, dimension
// mismatches between objects that must share a chart.
struct ConfigError : Error {
    using Error::Error;
};

// A geometric construction failed its own certification (non-invertible
// localized map, overlapping deformation supports, ...).
struct ConstructionError : Error {
    using Error::Error;
};

// A scenario violates the structural requirements: wrong crossing counts,
// degenerate causal order, orientation or timelike violations.
struct ScenarioError : Error {
    using Error::Error;
};

// The operational protocol cannot be applied to the given state/scenario.
struct ProtocolError : Error {
    using Error::Error;
};

// A numerical routine failed to converge or exhausted its budget.
struct NumericError : Error {
    using Error::Error;
};

} // namespace ico
