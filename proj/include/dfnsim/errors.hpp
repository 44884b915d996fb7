#pragma once

#include <stdexcept>
#include <string>

namespace dfn {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid argument values (out-of-range evaluation, nonpositive capacity, ...).
struct DomainError : Error {
    using Error::Error;
};

// Bad configuration: invariant violations on parameters, meshes, bounds.
struct ConfigError : Error {
    using Error::Error;
};

// State left the physically meaningful region (particle depleted/overfilled,
// electrolyte exhausted). Recoverable: the integrator reacts by rejecting the
// step and retrying with a smaller one.
struct SaturationError : Error {
    using Error::Error;
};

// Residual assembly failed hard (non-finite state entries).
struct AssemblyError : Error {
    using Error::Error;
};

// Consistent-initialization failure.
struct InitError : Error {
    using Error::Error;
};

// Time integration failure.
struct SolveError : Error {
    using Error::Error;
};

// File and format problems.
struct IoError : Error {
    using Error::Error;
};

} // namespace dfn
