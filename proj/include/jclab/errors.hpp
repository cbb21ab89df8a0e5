#pragma once

#include <stdexcept>
#include <string>

namespace jclab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid user configuration: bad sizes, malformed profiles, unsatisfiable
/// preconditions detected before any computation starts.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// The requested coherent superposition does not fit the truncated space.
class TruncationError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// A parameter profile produced a non-finite value or was evaluated outside
/// its domain.
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// Index, time or integer range violation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A numerical certification check exceeded its tolerance.
class VerificationError : public Error {
public:
    using Error::Error;
};

/// The auxiliary equations hit a pole of the (theta, phi) chart.
class SingularityError : public Error {
public:
    SingularityError(const std::string& what, double time)
        : Error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

}  // namespace jclab
