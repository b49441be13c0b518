#pragma once

#include <stdexcept>
#include <string>

namespace nullwave {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite or out-of-domain argument to a pure evaluator.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Inconsistent or out-of-range configuration (grid, data, weights, run setup).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Config-file parse failure; carries the offending line number (0 if none).
class ParseError : public ConfigError {
public:
    ParseError(const std::string& what, int line)
        : ConfigError(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

/// Unknown catalog entry.
class LookupError : public Error {
public:
    using Error::Error;
};

/// A coefficient evaluator produced a non-finite value.
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// The time-derivative matrix M became (nearly) singular.
class DegeneracyError : public Error {
public:
    DegeneracyError(const std::string& what, double t, double x)
        : Error(what), t_(t), x_(x) {}
    double time() const noexcept { return t_; }
    double location() const noexcept { return x_; }

private:
    double t_;
    double x_;
};

/// Non-finite values appeared in the evolved field.
class NonFiniteError : public Error {
public:
    NonFiniteError(const std::string& what, double t, double x)
        : Error(what), t_(t), x_(x) {}
    double time() const noexcept { return t_; }
    double location() const noexcept { return x_; }

private:
    double t_;
    double x_;
};

/// A derivative stack was requested before the time window was full.
class StagingError : public Error {
public:
    using Error::Error;
};

/// Snapshots were supplied out of time order.
class SequencingError : public Error {
public:
    using Error::Error;
};

/// Grid or sampling too coarse for the requested diagnostic.
class ResolutionError : public Error {
public:
    using Error::Error;
};

/// An experiment's structural precondition (null / non-null gate) failed.
class PreconditionError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// A null-certified system blew up during a small-data sweep.
class CounterexampleError : public Error {
public:
    using Error::Error;
};

}  // namespace nullwave
