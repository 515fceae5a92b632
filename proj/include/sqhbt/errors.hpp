#ifndef SQHBT_ERRORS_HPP
#define SQHBT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sqhbt {

/// Failure categories; the CLI maps each onto a process exit code.
enum class ErrorKind {
    invalid_parameter,
    truncation_failure,
    undefined_coherence,
    no_signal,
    invariant_violation,
    io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// A parameter outside its domain. `field()` names the offending input.
class InvalidParameter : public Error {
public:
    InvalidParameter(std::string field, const std::string& why)
        : Error(ErrorKind::invalid_parameter, field + ": " + why), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class TruncationFailure : public Error {
public:
    explicit TruncationFailure(const std::string& what) : Error(ErrorKind::truncation_failure, what) {}
};

class UndefinedCoherence : public Error {
public:
    explicit UndefinedCoherence(const std::string& what) : Error(ErrorKind::undefined_coherence, what) {}
};

class NoSignal : public Error {
public:
    explicit NoSignal(const std::string& what) : Error(ErrorKind::no_signal, what) {}
};

class InvariantViolation : public Error {
public:
    explicit InvariantViolation(const std::string& what) : Error(ErrorKind::invariant_violation, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

}  // namespace sqhbt

#endif
