#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace awalk {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument does not hold (index out of range, bad parameter).
class DomainError : public Error {
public:
    using Error::Error;
};

/// The operation is not defined for the given sequence variant.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

/// The computation would exceed its memory budget.
class ResourceError : public Error {
public:
    ResourceError(const std::string& what, std::uint64_t required_bytes)
        : Error(what), required_bytes_(required_bytes) {}

    std::uint64_t required_bytes() const noexcept { return required_bytes_; }

private:
    std::uint64_t required_bytes_;
};

/// A numerical tolerance could not be reached within the evaluation budget.
/// Carries the best value found and the error estimate that was achieved.
class ToleranceError : public Error {
public:
    ToleranceError(const std::string& what, double best_value, double achieved_error)
        : Error(what), best_value_(best_value), achieved_error_(achieved_error) {}

    double best_value() const noexcept { return best_value_; }
    double achieved_error() const noexcept { return achieved_error_; }

private:
    double best_value_;
    double achieved_error_;
};

}  // namespace awalk
