#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hclab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// Raised when a truncation is too small to represent an exponent exactly.
class GuardBandError : public Error {
public:
    GuardBandError(std::size_t required, std::size_t given)
        : Error("guard band violated: truncation d=" + std::to_string(given) +
                " is too small, need d >= " + std::to_string(required)),
          required_(required), given_(given) {}

    std::size_t required() const noexcept { return required_; }
    std::size_t given() const noexcept { return given_; }

private:
    std::size_t required_;
    std::size_t given_;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

} // namespace hclab
