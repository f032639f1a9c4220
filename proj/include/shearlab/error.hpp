#pragma once

#include <stdexcept>
#include <string>

namespace shearlab {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature failed to reach its tolerance within the evaluation budget.
class QuadratureError : public Error {
public:
    using Error::Error;
};

/// A field violates the boundary-smallness requirement of the truncated domain.
class LocalizationError : public Error {
public:
    using Error::Error;
};

/// A shear-frame relabeling would move occupied modes off the grid.
class FrameOverflow : public Error {
public:
    using Error::Error;
};

/// Time integration produced non-finite values.
class NumericalBlowup : public Error {
public:
    NumericalBlowup(const std::string& what, double time) : Error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// Configuration file or command line could not be validated.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace shearlab
