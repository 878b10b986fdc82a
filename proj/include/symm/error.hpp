#pragma once

#include <stdexcept>
#include <string>

namespace symm {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Malformed GridFunction CSV, polarizer JSON or experiment config.
class FormatError : public Error {
public:
    using Error::Error;
};

/// The multiplier test function pairs to (numerically) zero with g(u).
class DegenerateTestFunction : public Error {
public:
    using Error::Error;
};

class ZeroConstraintMass : public Error {
public:
    using Error::Error;
};

/// Energy fell below the configured floor; typical of a supercritical power nonlinearity.
class EnergyDiverged : public Error {
public:
    using Error::Error;
};

}  // namespace symm
