#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace pqdsim {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
public:
    using Error::Error;
};

// A transfer matrix with a singular value above 1 + tol.
class NotAContraction : public Error {
public:
    using Error::Error;
};

class NotPositiveSemidefinite : public Error {
public:
    using Error::Error;
};

// Ordering parameter at which a quasiprobability is more singular than a delta.
class SingularOrdering : public Error {
public:
    using Error::Error;
};

// Requested ordering lies outside the nonnegative region for one mode.
class NegativeQuasiprobability : public Error {
public:
    NegativeQuasiprobability(std::size_t mode, const std::string& what)
        : Error(what + " (mode " + std::to_string(mode) + ")"), mode_(mode) {}

    std::size_t mode() const noexcept { return mode_; }

private:
    std::size_t mode_;
};

// Transition function is not a proper (PSD) Gaussian.
class SimulabilityViolated : public Error {
public:
    using Error::Error;
};

class UnsupportedSource : public Error {
public:
    using Error::Error;
};

class DegenerateDetector : public Error {
public:
    using Error::Error;
};

class UndefinedOperatingPoint : public Error {
public:
    using Error::Error;
};

class EmptyBatch : public Error {
public:
    using Error::Error;
};

class MismatchedOutcomeSpace : public Error {
public:
    using Error::Error;
};

// Oracle problem exceeds the brute-force size limits.
class OracleLimit : public Error {
public:
    using Error::Error;
};

class TruncationError : public Error {
public:
    TruncationError(double estimate, int suggested_n_max, const std::string& what)
        : Error(what), estimate_(estimate), suggested_(suggested_n_max) {}

    double estimate() const noexcept { return estimate_; }
    int suggested_n_max() const noexcept { return suggested_; }

private:
    double estimate_;
    int suggested_;
};

// Configuration schema or invariant violation. field() names the offending key.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& what)
        : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace pqdsim
