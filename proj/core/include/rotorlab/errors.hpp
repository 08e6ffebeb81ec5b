#pragma once

#include <stdexcept>
#include <string>

namespace rotorlab {

// Base of all rotorlab exceptions. Config/usage mistakes map to CLI exit
// code 2, everything else (numerical failures) to exit code 3.
class RotorError : public std::runtime_error {
public:
    explicit RotorError(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public RotorError {
public:
    using RotorError::RotorError;
};

class UsageError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class NumericalError : public RotorError {
public:
    using RotorError::RotorError;
};

class DomainError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class RangeError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class FitError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ProfileError : public FitError {
public:
    using FitError::FitError;
};

class PoleError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SingularPotentialError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ExtendedStateError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class CapacityError : public NumericalError {
public:
    CapacityError(const std::string& msg, double retained)
        : NumericalError(msg), retained_weight(retained) {}
    double retained_weight;
};

class TruncationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ChernUndefinedError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateStateError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class StateError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NoRatchetError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DataError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace rotorlab
