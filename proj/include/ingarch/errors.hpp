#pragma once

#include <stdexcept>
#include <string>

namespace ingarch {

/// Invalid configuration (sieve, GA, experiment spec).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Too few observations for the requested computation.
class ArityError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// A user supplied link produced a value outside its declared range.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace ingarch
