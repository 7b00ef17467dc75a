#pragma once

#include <stdexcept>
#include <string>

namespace l1t2 {

/// Base for every error the library raises.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Shape disagreement between arguments.
class DimensionError : public Error {
public:
  using Error::Error;
};

/// Malformed numeric input (non-finite entries, bad file contents).
class InputError : public Error {
public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Work would exceed the configured capacity bound.
class CapacityError : public Error {
public:
  using Error::Error;
};

/// Columns fail the general-position requirement of the arrangement search.
class GeneralPositionError : public Error {
public:
  using Error::Error;
};

/// Invalid experiment configuration.
class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace l1t2
