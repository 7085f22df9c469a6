#pragma once

#include <stdexcept>
#include <string>

namespace dlcert {

// Base class for everything the library throws on purpose.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Distribution or plant parameters outside their admissible range.
class ParameterError : public Error {
public:
  using Error::Error;
};

// Malformed numeric input: non-finite entries, size mismatches.
class InputError : public Error {
public:
  using Error::Error;
};

// Structurally invalid feasibility problem.
class ModelError : public Error {
public:
  using Error::Error;
};

// Quadrature / series could not reach the requested tolerance.
class InstanceError : public Error {
public:
  using Error::Error;
};

} // namespace dlcert
