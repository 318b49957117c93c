#pragma once

#include <stdexcept>
#include <string>

namespace fvcg {

// Base for every error raised by the library. The CLI maps subclasses onto
// process exit codes (see tools/fvcg_main.cpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Negative quality/cost argument or other out-of-domain input.
class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// q_i + p_i == 0 in the unit-price ratio.
class DegenerateRatioError : public Error {
 public:
  using Error::Error;
};

// Closed-form solver asked to handle a non SqrtSum/Linear economy.
class UnsupportedEconomyError : public Error {
 public:
  using Error::Error;
};

// Non-finite value encountered in a solver, network or loss.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// A request the implementation refuses (e.g. grid oracle on large n).
class RefusalError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// Invariant of a network type violated (e.g. negative monotonic weight).
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace fvcg
