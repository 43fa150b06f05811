#pragma once

#include <stdexcept>
#include <string>

namespace uhom {

//! Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! Argument outside the mathematical domain of an operation (negative t, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

//! Non-finite or otherwise unusable input data.
class DataError : public Error {
 public:
  using Error::Error;
};

//! Caller violated a precondition (dimension mismatch, bc violation, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

//! A numerical certificate could not be produced on the scan range.
class CertificateError : public Error {
 public:
  using Error::Error;
};

//! Iteration (bracket growth, bisection) failed to terminate.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

//! Every restart of a minimisation produced non-finite energies.
class SolverError : public Error {
 public:
  using Error::Error;
};

//! Malformed or semantically invalid configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace uhom
