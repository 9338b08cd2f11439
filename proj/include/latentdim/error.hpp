#pragma once

#include <stdexcept>
#include <string>

namespace latentdim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The network structure violates one of its invariants.
class InvalidModel : public Error {
 public:
  using Error::Error;
};

/// Malformed input: files, datasets, parameter points that do not fit a model.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Full joint enumeration would exceed the configured state cap.
class StateCapExceeded : public Error {
 public:
  using Error::Error;
};

/// A numeric precondition failed (boundary point, zero count, nonpositive prior).
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace latentdim
