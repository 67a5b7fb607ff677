#pragma once

#include <stdexcept>
#include <string>

namespace gcgail {

// Each failure class named by the contracts gets its own type so callers
// (notably the CLI exit-code mapping) can dispatch on it.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class StateError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Raised by a trainer when a loss or parameter goes non-finite.
class TrainingAborted : public Error {
 public:
  using Error::Error;
};

// A checkpoint used with a conditioning mode it was not trained for.
class CompatibilityError : public Error {
 public:
  using Error::Error;
};

// Experiment matrix cells without results.
class IncompleteMatrix : public Error {
 public:
  using Error::Error;
};

}  // namespace gcgail
