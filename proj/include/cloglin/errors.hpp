#pragma once

#include <stdexcept>
#include <string>

namespace cloglin {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed, inconsistent or out-of-domain input data.
class InputError : public Error {
 public:
  using Error::Error;
};

// Estimation failed: non-convergence, singular information, divergence.
class FitError : public Error {
 public:
  using Error::Error;
};

// An odds ratio was requested where a probability is exactly 0 or 1.
class DegenerateProbability : public Error {
 public:
  using Error::Error;
};

}  // namespace cloglin
