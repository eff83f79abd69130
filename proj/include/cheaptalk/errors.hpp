#pragma once

#include <stdexcept>
#include <string>

namespace cheaptalk {

// Base for every domain failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Likelihood ratio requested where the low-type density vanishes.
class DivisionOutsideSupport : public Error {
 public:
  using Error::Error;
};

// An alpha/beta integral does not converge for the given pair.
class DivergentIntegral : public Error {
 public:
  using Error::Error;
};

class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

// The commitment schedule's linear system is singular (T = 1 or
// indistinguishable types).
class DegenerateHorizon : public Error {
 public:
  using Error::Error;
};

// A bias threshold was requested outside the half-interval where it is defined.
class OutOfRegime : public Error {
 public:
  using Error::Error;
};

class NoEquilibrium : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

}  // namespace cheaptalk
