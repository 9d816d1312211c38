#pragma once

#include <stdexcept>
#include <string>

namespace threshold {

/// Evaluation outside the region r > e_k where the iterated logarithms are positive.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Iterated exponential beyond double range (e_4 and up).
class OverflowDepth : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Caller violated a documented precondition (negative moment order, eps <= 0, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class StepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NodeInWindow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoBracket : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PositivityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotInverseSquare : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace threshold
