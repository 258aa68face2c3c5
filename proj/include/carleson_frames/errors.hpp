#pragma once

#include <stdexcept>
#include <string>

namespace cframes {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Index past the end of a finite sequence or weight list.
class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

/// A value left the open unit disc, or a constructor precondition failed.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// An explicit weight breaches its declared [C1, C2] envelope.
class BoundViolation : public Error {
 public:
  using Error::Error;
};

class EmptySequence : public Error {
 public:
  using Error::Error;
};

class SingularDenominator : public Error {
 public:
  using Error::Error;
};

class NonHermitian : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// The input does not satisfy the hypotheses an analysis relies on
/// (e.g. a defect sum on a sequence that is not real-positive increasing).
class HypothesisViolation : public Error {
 public:
  using Error::Error;
};

class SearchBudgetExhausted : public Error {
 public:
  using Error::Error;
};

}  // namespace cframes
