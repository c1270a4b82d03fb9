#pragma once

#include <stdexcept>
#include <string>

namespace evsched {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or missing input data (feeds, CSV files, configs).
class DataError : public Error {
 public:
  using Error::Error;
};

/// No chaining satisfies the battery and next-day constraints.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, int block_id)
      : Error(what), block_id_(block_id) {}
  explicit InfeasibleError(const std::string& what) : Error(what) {}

  /// Block that could not be served, or -1 when unknown.
  int block_id() const { return block_id_; }

 private:
  int block_id_ = -1;
};

/// Time limit expired before any feasible solution was found.
class TimeLimitError : public Error {
 public:
  using Error::Error;
};

}  // namespace evsched
