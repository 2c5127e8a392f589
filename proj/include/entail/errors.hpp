#pragma once

#include <stdexcept>
#include <string>

namespace entail {

/// Base class for all errors raised by the library. The CLI maps each
/// subclass onto a distinct process exit code.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data: bad files, coverage gaps,
/// invariant violations, non-finite scores.
class DataError : public Error {
  public:
    using Error::Error;
};

/// Remote scorer unreachable or misbehaving after all retries.
class TransportError : public Error {
  public:
    using Error::Error;
};

/// Invalid parameters supplied by the caller (bad grid, bad config).
class UsageError : public Error {
  public:
    using Error::Error;
};

}  // namespace entail
