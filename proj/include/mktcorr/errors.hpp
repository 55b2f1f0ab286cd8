#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mktcorr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments or configuration supplied by the caller.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Input data that cannot be processed (malformed files, bad prices, too few rows).
class DataError : public Error {
 public:
  using Error::Error;
};

/// An asset whose returns are constant over a window, so it cannot be standardized.
class ZeroVarianceError : public DataError {
 public:
  ZeroVarianceError(std::string asset, std::size_t window_start, std::string message)
      : DataError(std::move(message)), asset_(std::move(asset)), window_start_(window_start) {}

  const std::string& asset() const noexcept { return asset_; }
  std::size_t window_start() const noexcept { return window_start_; }

 private:
  std::string asset_;
  std::size_t window_start_;
};

/// A computed quantity violated an invariant it must satisfy by construction.
/// This signals a bug or a numerical breakdown, never ordinary bad input.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace mktcorr
