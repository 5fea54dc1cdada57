#pragma once

#include <atomic>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ncb {

/// Invalid argument value (empty lists, out-of-range indices, bad parameters).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operator dimensions that do not line up.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Assembled problem would exceed the configured dimension cap.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Operation only defined for a particular Hilbert space dimension.
class UnsupportedDimension : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Eigenvalue-1 clusters of a norm-1 candidate are not mutually orthogonal.
class DeltaViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed scenario file.
class FormatError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

enum class LogLevel { Debug = 0, Info = 1, Warning = 2, Error = 3, Off = 4 };

namespace detail {
inline std::atomic<LogLevel>& log_threshold() {
  static std::atomic<LogLevel> level{LogLevel::Warning};
  return level;
}
inline std::mutex& log_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

inline void set_log_level(LogLevel level) { detail::log_threshold().store(level); }

inline bool log_threshold_allows(LogLevel level) { return level >= detail::log_threshold().load(); }

inline void log(LogLevel level, std::string_view msg) {
  if (level < detail::log_threshold().load()) return;
  static constexpr const char* names[] = {"debug", "info", "warning", "error"};
  std::lock_guard lock(detail::log_mutex());
  std::clog << "[ncb " << names[static_cast<int>(level)] << "] " << msg << '\n';
}

}  // namespace ncb
