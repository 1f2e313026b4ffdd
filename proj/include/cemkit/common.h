#pragma once

#include <stdexcept>
#include <string>

namespace cemkit {

// Error taxonomy shared across the kit. Everything user-facing derives from
// Error so the C API and CLI can map categories to exit codes.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad function argument or configuration value.
class InvalidParameter : public Error {
 public:
  explicit InvalidParameter(const std::string& msg) : Error(msg) {}
};

// Input files: missing file/column, unknown cross-reference, length mismatch.
class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& msg) : Error(msg) {}
};

// Configuration vocabulary violations (e.g. foresight with full 52 weeks).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Filesystem write failures and similar.
class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

// Solve-level failure (numerical breakdown, size cap, iteration trace).
class SolveError : public Error {
 public:
  explicit SolveError(const std::string& msg) : Error(msg) {}
};

inline constexpr double kUnservedPenaltyPerMwh = 5000.0;  // $/MWh
inline constexpr double kTxExpansionFloorMw = 400.0;      // MW per corridor-period

}  // namespace cemkit
