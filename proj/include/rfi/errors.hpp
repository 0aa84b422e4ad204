#pragma once

#include <stdexcept>
#include <string>

namespace rfi {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define RFI_DECLARE_ERROR(Name)            \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  };

RFI_DECLARE_ERROR(DimensionError)
RFI_DECLARE_ERROR(NumericError)
RFI_DECLARE_ERROR(SolverError)
RFI_DECLARE_ERROR(UnsupportedOperatorError)
RFI_DECLARE_ERROR(InconsistencyError)
RFI_DECLARE_ERROR(DegenerateError)
RFI_DECLARE_ERROR(ShapeError)
RFI_DECLARE_ERROR(RowSkippedError)

#undef RFI_DECLARE_ERROR

/// Invalid configuration or parameter combination. When raised while
/// reading a scenario file, `line()` is the 1-based offending line (0 if
/// the problem is not tied to a line).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace rfi
