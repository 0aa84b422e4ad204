#pragma once

#include "rfi/scenario.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rfi {

struct RunOptions {
  std::optional<std::uint64_t> seed;     // overrides the scenario seed
  std::optional<std::string> out_dir;    // overrides the scenario output directory
  unsigned threads = 1;
  bool write_files = true;
};

struct Assertion {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunResult {
  std::vector<Assertion> assertions;
  std::string report;
  /// File name -> contents; written to the output directory unless disabled.
  std::map<std::string, std::string> files;
  std::string out_dir;

  bool passed() const;
  /// 0 when every assertion passed, 1 otherwise.
  int exit_code() const { return passed() ? 0 : 1; }
};

/// Runs the ensemble, the enabled diagnostics and the integral-equation job.
/// Throws ConfigError for unusable combinations and rfi::Error on numeric failure.
RunResult run_scenario(const Scenario& scenario, const RunOptions& options = {});

/// Stream ids at and above this value are reserved for diagnostics; trajectory
/// m uses stream id m.
inline constexpr std::uint64_t kDiagnosticStreamBase = std::uint64_t{1} << 62;

}  // namespace rfi
