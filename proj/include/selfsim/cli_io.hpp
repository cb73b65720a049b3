#pragma once

// Configuration files, CSV / manifest emission and the `selfsim` command line.

#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "selfsim/profile.hpp"
#include "selfsim/shooting.hpp"

namespace selfsim {

/// Flat `key = value` text, `#` starts a comment. Keys are the ShootConfig
/// field names plus rtol, atol, max_step, min_step, value_cap, max_steps.
ShootConfig parse_config(std::string_view text, std::string_view origin = "<config>");
/// Defaults when `path` is empty.
ShootConfig load_config(const std::optional<std::filesystem::path>& path);

/// Every configuration key with its current value, in a fixed order. Unset
/// optional step bounds are omitted.
std::vector<std::pair<std::string, double>> config_entries(const ShootConfig& cfg);

/// Shortest decimal string that reads back to the same double.
std::string format_double(double v);

/// Header "y,f,fp", one row per node in ascending y, LF line endings.
void write_profile_csv(const Profile& profile, const std::filesystem::path& path);

struct CsvProfile {
  std::vector<double> y, f, fp;
};
CsvProfile read_profile_csv(const std::filesystem::path& path);

struct OutcomeSummary {
  std::string label;
  std::string tag;  // outcome tag, or the error kind of a failed point
  double value = std::numeric_limits<double>::quiet_NaN();
  std::string message;
};

struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, double>> params;
  std::vector<std::pair<std::string, double>> derived_constants;
  std::vector<OutcomeSummary> outcomes;
  std::vector<std::string> files;
  std::optional<std::pair<ErrorKind, std::string>> error;

  /// FNV-1a 64 over the command and the params, as 16 hex digits.
  std::string config_hash() const;
  std::string to_json() const;
  std::optional<double> constant(std::string_view key) const;
};

/// Runs one subcommand. Exit codes: 0 success, 1 usage error, 2 solver failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace selfsim
