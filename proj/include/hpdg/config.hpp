#pragma once

#include "hpdg/adaptivity.hpp"
#include "hpdg/benchmarks.hpp"
#include "hpdg/dg.hpp"
#include "hpdg/mesh.hpp"
#include "hpdg/reconstruction.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

namespace hpdg
{

enum class RefinementMode
{
  uniform_h,
  uniform_p,
  adaptive_h,
  adaptive_hp
};

std::string to_string(RefinementMode mode);
std::optional<RefinementMode> parse_mode(std::string_view name);

struct RunConfig
{
  BenchmarkId benchmark = BenchmarkId::square_hankel;
  double k = 20.0;
  RefinementMode mode = RefinementMode::adaptive_hp;
  DGParams dg;
  MarkingConfig marking;
  RefinementStrategy refinement = RefinementStrategy::nvb;
  HpConstants hp;
  ReconstructionOptions reconstruction;
  CaseParameters case_params;
  /// resolution constant; unset means the benchmark's default
  std::optional<double> c_res;
  /// start from p = 1, cells of side 1/4
  bool underresolved = false;
  /// uniform initial degree and side of the square cells of the initial
  /// structured mesh; unset means the rule above
  std::optional<int> degree;
  std::optional<double> cell_size;
  int max_levels = 10;
  long max_dofs = 20000;
  std::string output = "run.csv";
  /// final mesh snapshot; empty means output with ".mesh" appended
  std::string snapshot;
  bool residual_estimator = true;
  bool true_error = true;
  /// wall_time_s column; off gives byte-identical CSV across runs
  bool timing = true;
};

/// Configuration error with the offending line (0 when not tied to a line)
/// and key.
class ConfigError : public std::runtime_error
{
public:
  ConfigError(int line, std::string field, const std::string& message);
  int line() const { return line_; }
  const std::string& field() const { return field_; }

private:
  int line_;
  std::string field_;
};

/// Flat "key = value" text; '#' starts a comment. Unknown keys, malformed
/// values and duplicates raise ConfigError.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// Apply one key/value pair (also used for command-line overrides).
void set_config_value(RunConfig& config, const std::string& key, const std::string& value,
                      int line = 0);

/// Range checks across fields; raises ConfigError.
void validate(const RunConfig& config);

/// Keys understood by parse_config, in documentation order.
const std::vector<std::string>& config_keys();

} // namespace hpdg
