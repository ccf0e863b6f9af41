#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "isinglearn/ensembles.hpp"
#include "isinglearn/errors.hpp"
#include "isinglearn/optimizer.hpp"
#include "isinglearn/projections.hpp"

namespace isinglearn::cli {

/// Config-file or flag problem. The message starts with the offending field.
class ConfigError : public isinglearn::Error {
 public:
  using Error::Error;
};

enum class SampleMethod { Glauber, Exact };

struct SweepSpec {
  EnsembleSpec ensemble;
  std::vector<int> l_values;
  std::vector<std::uint64_t> seeds;
  ConstraintSet constraint = SpectralSpread{1.0};
  FitConfig optimizer;
  std::vector<std::string> metrics;  // frobenius, tv_exact, kl_exact
  SampleMethod method = SampleMethod::Exact;
  bool timing = true;                // false writes wall_time as 0
};

/// Parsed config document. Every block is optional; absent blocks keep
/// library defaults.
struct ConfigFile {
  std::optional<EnsembleSpec> ensemble;
  std::optional<ConstraintSet> constraint;
  std::optional<FitConfig> optimizer;
  std::optional<SweepSpec> sweep;  // ensemble/constraint/optimizer not yet merged
};

ConfigFile parse_config(const std::string& text);
ConfigFile load_config(const std::filesystem::path& path);

/// "SpectralSpread(0.9)", "OpNormBall(1)", "WidthBall(2)", "AntiferroSpike(0.5;1.5)".
ConstraintSet parse_constraint(const std::string& text);

SampleMethod sample_method_from_string(const std::string& name);

/// Merges the blocks of `file` into a sweep and checks it. Throws
/// ConfigError naming the field, CapabilityError for exact metrics above
/// the enumeration cap.
SweepSpec resolve_sweep(const ConfigFile& file);
void validate(const SweepSpec& spec);

}  // namespace isinglearn::cli
