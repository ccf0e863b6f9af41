#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "isinglearn_cli/config.hpp"

namespace isinglearn::cli {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitCapability = 3;

/// Runs one command line (without the program name). Diagnostics go to `err`;
/// output that has no --out file goes to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct SweepRow {
  std::string ensemble;
  int n = 0;
  double beta = 0.0;
  int d = 0;
  int l = 0;
  std::uint64_t seed = 0;
  std::string constraint;
  std::optional<double> frob_err;
  std::optional<double> tv_exact;
  std::optional<double> kl_exact;
  int iters = 0;
  double wall_time = 0.0;
};

/// generate -> sample -> fit -> evaluate for one (l, seed) cell. J* comes
/// from the ensemble block; samples and the fit depend on (seed, l) only.
SweepRow run_sweep_cell(const SweepSpec& spec, int l, std::uint64_t seed);

/// All cells, `jobs` at a time, sorted by (l, seed).
std::vector<SweepRow> run_sweep(const SweepSpec& spec, int jobs);

std::string sweep_csv_header();
std::string format_sweep_row(const SweepRow& row);
void write_sweep_csv(std::vector<SweepRow> rows, std::ostream& out);

}  // namespace isinglearn::cli
