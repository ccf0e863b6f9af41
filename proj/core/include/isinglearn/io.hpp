#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "isinglearn/core.hpp"

namespace isinglearn {

enum class CouplingEncoding { Dense, Triplets };

/// Model file text: {"n": int, "h": [...], "J": {"dense": [[...]]}} or
/// {"triplets": [[i, j, v], ...]} with i < j. Doubles use 17 significant
/// digits so a save/load round trip is bit-exact.
std::string model_to_json(const IsingModel& m, CouplingEncoding enc = CouplingEncoding::Dense);
IsingModel model_from_json(const std::string& text);

void save_model(const IsingModel& m, const std::filesystem::path& path,
                CouplingEncoding enc = CouplingEncoding::Dense);
IsingModel load_model(const std::filesystem::path& path);

/// Sample CSV: one row per sample, comma separated "-1"/"1", no header.
void write_samples(const SampleBatch& batch, std::ostream& out);
SampleBatch read_samples(std::istream& in);
void save_samples(const SampleBatch& batch, const std::filesystem::path& path);
SampleBatch load_samples(const std::filesystem::path& path);

/// "%.17g"
std::string format_double(double v);

}  // namespace isinglearn
