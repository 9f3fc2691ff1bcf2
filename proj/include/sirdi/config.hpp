#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "sirdi/params.hpp"

namespace sirdi {

struct RecorderConfig {
  /// Years between time-series snapshots.
  double stride = 0.1;
  /// Uniform occupancy bins on [0, 1].
  std::size_t bins = 50;

  bool operator==(const RecorderConfig&) const = default;
};

/// One scenario: model, start, horizon and output settings. JSON keys match the
/// field names; `model` nests the ModelParams fields and `recorder` the recorder ones.
struct RunConfig {
  std::string scenario = "custom";
  ModelParams model;
  double s0 = 0.5;
  std::int64_t i0 = 0;
  double horizon = 100.0;
  std::uint64_t seed = 1;
  std::int64_t reps = 1;
  RecorderConfig recorder;
  std::string output_dir = "out";

  /// Throws ValidationError naming the offending field.
  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

/// Parses and validates JSON text. Unknown keys and wrongly typed values are
/// ValidationErrors; missing keys keep their defaults.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);
/// Pretty-printed JSON carrying every field.
std::string serialize_config(const RunConfig& cfg);

}  // namespace sirdi
