#include "sirdi/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/core.h>
#include <json.hpp>

#include "sirdi/error.hpp"

namespace sirdi {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, std::string_view where,
                    std::initializer_list<std::string_view> known) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || key == k;
    if (!ok) throw ValidationError(fmt::format("{}{}: unknown key", where, key));
  }
}

template <class T>
void read(const json& obj, const char* key, std::string_view where, T& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  const std::string field = fmt::format("{}{}", where, key);
  if constexpr (std::is_same_v<T, std::string>) {
    if (!it->is_string()) throw ValidationError(field + ": expected a string");
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!it->is_number()) throw ValidationError(field + ": expected a number");
  } else if constexpr (std::is_unsigned_v<T>) {
    if (!it->is_number_unsigned()) throw ValidationError(field + ": expected a non-negative integer");
  } else {
    if (!it->is_number_integer()) throw ValidationError(field + ": expected an integer");
  }
  out = it->get<T>();
}

}  // namespace

void RunConfig::validate() const {
  if (scenario.empty()) throw ValidationError("scenario: must be non-empty");
  try {
    model.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("model.") + e.what());
  }
  if (!(s0 >= 0.0 && s0 <= 1.0)) throw ValidationError(fmt::format("s0: must lie in [0, 1] (got {})", s0));
  if (i0 < 0) throw ValidationError(fmt::format("i0: must be >= 0 (got {})", i0));
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
    throw ValidationError(fmt::format("horizon: must be finite and >= 0 (got {})", horizon));
  }
  if (reps < 1) throw ValidationError(fmt::format("reps: must be >= 1 (got {})", reps));
  if (!(recorder.stride > 0.0) || !std::isfinite(recorder.stride)) {
    throw ValidationError(fmt::format("recorder.stride: must be > 0 (got {})", recorder.stride));
  }
  if (recorder.bins < 1) throw ValidationError("recorder.bins: must be >= 1");
  if (output_dir.empty()) throw ValidationError("output_dir: must be non-empty");
}

RunConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(fmt::format("config: malformed JSON ({})", e.what()));
  }
  if (!doc.is_object()) throw ValidationError("config: top level must be an object");
  reject_unknown(doc, "", {"scenario", "model", "s0", "i0", "horizon", "seed", "reps", "recorder", "output_dir"});

  RunConfig cfg;
  read(doc, "scenario", "", cfg.scenario);
  if (auto it = doc.find("model"); it != doc.end()) {
    if (!it->is_object()) throw ValidationError("model: expected an object");
    reject_unknown(*it, "model.", {"n", "mu", "r0", "gamma", "kappa"});
    read(*it, "n", "model.", cfg.model.n);
    read(*it, "mu", "model.", cfg.model.mu);
    read(*it, "r0", "model.", cfg.model.r0);
    read(*it, "gamma", "model.", cfg.model.gamma);
    read(*it, "kappa", "model.", cfg.model.kappa);
  }
  read(doc, "s0", "", cfg.s0);
  read(doc, "i0", "", cfg.i0);
  read(doc, "horizon", "", cfg.horizon);
  read(doc, "seed", "", cfg.seed);
  read(doc, "reps", "", cfg.reps);
  if (auto it = doc.find("recorder"); it != doc.end()) {
    if (!it->is_object()) throw ValidationError("recorder: expected an object");
    reject_unknown(*it, "recorder.", {"stride", "bins"});
    read(*it, "stride", "recorder.", cfg.recorder.stride);
    read(*it, "bins", "recorder.", cfg.recorder.bins);
  }
  read(doc, "output_dir", "", cfg.output_dir);
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("config: cannot read {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
  json doc = {
      {"scenario", cfg.scenario},
      {"model",
       {{"n", cfg.model.n}, {"mu", cfg.model.mu}, {"r0", cfg.model.r0}, {"gamma", cfg.model.gamma},
        {"kappa", cfg.model.kappa}}},
      {"s0", cfg.s0},
      {"i0", cfg.i0},
      {"horizon", cfg.horizon},
      {"seed", cfg.seed},
      {"reps", cfg.reps},
      {"recorder", {{"stride", cfg.recorder.stride}, {"bins", cfg.recorder.bins}}},
      {"output_dir", cfg.output_dir},
  };
  return doc.dump(2) + "\n";
}

}  // namespace sirdi
