#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>

#include "gdlab/generators/dataset.hpp"
#include "gdlab/io.hpp"
#include "gdlab/layouts/forceatlas2.hpp"
#include "gdlab/layouts/stress_majorization.hpp"
#include "gdlab/training/trainer.hpp"

namespace gdlab::harness {

inline constexpr int kSpecSchemaVersion = 1;

/// A failure inside one pipeline stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& cause)
      : Error("stage " + stage + ": " + cause), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// One experiment: train on one generated class, test on the same or another.
struct ExperimentSpec {
  std::string name = "experiment";
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
  DatasetPlan generator;                // training data (its test split is used when `test` is unset)
  std::optional<DatasetPlan> test;      // cross-class test data
  training::TrainConfig train;
  bool fd = true;
  FDConfig fd_config;
  bool sm = true;
  SMConfig sm_config;
  int render_count = 3;                 // test graphs drawn as SVG per technique
};

// ------------------------------------------------------------ baseline json

inline FDConfig fd_config_from_json(const json& j) {
  FDConfig c;
  c.iterations = j.value("iterations", c.iterations);
  c.scaling_ratio = j.value("scaling_ratio", c.scaling_ratio);
  c.gravity = j.value("gravity", c.gravity);
  c.jitter_tolerance = j.value("jitter_tolerance", c.jitter_tolerance);
  c.strong_gravity = j.value("strong_gravity", c.strong_gravity);
  c.barnes_hut = j.value("barnes_hut", c.barnes_hut);
  if (j.value("lin_log", false) || j.value("prevent_overlap", false)) {
    throw std::invalid_argument("FD: lin_log and prevent_overlap are not supported");
  }
  c.validate();
  return c;
}

inline json to_json(const SMConfig& c) {
  return {{"max_iters", c.max_iters},
          {"tolerance", c.tolerance},
          {"init", c.init == SMInit::Random ? "random" : "classical"}};
}

inline SMConfig sm_config_from_json(const json& j) {
  SMConfig c;
  c.max_iters = j.value("max_iters", c.max_iters);
  c.tolerance = j.value("tolerance", c.tolerance);
  const std::string init = j.value("init", std::string("classical"));
  if (init == "random") c.init = SMInit::Random;
  else if (init != "classical") throw std::invalid_argument("SM init must be classical or random");
  c.validate();
  return c;
}

// ------------------------------------------------------------ spec json

/// Every field written out, defaults included.
inline json to_json(const ExperimentSpec& s) {
  json fd = to_json(s.fd_config);
  fd["enabled"] = s.fd;
  json sm = to_json(s.sm_config);
  sm["enabled"] = s.sm;
  return {{"schema_version", kSpecSchemaVersion},
          {"name", s.name},
          {"seed", s.seed},
          {"output_dir", s.output_dir.generic_string()},
          {"generator", to_json(s.generator)},
          {"test", s.test ? to_json(*s.test) : json(nullptr)},
          {"train", training::to_json(s.train)},
          {"baselines", {{"fd", fd}, {"sm", sm}}},
          {"render", {{"count", s.render_count}}}};
}

inline ExperimentSpec spec_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("spec must be a JSON object");
  if (!j.contains("schema_version")) throw std::invalid_argument("spec needs \"schema_version\"");
  if (j.at("schema_version").get<int>() != kSpecSchemaVersion) {
    throw std::invalid_argument("unsupported spec schema_version " + j.at("schema_version").dump());
  }
  if (!j.contains("generator")) throw std::invalid_argument("spec needs a \"generator\" plan");
  ExperimentSpec s;
  s.name = j.value("name", s.name);
  s.seed = j.value("seed", s.seed);
  s.output_dir = j.value("output_dir", s.output_dir.string());
  s.generator = plan_from_json(j.at("generator"));
  validate(s.generator);
  if (j.contains("test") && !j.at("test").is_null()) {
    s.test = plan_from_json(j.at("test"));
    validate(*s.test);
  }
  s.train = training::train_config_from_json(j.value("train", json::object()));
  if (j.contains("baselines")) {
    const auto& b = j.at("baselines");
    if (b.contains("fd")) {
      s.fd = b.at("fd").value("enabled", true);
      s.fd_config = fd_config_from_json(b.at("fd"));
    }
    if (b.contains("sm")) {
      s.sm = b.at("sm").value("enabled", true);
      s.sm_config = sm_config_from_json(b.at("sm"));
    }
  }
  if (j.contains("render")) s.render_count = j.at("render").value("count", s.render_count);
  if (s.render_count < 0) throw std::invalid_argument("render count must be >= 0");
  return s;
}

inline ExperimentSpec load_spec(const std::filesystem::path& path) {
  try {
    return spec_from_json(read_json(path));
  } catch (const std::exception& e) {
    throw StageError("parse", e.what());
  }
}

/// 64-bit FNV-1a of the canonical spec JSON without its output directory, as 16 hex digits.
inline std::string spec_hash(const ExperimentSpec& s) {
  json j = to_json(s);
  j.erase("output_dir");
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Applies LAB_SEED when set; returns the overriding value.
inline std::optional<std::uint64_t> apply_seed_override(ExperimentSpec& s) {
  const char* env = std::getenv("LAB_SEED");
  if (!env || !*env) return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0') throw StageError("parse", std::string("LAB_SEED is not an unsigned integer: ") + env);
  s.seed = v;
  return v;
}

}  // namespace gdlab::harness
