#ifndef POLYMER_EXPERIMENT_HPP
#define POLYMER_EXPERIMENT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace pldp {

const char* version_string();

// One reproducible run: a model spec, an experiment kind, its parameters,
// a root seed and an output location. Unknown keys are rejected.
struct ExperimentConfig {
  nlohmann::json model;  // null for experiments that need no field model
  std::string kind;      // simulate | rate | gamma | rare-event | classify | asymmetry
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::string out = "runs";
  int threads = 1;

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  std::string hash() const;
};

struct RunManifest {
  std::string config_hash;
  std::string version;
  nlohmann::json config;
  nlohmann::json derived = nlohmann::json::object();
  std::uint64_t wall_ms = 0;
  bool invariants_ok = true;
  struct FileEntry {
    std::string path;
    std::uint64_t bytes = 0;
    std::uint64_t runtime_ms = 0;
  };
  std::vector<FileEntry> files;
  nlohmann::json to_json() const;
};

struct RunResult {
  RunManifest manifest;
  std::string results_path;
  std::string manifest_path;
};

// Executes the experiment, writes results as JSON lines plus a manifest,
// and returns both. Result files are byte-deterministic for a fixed config;
// timing lives only in the manifest.
RunResult run(const ExperimentConfig& config);

// Plain-text and CSV tables over a results file (per-T estimate, CI and
// predicted-curve ratio where present).
std::string summarize_text(const std::string& results_path);
std::string summarize_csv(const std::string& results_path);

// Columnar plot data: T, -ln(p), predicted curve, ratio.
void emit_plot_data(const std::string& results_path,
                    const std::string& out_path);

}  // namespace pldp

#endif
