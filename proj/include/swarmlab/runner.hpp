#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "swarmlab/behavior.hpp"
#include "swarmlab/core.hpp"
#include "swarmlab/emergence.hpp"
#include "swarmlab/engines.hpp"
#include "swarmlab/markers.hpp"
#include "swarmlab/swarm_gate.hpp"

namespace swarmlab {

inline constexpr int kScenarioSchemaVersion = 1;

/// Explicit agent list, or a random box drawn with the engine seed.
struct InitialSpec {
  std::vector<AgentState> agents;
  std::optional<RandomBox> random_box;

  bool is_random() const { return random_box.has_value(); }
};

struct OutputSpec {
  std::filesystem::path directory = "runs";
  bool trajectory_csv = true;
  bool markers_csv = true;
  bool events_jsonl = true;
  bool emergence_json = true;
  bool gate_json = true;
  bool plot_data = false;
};

struct Scenario {
  std::string name;
  EngineConfig engine;
  InitialSpec initial;
  ContextDescriptor context;
  std::vector<BehaviorSpec> behaviors;
  MarkerOptions analysis;
  OutputSpec outputs;

  /// Throws ValidationError; run before anything is simulated or written.
  void validate() const;
  Frame initial_frame() const;
};

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::filesystem::path& path);

/// Raised for filesystem failures; the message names the pipeline stage.
class StageError : public std::runtime_error {
 public:
  StageError(const std::string& stage, const std::string& what)
      : std::runtime_error("stage '" + stage + "': " + what), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// Everything the pipeline computes, held in memory.
struct RunResult {
  TrajectoryLog log;
  std::vector<MarkerVector> markers;
  std::vector<BehaviorVerdict> verdicts;
  EmergenceVerdict emergence;
  SwarmChecklist gate;

  std::vector<bool> final_behaviors() const;
  /// First debounced onset of a behavior, if any.
  std::optional<double> first_onset(const std::string& behavior_id) const;
};

/// Analytics half of the pipeline: markers, behaviors, classifiers.
RunResult analyze_log(TrajectoryLog log, const ContextDescriptor& ctx, std::span<const BehaviorSpec> behaviors,
                      const MarkerOptions& options);

/// Engine then analytics; no file output.
RunResult execute_scenario(const Scenario& s);

struct RunReport {
  std::string scenario;
  std::filesystem::path directory;
  std::vector<std::filesystem::path> files;
  std::vector<std::string> behavior_ids;
  std::vector<bool> final_behaviors;
  std::vector<std::optional<double>> onsets;
  EmergenceType type_label = EmergenceType::Type0_None;
  bool is_swarm = false;
};

nlohmann::json to_json(const RunReport& r);

/// Writes the enabled artifacts of an in-memory result into `dir`.
RunReport write_run(const Scenario& s, const RunResult& result, const std::filesystem::path& dir);

/// Validate, simulate, analyze, write everything under s.outputs.directory.
RunReport run_scenario(const Scenario& s);

struct SweepRow {
  std::uint64_t seed = 0;
  std::vector<std::optional<double>> onsets;  // per behavior
  std::vector<bool> final_behaviors;
};

struct SweepReport {
  std::vector<std::string> behavior_ids;
  std::vector<SweepRow> rows;
  /// Fraction of seeds with an onset of each behavior before the run ends.
  std::vector<double> convergence_fraction;
};

struct SweepOptions {
  unsigned jobs = 0;          // 0: hardware concurrency
  bool write_runs = false;    // per-seed artifacts in seed-<n>/ subdirectories
  bool write_report = false;  // sweep.json + sweep.csv in outputs.directory
};

/// One independent run per seed. Explicit-initial scenarios are rejected.
SweepReport sweep(const Scenario& s, std::span<const std::uint64_t> seeds, const SweepOptions& options = {});

nlohmann::json to_json(const SweepReport& r);

}  // namespace swarmlab
