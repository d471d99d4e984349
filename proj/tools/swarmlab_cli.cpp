// swarmlab command-line driver.
//
//   swarmlab simulate <scenario.json> [--out DIR] [--plot-data]
//   swarmlab analyze  <trajectory.csv> --behaviors <specs.json> [--context ctx.json] [--out DIR]
//   swarmlab classify <context.json>
//   swarmlab gate     <context.json> --events <events.jsonl>
//   swarmlab sweep    <scenario.json> --seeds a..b [--jobs N] [--write-runs] [--out DIR]
//
// Exit codes: 0 success, 2 validation failure, 1 runtime error.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "swarmlab/runner.hpp"

namespace {

using namespace swarmlab;
namespace fs = std::filesystem;

std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) return {std::stoull(text)};
    const std::uint64_t lo = std::stoull(text.substr(0, dots));
    const std::uint64_t hi = std::stoull(text.substr(dots + 2));
    if (hi < lo) throw ValidationError("seed range '" + text + "' is empty");
    std::vector<std::uint64_t> out;
    for (std::uint64_t s = lo;; ++s) {
      out.push_back(s);
      if (s == hi) break;
    }
    return out;
  } catch (const std::logic_error&) {
    throw ValidationError("bad seed range '" + text + "' (expected a..b)");
  }
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("'" + path + "': " + e.what());
  }
}

void print_report(const RunReport& r) {
  std::cout << "scenario " << r.scenario << " -> " << r.directory.string() << '\n';
  std::cout << "  B(final) = [";
  for (std::size_t i = 0; i < r.final_behaviors.size(); ++i) {
    std::cout << (i ? ", " : "") << (r.final_behaviors[i] ? 1 : 0);
  }
  std::cout << "]  (";
  for (std::size_t i = 0; i < r.behavior_ids.size(); ++i) std::cout << (i ? ", " : "") << r.behavior_ids[i];
  std::cout << ")\n";
  for (std::size_t i = 0; i < r.behavior_ids.size(); ++i) {
    std::cout << "  onset " << r.behavior_ids[i] << ": "
              << (r.onsets[i] ? format_number(*r.onsets[i]) + " s" : std::string("none")) << '\n';
  }
  std::cout << "  emergence: " << to_string(r.type_label) << "\n  swarm: " << (r.is_swarm ? "yes" : "no") << '\n';
}

int cmd_simulate(const std::string& path, const std::string& out, bool plot) {
  Scenario s = load_scenario(path);
  if (!out.empty()) s.outputs.directory = out;
  if (plot) s.outputs.plot_data = true;
  print_report(run_scenario(s));
  return 0;
}

int cmd_analyze(const std::string& csv, const std::string& behaviors_path, const std::string& context_path,
                const std::string& out, const std::string& formula, bool plot) {
  const auto specs = behaviors_from_json(read_json(behaviors_path));
  std::ifstream in(csv);
  if (!in) throw ValidationError("cannot open '" + csv + "'");
  TrajectoryLog log = read_trajectory_csv(in);

  MarkerOptions options;
  if (formula == "negated_exponent") {
    options.separation = SeparationFormula::negated_exponent;
  } else if (formula != "verbatim") {
    throw ValidationError("unknown separation formula '" + formula + "'");
  }

  Scenario s;
  s.name = fs::path(csv).stem().string();
  s.behaviors = specs;
  s.outputs.trajectory_csv = false;
  s.outputs.plot_data = plot;
  ContextDescriptor ctx;
  if (context_path.empty()) {
    s.outputs.emergence_json = false;
    s.outputs.gate_json = false;
  } else {
    ctx = load_context(context_path);
  }
  const fs::path dir = out.empty() ? fs::path(csv).parent_path() : fs::path(out);
  const RunResult result = analyze_log(std::move(log), ctx, specs, options);
  const RunReport report = write_run(s, result, dir.empty() ? fs::path(".") : dir);
  std::cout << "analyzed " << result.log.frame_count() << " frames -> " << report.directory.string() << '\n';
  return 0;
}

int cmd_classify(const std::string& path) {
  std::cout << to_json(classify_emergence(load_context(path))).dump(2) << '\n';
  return 0;
}

int cmd_gate(const std::string& context_path, const std::string& events_path) {
  const ContextDescriptor ctx = load_context(context_path);
  std::vector<BehaviorEvent> events;
  if (!events_path.empty()) {
    std::ifstream in(events_path);
    if (!in) throw ValidationError("cannot open '" + events_path + "'");
    events = read_events_jsonl(in);
  }
  const auto verdicts = verdicts_from_events(events);
  const SwarmChecklist c = evaluate_swarm_gate(ctx, verdicts);
  std::cout << to_json(c).dump(2) << '\n';
  const std::pair<std::string, SwarmChecklist> row{fs::path(context_path).stem().string(), c};
  std::cout << format_checklist_table(std::span(&row, 1));
  return 0;
}

int cmd_sweep(const std::string& path, const std::string& seeds_text, unsigned jobs, bool write_runs,
              const std::string& out) {
  Scenario s = load_scenario(path);
  if (!out.empty()) s.outputs.directory = out;
  const auto seeds = parse_seed_range(seeds_text);
  SweepOptions opt;
  opt.jobs = jobs;
  opt.write_runs = write_runs;
  opt.write_report = true;
  const SweepReport r = sweep(s, seeds, opt);
  for (std::size_t b = 0; b < r.behavior_ids.size(); ++b) {
    std::cout << r.behavior_ids[b] << ": " << format_number(r.convergence_fraction[b]) << " of " << r.rows.size()
              << " seeds reached onset\n";
  }
  std::cout << "report: " << (s.outputs.directory / "sweep.json").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Swarm simulation and observer-side behavior analytics"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir;
  bool plot_data = false;
  auto* simulate = app.add_subcommand("simulate", "Run a scenario end to end");
  simulate->add_option("scenario", scenario_path, "Scenario JSON")->required();
  simulate->add_option("--out", out_dir, "Override the output directory");
  simulate->add_flag("--plot-data", plot_data, "Also write long-format plot_data.csv");

  std::string csv_path, behaviors_path, context_path, formula = "verbatim";
  auto* analyze = app.add_subcommand("analyze", "Markers and behaviors from a trajectory CSV");
  analyze->add_option("trajectory", csv_path, "Trajectory CSV")->required();
  analyze->add_option("--behaviors", behaviors_path, "Behavior specs JSON (array or scenario)")->required();
  analyze->add_option("--context", context_path, "Context JSON; adds emergence and gate outputs");
  analyze->add_option("--out", out_dir, "Output directory (default: next to the CSV)");
  analyze->add_option("--separation-formula", formula, "verbatim | negated_exponent");
  analyze->add_flag("--plot-data", plot_data, "Also write long-format plot_data.csv");

  std::string classify_path;
  auto* classify = app.add_subcommand("classify", "Emergence type of a declared context");
  classify->add_option("context", classify_path, "Context JSON")->required();

  std::string gate_context, events_path;
  auto* gate = app.add_subcommand("gate", "Six-condition swarm checklist");
  gate->add_option("context", gate_context, "Context JSON")->required();
  gate->add_option("--events", events_path, "Behavior events JSONL");

  std::string seeds_text;
  unsigned jobs = 0;
  bool write_runs = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a random-init scenario over many seeds");
  sweep_cmd->add_option("scenario", scenario_path, "Scenario JSON")->required();
  sweep_cmd->add_option("--seeds", seeds_text, "Seed range a..b (inclusive) or a single seed")->required();
  sweep_cmd->add_option("--jobs", jobs, "Worker threads (0 = all cores)");
  sweep_cmd->add_flag("--write-runs", write_runs, "Write per-seed artifacts into seed-<n>/");
  sweep_cmd->add_option("--out", out_dir, "Override the output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*simulate) return cmd_simulate(scenario_path, out_dir, plot_data);
    if (*analyze) return cmd_analyze(csv_path, behaviors_path, context_path, out_dir, formula, plot_data);
    if (*classify) return cmd_classify(classify_path);
    if (*gate) return cmd_gate(gate_context, events_path);
    if (*sweep_cmd) return cmd_sweep(scenario_path, seeds_text, jobs, write_runs, out_dir);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
