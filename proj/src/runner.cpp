#include "swarmlab/runner.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <set>
#include <thread>

namespace swarmlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Vec2 vec_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ValidationError(std::string(what) + " must be a 2-element numeric array");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

std::map<std::string, double> params_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("engine params must be an object");
  std::map<std::string, double> out;
  for (const auto& [key, value] : j.items()) {
    if (value.is_array()) {
      const Vec2 v = vec_from_json(value, ("engine param '" + key + "'").c_str());
      out[key + ".x"] = v.x;
      out[key + ".y"] = v.y;
    } else if (value.is_number()) {
      out[key] = value.get<double>();
    } else {
      throw ValidationError("engine param '" + key + "' must be a number or 2-vector");
    }
  }
  return out;
}

json params_to_json(const std::map<std::string, double>& params) {
  json out = json::object();
  for (const auto& [key, value] : params) {
    const bool is_x = key.size() > 2 && key.compare(key.size() - 2, 2, ".x") == 0;
    const bool is_y = key.size() > 2 && key.compare(key.size() - 2, 2, ".y") == 0;
    if (is_x || is_y) {
      const std::string base = key.substr(0, key.size() - 2);
      if (params.count(base + ".x") && params.count(base + ".y")) {
        out[base] = {params.at(base + ".x"), params.at(base + ".y")};
        continue;
      }
    }
    out[key] = value;
  }
  return out;
}

template <typename T>
T get_or_throw(const json& j, const char* key, const char* where) {
  if (!j.contains(key)) throw ValidationError(std::string(where) + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string(where) + ": field '" + key + "' has the wrong type");
  }
}

EngineConfig engine_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("scenario: engine must be an object");
  EngineConfig cfg;
  cfg.family = engine_family_from_string(get_or_throw<std::string>(j, "family", "engine"));
  cfg.n_agents = get_or_throw<int>(j, "n_agents", "engine");
  cfg.dt = j.contains("dt") ? get_or_throw<double>(j, "dt", "engine") : 0.01;
  cfg.duration = get_or_throw<double>(j, "duration", "engine");
  if (j.contains("seed")) {
    const auto& s = j.at("seed");
    if (s.is_string()) {
      try {
        cfg.seed = std::stoull(s.get<std::string>());
      } catch (const std::exception&) {
        throw ValidationError("engine: seed is not an unsigned integer");
      }
    } else if (s.is_number_unsigned() || (s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      cfg.seed = s.get<std::uint64_t>();
    } else {
      throw ValidationError("engine: seed must be an unsigned 64-bit integer");
    }
  }
  cfg.log_every = j.contains("log_every") ? get_or_throw<int>(j, "log_every", "engine") : 1;
  if (j.contains("params")) cfg.params = params_from_json(j.at("params"));
  return cfg;
}

AgentState agent_from_json(const json& j) {
  AgentState a;
  a.position = {get_or_throw<double>(j, "x", "agent"), get_or_throw<double>(j, "y", "agent")};
  if (j.contains("heading") && !j.at("heading").is_null()) {
    a.heading = wrap_angle(get_or_throw<double>(j, "heading", "agent"));
  }
  a.body_radius = j.contains("body_radius") ? get_or_throw<double>(j, "body_radius", "agent") : 0.0;
  a.validate();
  return a;
}

json agent_to_json(const AgentState& a) {
  json j = {{"x", a.position.x}, {"y", a.position.y}, {"body_radius", a.body_radius}};
  if (a.heading) j["heading"] = *a.heading;
  return j;
}

void require_params(const EngineConfig& cfg) {
  switch (cfg.family) {
    case EngineFamily::rigid_rotation:
      cfg.require("angular_speed");
      cfg.require_vec("pivot");
      break;
    case EngineFamily::feedforward_field:
      break;
    case EngineFamily::dubins_binary_sensor:
      if (!(cfg.param("omega_max", DubinsDefaults::omega_max) > 0.0)) {
        throw ValidationError("engine: omega_max must be positive");
      }
      break;
    case EngineFamily::distributed_formation:
      if (cfg.n_agents < 2) throw ValidationError("formation requires at least 2 agents");
      cfg.require_vec("target");
      cfg.require("radius");
      cfg.require("k_r");
      cfg.require("k_s");
      break;
  }
}

}  // namespace

void Scenario::validate() const {
  if (name.empty()) throw ValidationError("scenario needs a name");
  engine.validate();
  require_params(engine);
  context.validate();
  if (context.dynamics_family != to_string(engine.family)) {
    throw ValidationError("scenario: context dynamics_family '" + context.dynamics_family +
                          "' does not match engine family '" + to_string(engine.family) + "'");
  }
  if (initial.is_random()) {
    if (!initial.agents.empty()) throw ValidationError("scenario: initial has both agents and random_box");
  } else {
    if (static_cast<int>(initial.agents.size()) != engine.n_agents) {
      throw ValidationError("scenario: initial agent count " + std::to_string(initial.agents.size()) +
                            " does not match engine.n_agents " + std::to_string(engine.n_agents));
    }
    for (const auto& a : initial.agents) {
      a.validate();
      if (engine.family == EngineFamily::dubins_binary_sensor && !a.heading) {
        throw ValidationError("dubins engine requires headings");
      }
    }
  }
  std::set<std::string> ids;
  for (const auto& b : behaviors) {
    b.validate();
    if (!ids.insert(b.id).second) throw ValidationError("scenario: duplicate behavior id '" + b.id + "'");
  }
}

Frame Scenario::initial_frame() const {
  if (initial.is_random()) {
    RandomBox box = *initial.random_box;
    box.with_heading = box.with_heading || engine.family == EngineFamily::dubins_binary_sensor;
    return random_initial(engine.n_agents, box, engine.seed);
  }
  return initial.agents;
}

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("scenario must be a JSON object");
  const int version = get_or_throw<int>(j, "schema_version", "scenario");
  if (version != kScenarioSchemaVersion) {
    throw ValidationError("scenario: unsupported schema_version " + std::to_string(version));
  }
  Scenario s;
  s.name = get_or_throw<std::string>(j, "name", "scenario");
  s.engine = engine_from_json(j.at("engine"));

  if (!j.contains("initial")) throw ValidationError("scenario: missing field 'initial'");
  const auto& init = j.at("initial");
  if (init.contains("agents")) {
    for (const auto& a : init.at("agents")) s.initial.agents.push_back(agent_from_json(a));
  }
  if (init.contains("random_box")) {
    const auto& b = init.at("random_box");
    RandomBox box;
    if (b.contains("min")) box.min = vec_from_json(b.at("min"), "random_box.min");
    if (b.contains("max")) box.max = vec_from_json(b.at("max"), "random_box.max");
    box.body_radius = b.value("body_radius", box.body_radius);
    box.with_heading = b.value("with_heading", true);
    s.initial.random_box = box;
  }
  if (!init.contains("agents") && !init.contains("random_box")) {
    throw ValidationError("scenario: initial needs 'agents' or 'random_box'");
  }

  if (!j.contains("context")) throw ValidationError("scenario: missing field 'context'");
  s.context = context_from_json(j.at("context"));
  s.behaviors = j.contains("behaviors") ? behaviors_from_json(j.at("behaviors")) : default_behaviors();

  if (j.contains("analysis")) {
    const std::string f = j.at("analysis").value("separation_formula", std::string("verbatim"));
    if (f == "verbatim") {
      s.analysis.separation = SeparationFormula::verbatim;
    } else if (f == "negated_exponent") {
      s.analysis.separation = SeparationFormula::negated_exponent;
    } else {
      throw ValidationError("scenario: unknown separation_formula '" + f + "'");
    }
  }

  if (j.contains("outputs")) {
    const auto& o = j.at("outputs");
    s.outputs.directory = o.value("directory", std::string("runs/") + s.name);
    s.outputs.trajectory_csv = o.value("trajectory_csv", true);
    s.outputs.markers_csv = o.value("markers_csv", true);
    s.outputs.events_jsonl = o.value("events_jsonl", true);
    s.outputs.emergence_json = o.value("emergence_json", true);
    s.outputs.gate_json = o.value("gate_json", true);
    s.outputs.plot_data = o.value("plot_data", false);
  } else {
    s.outputs.directory = fs::path("runs") / s.name;
  }
  s.validate();
  return s;
}

json scenario_to_json(const Scenario& s) {
  json engine = {{"family", to_string(s.engine.family)},
                 {"n_agents", s.engine.n_agents},
                 {"dt", s.engine.dt},
                 {"duration", s.engine.duration},
                 {"seed", s.engine.seed},
                 {"log_every", s.engine.log_every},
                 {"params", params_to_json(s.engine.params)}};
  json initial = json::object();
  if (s.initial.is_random()) {
    const auto& b = *s.initial.random_box;
    initial["random_box"] = {{"min", {b.min.x, b.min.y}},
                             {"max", {b.max.x, b.max.y}},
                             {"body_radius", b.body_radius},
                             {"with_heading", b.with_heading}};
  } else {
    initial["agents"] = json::array();
    for (const auto& a : s.initial.agents) initial["agents"].push_back(agent_to_json(a));
  }
  json behaviors = json::array();
  for (const auto& b : s.behaviors) behaviors.push_back(behavior_to_json(b));
  return {{"schema_version", kScenarioSchemaVersion},
          {"name", s.name},
          {"engine", engine},
          {"initial", initial},
          {"context", context_to_json(s.context)},
          {"behaviors", behaviors},
          {"analysis",
           {{"separation_formula",
             s.analysis.separation == SeparationFormula::verbatim ? "verbatim" : "negated_exponent"}}},
          {"outputs",
           {{"directory", s.outputs.directory.string()},
            {"trajectory_csv", s.outputs.trajectory_csv},
            {"markers_csv", s.outputs.markers_csv},
            {"events_jsonl", s.outputs.events_jsonl},
            {"emergence_json", s.outputs.emergence_json},
            {"gate_json", s.outputs.gate_json},
            {"plot_data", s.outputs.plot_data}}}};
}

Scenario load_scenario(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("scenario file '" + path.string() + "': " + e.what());
  }
  return scenario_from_json(j);
}

// ---------------------------------------------------------------------------

std::vector<bool> RunResult::final_behaviors() const {
  std::vector<bool> out;
  for (const auto& v : verdicts) out.push_back(!v.series.empty() && v.series.back());
  return out;
}

std::optional<double> RunResult::first_onset(const std::string& behavior_id) const {
  for (const auto& v : verdicts) {
    if (v.behavior_id == behavior_id && !v.events.empty()) return v.events.front().onset_t;
  }
  return std::nullopt;
}

RunResult analyze_log(TrajectoryLog log, const ContextDescriptor& ctx, std::span<const BehaviorSpec> behaviors,
                      const MarkerOptions& options) {
  auto markers = compute_marker_series(log, options);
  std::vector<BehaviorVerdict> verdicts;
  for (const auto& b : behaviors) verdicts.push_back(evaluate_behavior(b, markers, log.timestamps()));
  auto emergence = classify_emergence(ctx);
  auto gate = evaluate_swarm_gate(ctx, verdicts);
  return RunResult{std::move(log), std::move(markers), std::move(verdicts), std::move(emergence), std::move(gate)};
}

RunResult execute_scenario(const Scenario& s) {
  s.validate();
  const Frame initial = s.initial_frame();
  return analyze_log(simulate(s.engine, initial), s.context, s.behaviors, s.analysis);
}

json to_json(const RunReport& r) {
  json files = json::array();
  for (const auto& f : r.files) files.push_back(f.filename().string());
  json final_b = json::object();
  json onsets = json::object();
  for (std::size_t i = 0; i < r.behavior_ids.size(); ++i) {
    final_b[r.behavior_ids[i]] = r.final_behaviors[i] ? 1 : 0;
    onsets[r.behavior_ids[i]] = r.onsets[i] ? json(*r.onsets[i]) : json(nullptr);
  }
  return {{"scenario", r.scenario},
          {"files", files},
          {"final_behaviors", final_b},
          {"onset_t", onsets},
          {"type_label", to_string(r.type_label)},
          {"is_swarm", r.is_swarm}};
}

namespace {

template <typename Fn>
fs::path write_file(const fs::path& path, const std::string& stage, Fn&& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StageError(stage, "cannot open '" + path.string() + "' for writing");
  body(out);
  out.flush();
  if (!out) throw StageError(stage, "write to '" + path.string() + "' failed");
  return path;
}

}  // namespace

RunReport write_run(const Scenario& s, const RunResult& result, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw StageError("output", "cannot create directory '" + dir.string() + "': " + ec.message());

  RunReport r;
  r.scenario = s.name;
  r.directory = dir;
  const auto& t = result.log.timestamps();
  if (s.outputs.trajectory_csv) {
    r.files.push_back(write_file(dir / "trajectory.csv", "trajectory",
                                 [&](std::ostream& o) { write_trajectory_csv(o, result.log); }));
  }
  if (s.outputs.markers_csv) {
    r.files.push_back(write_file(dir / "markers.csv", "markers",
                                 [&](std::ostream& o) { write_marker_csv(o, t, result.markers, result.verdicts); }));
  }
  if (s.outputs.events_jsonl) {
    r.files.push_back(write_file(dir / "events.jsonl", "behaviors",
                                 [&](std::ostream& o) { write_events_jsonl(o, result.verdicts); }));
  }
  if (s.outputs.emergence_json) {
    r.files.push_back(write_file(dir / "emergence.json", "emergence",
                                 [&](std::ostream& o) { o << to_json(result.emergence).dump(2) << '\n'; }));
  }
  if (s.outputs.gate_json) {
    r.files.push_back(write_file(dir / "gate.json", "swarm-gate",
                                 [&](std::ostream& o) { o << to_json(result.gate).dump(2) << '\n'; }));
  }
  if (s.outputs.plot_data) {
    r.files.push_back(write_file(dir / "plot_data.csv", "plot-data",
                                 [&](std::ostream& o) { write_plot_data(o, t, result.markers, result.verdicts); }));
  }

  for (const auto& v : result.verdicts) {
    r.behavior_ids.push_back(v.behavior_id);
    r.onsets.push_back(result.first_onset(v.behavior_id));
  }
  r.final_behaviors = result.final_behaviors();
  r.type_label = result.emergence.type_label;
  r.is_swarm = result.gate.is_swarm;

  const fs::path report = dir / "report.json";
  write_file(report, "report", [&](std::ostream& o) { o << to_json(r).dump(2) << '\n'; });
  r.files.push_back(report);
  return r;
}

RunReport run_scenario(const Scenario& s) {
  s.validate();
  const RunResult result = execute_scenario(s);
  return write_run(s, result, s.outputs.directory);
}

// ---------------------------------------------------------------------------

SweepReport sweep(const Scenario& s, std::span<const std::uint64_t> seeds, const SweepOptions& options) {
  s.validate();
  if (!s.initial.is_random()) throw ValidationError("sweep requires a random_box initial condition");

  SweepReport report;
  for (const auto& b : s.behaviors) report.behavior_ids.push_back(b.id);
  report.rows.resize(seeds.size());

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(seeds.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        Scenario run = s;
        run.engine.seed = seeds[i];
        const RunResult result = execute_scenario(run);
        SweepRow row;
        row.seed = seeds[i];
        for (const auto& id : report.behavior_ids) row.onsets.push_back(result.first_onset(id));
        row.final_behaviors = result.final_behaviors();
        if (options.write_runs) {
          write_run(run, result, s.outputs.directory / ("seed-" + std::to_string(seeds[i])));
        }
        report.rows[i] = std::move(row);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  unsigned jobs = options.jobs ? options.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(seeds.size(), 1)));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < jobs; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  report.convergence_fraction.assign(report.behavior_ids.size(), 0.0);
  if (!report.rows.empty()) {
    for (std::size_t b = 0; b < report.behavior_ids.size(); ++b) {
      std::size_t hits = 0;
      for (const auto& row : report.rows) hits += row.onsets[b].has_value() ? 1 : 0;
      report.convergence_fraction[b] = static_cast<double>(hits) / static_cast<double>(report.rows.size());
    }
  }

  if (options.write_report) {
    std::error_code ec;
    fs::create_directories(s.outputs.directory, ec);
    if (ec) throw StageError("sweep", "cannot create directory '" + s.outputs.directory.string() + "'");
    write_file(s.outputs.directory / "sweep.json", "sweep",
               [&](std::ostream& o) { o << to_json(report).dump(2) << '\n'; });
    write_file(s.outputs.directory / "sweep.csv", "sweep", [&](std::ostream& o) {
      o << "seed";
      for (const auto& id : report.behavior_ids) o << ",onset_" << id;
      for (const auto& id : report.behavior_ids) o << ",final_" << id;
      o << '\n';
      for (const auto& row : report.rows) {
        o << row.seed;
        for (const auto& on : row.onsets) o << ',' << (on ? format_number(*on) : std::string());
        for (bool f : row.final_behaviors) o << ',' << (f ? 1 : 0);
        o << '\n';
      }
    });
  }
  return report;
}

json to_json(const SweepReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json onsets = json::object();
    json finals = json::object();
    for (std::size_t b = 0; b < r.behavior_ids.size(); ++b) {
      onsets[r.behavior_ids[b]] = row.onsets[b] ? json(*row.onsets[b]) : json(nullptr);
      finals[r.behavior_ids[b]] = row.final_behaviors[b] ? 1 : 0;
    }
    rows.push_back({{"seed", row.seed}, {"onset_t", onsets}, {"final_behaviors", finals}});
  }
  json fractions = json::object();
  for (std::size_t b = 0; b < r.behavior_ids.size(); ++b) fractions[r.behavior_ids[b]] = r.convergence_fraction[b];
  return {{"runs", rows}, {"convergence_fraction", fractions}};
}

}  // namespace swarmlab
