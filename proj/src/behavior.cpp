#include "swarmlab/behavior.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>

namespace swarmlab {

std::string to_string(Relation r) {
  switch (r) {
    case Relation::less:
      return "<";
    case Relation::less_equal:
      return "<=";
    case Relation::greater:
      return ">";
    case Relation::greater_equal:
      return ">=";
    case Relation::within_tol_of:
      return "within_tol_of";
  }
  return "?";
}

Relation relation_from_string(const std::string& s) {
  if (s == "<") return Relation::less;
  if (s == "<=" || s == "≤") return Relation::less_equal;
  if (s == ">") return Relation::greater;
  if (s == ">=" || s == "≥") return Relation::greater_equal;
  if (s == "within_tol_of") return Relation::within_tol_of;
  throw ValidationError("unknown relation '" + s + "'");
}

bool MarkerConstraint::holds(double value) const {
  switch (relation) {
    case Relation::less:
      return value < threshold;
    case Relation::less_equal:
      return value <= threshold;
    case Relation::greater:
      return value > threshold;
    case Relation::greater_equal:
      return value >= threshold;
    case Relation::within_tol_of:
      return std::abs(value - threshold) <= tolerance;
  }
  return false;
}

void BehaviorSpec::validate() const {
  if (id.empty()) throw ValidationError("behavior spec needs an id");
  if (debounce_frames < 0) throw ValidationError("behavior '" + id + "': debounce_frames must be >= 0");
  for (const auto& c : predicate) {
    marker_from_string(c.marker);
    if (!(c.tolerance >= 0.0)) throw ValidationError("behavior '" + id + "': tolerance must be >= 0");
    if (!std::isfinite(c.threshold)) throw ValidationError("behavior '" + id + "': threshold must be finite");
  }
}

BehaviorSpec milling_spec(double circliness_tol) {
  return {"milling",
          {{"Y1", Relation::greater, 0.0, 0.0}, {"Y3", Relation::less_equal, circliness_tol, 0.0}},
          kDefaultDebounceFrames};
}

BehaviorSpec aggregation_spec(double compactness_tol) {
  return {"aggregation", {{"Y4", Relation::less_equal, compactness_tol, 0.0}}, kDefaultDebounceFrames};
}

BehaviorSpec diffusing_spec(double uniformity_tol) {
  return {"diffusing", {{"Y7", Relation::within_tol_of, 0.0, uniformity_tol}}, kDefaultDebounceFrames};
}

std::vector<BehaviorSpec> default_behaviors() { return {milling_spec(), aggregation_spec(), diffusing_spec()}; }

BehaviorSpec behavior_from_json(const nlohmann::json& j) {
  try {
    BehaviorSpec spec;
    spec.id = j.at("id").get<std::string>();
    spec.debounce_frames = j.value("debounce_frames", kDefaultDebounceFrames);
    for (const auto& c : j.at("predicate")) {
      MarkerConstraint mc;
      mc.marker = c.at("marker").get<std::string>();
      mc.relation = relation_from_string(c.at("relation").get<std::string>());
      mc.threshold = c.value("threshold", 0.0);
      mc.tolerance = c.value("tolerance", 0.0);
      spec.predicate.push_back(mc);
    }
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("behavior spec: ") + e.what());
  }
}

nlohmann::json behavior_to_json(const BehaviorSpec& spec) {
  nlohmann::json pred = nlohmann::json::array();
  for (const auto& c : spec.predicate) {
    pred.push_back({{"marker", c.marker},
                    {"relation", to_string(c.relation)},
                    {"threshold", c.threshold},
                    {"tolerance", c.tolerance}});
  }
  return {{"id", spec.id}, {"predicate", pred}, {"debounce_frames", spec.debounce_frames}};
}

std::vector<BehaviorSpec> behaviors_from_json(const nlohmann::json& j) {
  const nlohmann::json* arr = &j;
  if (j.is_object()) {
    if (!j.contains("behaviors")) throw ValidationError("behavior document has no 'behaviors' array");
    arr = &j.at("behaviors");
  }
  if (!arr->is_array()) throw ValidationError("behaviors must be a JSON array");
  std::vector<BehaviorSpec> out;
  for (const auto& item : *arr) out.push_back(behavior_from_json(item));
  return out;
}

BehaviorVerdict evaluate_behavior(const BehaviorSpec& spec, std::span<const MarkerVector> markers,
                                  std::span<const double> timestamps) {
  spec.validate();
  if (markers.empty()) throw ValidationError("behavior evaluation needs a nonempty marker series");
  if (timestamps.size() != markers.size()) throw ValidationError("behavior evaluation: timestamps not aligned");

  std::vector<std::pair<MarkerId, const MarkerConstraint*>> terms;
  for (const auto& c : spec.predicate) terms.emplace_back(marker_from_string(c.marker), &c);

  BehaviorVerdict v;
  v.behavior_id = spec.id;
  v.series.reserve(markers.size());
  for (const auto& m : markers) {
    bool ok = true;
    for (const auto& [id, c] : terms) {
      const auto value = m.get(id);
      if (!value || !c->holds(*value)) {
        ok = false;
        break;
      }
    }
    v.series.push_back(ok);
  }

  const std::size_t need = static_cast<std::size_t>(std::max(1, spec.debounce_frames));
  bool state = false;
  std::size_t run = 0;
  std::size_t run_start = 0;
  for (std::size_t k = 0; k < v.series.size(); ++k) {
    if (v.series[k] == state) {
      run = 0;
      continue;
    }
    if (run == 0) run_start = k;
    if (++run < need) continue;
    state = !state;
    run = 0;
    if (state) {
      v.events.push_back({spec.id, timestamps[run_start], std::nullopt});
    } else {
      v.events.back().offset_t = timestamps[run_start];
    }
  }
  return v;
}

BehaviorMatrix behavior_matrix(std::span<const BehaviorSpec> specs, std::span<const MarkerVector> markers,
                               std::span<const double> timestamps) {
  std::vector<BehaviorVerdict> verdicts;
  for (const auto& s : specs) verdicts.push_back(evaluate_behavior(s, markers, timestamps));
  return to_matrix(verdicts, markers.size());
}

BehaviorMatrix to_matrix(std::span<const BehaviorVerdict> verdicts, std::size_t frames) {
  BehaviorMatrix rows(frames, std::vector<bool>(verdicts.size()));
  for (std::size_t j = 0; j < verdicts.size(); ++j) {
    if (verdicts[j].series.size() != frames) throw ValidationError("behavior matrix: series length mismatch");
    for (std::size_t k = 0; k < frames; ++k) rows[k][j] = verdicts[j].series[k];
  }
  return rows;
}

nlohmann::json event_to_json(const BehaviorEvent& e) {
  nlohmann::json j;
  j["behavior"] = e.behavior;
  j["onset_t"] = e.onset_t;
  j["offset_t"] = e.offset_t ? nlohmann::json(*e.offset_t) : nlohmann::json(nullptr);
  return j;
}

BehaviorEvent event_from_json(const nlohmann::json& j) {
  try {
    BehaviorEvent e;
    e.behavior = j.at("behavior").get<std::string>();
    e.onset_t = j.at("onset_t").get<double>();
    if (j.contains("offset_t") && !j.at("offset_t").is_null()) e.offset_t = j.at("offset_t").get<double>();
    if (e.offset_t && *e.offset_t < e.onset_t) throw ValidationError("event offset precedes onset");
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("event record: ") + ex.what());
  }
}

void write_events_jsonl(std::ostream& out, std::span<const BehaviorVerdict> verdicts) {
  for (const auto& v : verdicts) {
    for (const auto& e : v.events) out << event_to_json(e).dump() << '\n';
  }
}

std::vector<BehaviorEvent> read_events_jsonl(std::istream& in) {
  std::vector<BehaviorEvent> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError("events line " + std::to_string(line_no) + ": " + e.what());
    }
    out.push_back(event_from_json(j));
  }
  return out;
}

std::vector<BehaviorVerdict> verdicts_from_events(std::span<const BehaviorEvent> events) {
  std::vector<BehaviorVerdict> out;
  std::map<std::string, std::size_t> index;
  for (const auto& e : events) {
    auto [it, fresh] = index.try_emplace(e.behavior, out.size());
    if (fresh) out.push_back({e.behavior, {}, {}});
    out[it->second].events.push_back(e);
  }
  return out;
}

namespace {

std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : "nan"; }

}  // namespace

void write_marker_csv(std::ostream& out, std::span<const double> timestamps, std::span<const MarkerVector> markers,
                      std::span<const BehaviorVerdict> verdicts) {
  out << "t,Y1,Y2x,Y2y,Y3,Y4,Y5,Y6,Y7";
  for (const auto& v : verdicts) out << ',' << v.behavior_id;
  out << '\n';
  for (std::size_t k = 0; k < markers.size(); ++k) {
    const auto& m = markers[k];
    out << format_number(timestamps[k]) << ',' << format_number(m.y1_avg_speed) << ','
        << format_number(m.y2_center_of_mass.x) << ',' << format_number(m.y2_center_of_mass.y) << ','
        << cell(m.y3_circliness) << ',' << cell(m.y4_compactness) << ',' << cell(m.y5_mean_nn_dist) << ','
        << cell(m.y6_std_nn_dist) << ',' << cell(m.y7_separation_uniformity);
    for (const auto& v : verdicts) out << ',' << (v.series.at(k) ? '1' : '0');
    out << '\n';
  }
}

void write_plot_data(std::ostream& out, std::span<const double> timestamps, std::span<const MarkerVector> markers,
                     std::span<const BehaviorVerdict> verdicts) {
  static constexpr MarkerId kSeries[] = {MarkerId::Y1, MarkerId::Y2x, MarkerId::Y2y, MarkerId::Y3,
                                         MarkerId::Y4, MarkerId::Y5,  MarkerId::Y6,  MarkerId::Y7};
  out << "t,series,value\n";
  for (std::size_t k = 0; k < markers.size(); ++k) {
    const std::string t = format_number(timestamps[k]);
    for (auto id : kSeries) out << t << ',' << to_string(id) << ',' << cell(markers[k].get(id)) << '\n';
    for (const auto& v : verdicts) out << t << ",B_" << v.behavior_id << ',' << (v.series.at(k) ? 1 : 0) << '\n';
  }
}

}  // namespace swarmlab
