#include "swarmlab/core.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace swarmlab {

double wrap_angle(double angle) {
  double a = std::remainder(angle, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

void AgentState::validate() const {
  if (!std::isfinite(position.x) || !std::isfinite(position.y)) {
    throw ValidationError("agent position must be finite");
  }
  if (heading) {
    if (!std::isfinite(*heading) || *heading <= -std::numbers::pi || *heading > std::numbers::pi) {
      throw ValidationError("agent heading must lie in (-pi, pi]");
    }
  }
  if (!(body_radius >= 0.0) || !std::isfinite(body_radius)) {
    throw ValidationError("agent body_radius must be non-negative");
  }
}

TrajectoryLog::TrajectoryLog(std::vector<double> timestamps, std::vector<Frame> frames, double dt)
    : timestamps_(std::move(timestamps)), frames_(std::move(frames)), dt_(dt) {
  if (frames_.empty()) throw ValidationError("trajectory log has no frames");
  if (timestamps_.size() != frames_.size()) {
    throw ValidationError("trajectory log: timestamp count differs from frame count");
  }
  if (!(dt_ >= 0.0)) throw ValidationError("trajectory log: dt must be non-negative");
  const std::size_t n = frames_.front().size();
  if (n == 0) throw ValidationError("trajectory log: frames must contain at least one agent");
  for (std::size_t k = 0; k < frames_.size(); ++k) {
    if (frames_[k].size() != n) {
      throw ValidationError("trajectory log: inconsistent agent count at frame " + std::to_string(k));
    }
    for (const auto& a : frames_[k]) a.validate();
    if (!std::isfinite(timestamps_[k])) throw ValidationError("trajectory log: non-finite timestamp");
    if (k > 0) {
      const double step = timestamps_[k] - timestamps_[k - 1];
      if (!(step > 0.0)) throw ValidationError("trajectory log: timestamps must be strictly increasing");
      if (dt_ > 0.0 && std::abs(step - dt_) > kFixedStepTolerance) {
        throw ValidationError("trajectory log: step at frame " + std::to_string(k) +
                              " deviates from nominal dt");
      }
    }
  }
}

std::vector<Vec2> TrajectoryLog::positions(std::size_t frame) const {
  const auto& f = frames_.at(frame);
  std::vector<Vec2> out;
  out.reserve(f.size());
  for (const auto& a : f) out.push_back(a.position);
  return out;
}

std::vector<std::vector<Vec2>> finite_difference_velocities(const TrajectoryLog& log) {
  const std::size_t frames = log.frame_count();
  if (frames < 2) throw ValidationError("insufficient frames for kinematics");
  const std::size_t n = log.agent_count();
  const auto& t = log.timestamps();
  const auto& f = log.frames();

  std::vector<std::vector<Vec2>> vel(frames, std::vector<Vec2>(n));

  if (frames == 2) {
    const double h = t[1] - t[0];
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 v = (f[1][i].position - f[0][i].position) * (1.0 / h);
      vel[0][i] = v;
      vel[1][i] = v;
    }
    return vel;
  }

  // Difference form keeps constant signals at exactly zero.
  for (std::size_t k = 1; k + 1 < frames; ++k) {
    const double h1 = t[k] - t[k - 1];
    const double h2 = t[k + 1] - t[k];
    const double a = h1 / (h2 * (h1 + h2));
    const double b = h2 / (h1 * (h1 + h2));
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 fwd = f[k + 1][i].position - f[k][i].position;
      const Vec2 bwd = f[k][i].position - f[k - 1][i].position;
      vel[k][i] = a * fwd + b * bwd;
    }
  }

  auto one_sided = [&](std::size_t k0, std::size_t k1, std::size_t k2) {
    const double h1 = t[k1] - t[k0];
    const double h2 = t[k2] - t[k1];
    // Signed steps so the same formula serves both ends.
    const double a = (h1 + h2) / (h1 * h2);
    const double b = h1 / (h2 * (h1 + h2));
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 d1 = f[k1][i].position - f[k0][i].position;
      const Vec2 d2 = f[k2][i].position - f[k0][i].position;
      vel[k0][i] = a * d1 - b * d2;
    }
  };
  one_sided(0, 1, 2);
  one_sided(frames - 1, frames - 2, frames - 3);
  return vel;
}

// ---------------------------------------------------------------------------

std::string to_string(Coupling c) {
  switch (c) {
    case Coupling::rigid_single_body:
      return "rigid_single_body";
    case Coupling::none_feedforward:
      return "none_feedforward";
    case Coupling::local_feedback:
      return "local_feedback";
    case Coupling::global_information:
      return "global_information";
  }
  return "unknown";
}

Coupling coupling_from_string(const std::string& s) {
  if (s == "rigid_single_body") return Coupling::rigid_single_body;
  if (s == "none_feedforward") return Coupling::none_feedforward;
  if (s == "local_feedback") return Coupling::local_feedback;
  if (s == "global_information") return Coupling::global_information;
  throw ValidationError("unknown coupling '" + s + "'");
}

const std::vector<std::string>& registered_dynamics_families() {
  static const std::vector<std::string> families = {
      "rigid_rotation", "feedforward_field", "dubins_binary_sensor", "distributed_formation", "external"};
  return families;
}

void ContextDescriptor::validate() const {
  if (n_components < 1) throw ValidationError("context: n_components must be a positive integer");
  const auto& fam = registered_dynamics_families();
  if (std::find(fam.begin(), fam.end(), dynamics_family) == fam.end()) {
    throw ValidationError("context: unknown dynamics_family '" + dynamics_family + "'");
  }
  for (const auto& [key, value] : dynamics_params) {
    if (!std::isfinite(value)) throw ValidationError("context: dynamics_params['" + key + "'] is not finite");
  }
}

namespace {

template <typename T>
T required(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace

ContextDescriptor context_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("context must be a JSON object");
  static const std::vector<std::string> known = {
      "n_components",   "scope_label",       "resolution_label", "coupling",
      "has_control_input", "uses_latent_state", "group_goal_aware", "leader_present",
      "time_varying_context", "dynamics_family", "dynamics_params"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ValidationError("context: unknown field '" + key + "'");
    }
  }
  ContextDescriptor ctx;
  ctx.n_components = required<int>(j, "n_components");
  ctx.scope_label = j.value("scope_label", std::string{});
  ctx.resolution_label = j.value("resolution_label", std::string{});
  ctx.coupling = coupling_from_string(required<std::string>(j, "coupling"));
  ctx.has_control_input = required<bool>(j, "has_control_input");
  ctx.uses_latent_state = j.value("uses_latent_state", false);
  ctx.group_goal_aware = required<bool>(j, "group_goal_aware");
  ctx.leader_present = required<bool>(j, "leader_present");
  ctx.time_varying_context = j.value("time_varying_context", false);
  ctx.dynamics_family = required<std::string>(j, "dynamics_family");
  if (j.contains("dynamics_params")) {
    ctx.dynamics_params = required<std::map<std::string, double>>(j, "dynamics_params");
  }
  ctx.validate();
  if (ctx.coupling == Coupling::rigid_single_body) ctx.n_components = 1;
  return ctx;
}

nlohmann::json context_to_json(const ContextDescriptor& ctx) {
  nlohmann::json j;
  j["n_components"] = ctx.effective_components();
  j["scope_label"] = ctx.scope_label;
  j["resolution_label"] = ctx.resolution_label;
  j["coupling"] = to_string(ctx.coupling);
  j["has_control_input"] = ctx.has_control_input;
  j["uses_latent_state"] = ctx.uses_latent_state;
  j["group_goal_aware"] = ctx.group_goal_aware;
  j["leader_present"] = ctx.leader_present;
  j["time_varying_context"] = ctx.time_varying_context;
  j["dynamics_family"] = ctx.dynamics_family;
  j["dynamics_params"] = ctx.dynamics_params;
  return j;
}

ContextDescriptor load_context(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open context file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("context file '" + path + "': " + e.what());
  }
  return context_from_json(j);
}

// ---------------------------------------------------------------------------

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, end);
}

void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log) {
  out << "t,agent_id,x,y,heading,body_radius\n";
  const auto& t = log.timestamps();
  const auto& frames = log.frames();
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const std::string ts = format_number(t[k]);
    for (std::size_t i = 0; i < frames[k].size(); ++i) {
      const auto& a = frames[k][i];
      out << ts << ',' << i << ',' << format_number(a.position.x) << ',' << format_number(a.position.y) << ',';
      if (a.heading) out << format_number(*a.heading);
      out << ',' << format_number(a.body_radius) << '\n';
    }
  }
}

namespace {

double parse_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ValidationError("trajectory csv line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return cells;
}

}  // namespace

TrajectoryLog read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("trajectory csv is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,agent_id,x,y,heading,body_radius") {
    throw ValidationError("trajectory csv: unexpected header '" + line + "'");
  }

  std::vector<double> timestamps;
  std::vector<Frame> frames;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 6) {
      throw ValidationError("trajectory csv line " + std::to_string(line_no) + ": expected 6 columns");
    }
    const double t = parse_double(cells[0], line_no);
    const auto id = static_cast<std::size_t>(parse_double(cells[1], line_no));
    if (frames.empty() || t != timestamps.back()) {
      timestamps.push_back(t);
      frames.emplace_back();
    }
    if (id != frames.back().size()) {
      throw ValidationError("trajectory csv line " + std::to_string(line_no) + ": agent ids must be 0..N-1 in order");
    }
    AgentState a;
    a.position = {parse_double(cells[2], line_no), parse_double(cells[3], line_no)};
    if (!cells[4].empty()) a.heading = parse_double(cells[4], line_no);
    a.body_radius = parse_double(cells[5], line_no);
    frames.back().push_back(a);
  }
  if (frames.empty()) throw ValidationError("trajectory csv has no rows");

  // Recover the nominal step; fall back to a variable-step log.
  double dt = 0.0;
  if (timestamps.size() >= 2) {
    const double guess = timestamps[1] - timestamps[0];
    bool fixed = guess > 0.0;
    for (std::size_t k = 1; fixed && k < timestamps.size(); ++k) {
      fixed = std::abs(timestamps[k] - timestamps[k - 1] - guess) <= kFixedStepTolerance;
    }
    if (fixed) dt = guess;
  }
  return TrajectoryLog(std::move(timestamps), std::move(frames), dt);
}

}  // namespace swarmlab
