#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace swarmlab {

/// Raised for malformed inputs: bad configs, scenario files, CSV/JSON documents.
/// The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  Vec2& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
  friend Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend bool operator==(const Vec2&, const Vec2&) = default;

  double norm() const { return std::hypot(x, y); }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

/// Counter-clockwise rotation of v by angle (radians).
inline Vec2 rotate(const Vec2& v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);

/// Externally observable state of one agent. Heading is only logged by
/// engines that carry one; analytics never reads it.
struct AgentState {
  Vec2 position;
  std::optional<double> heading;
  double body_radius = 0.0;

  /// Throws ValidationError on non-finite position, out-of-range heading or
  /// negative radius.
  void validate() const;

  friend bool operator==(const AgentState&, const AgentState&) = default;
};

using Frame = std::vector<AgentState>;

/// Time-indexed record of every agent's observable state.
///
/// All frames share the same agent count and ordering; timestamps are
/// strictly increasing. A positive nominal dt marks the log as fixed-step,
/// in which case every increment must match dt to 1e-9. dt == 0 marks a
/// variable-step log (e.g. one read back from a CSV with irregular times).
class TrajectoryLog {
 public:
  TrajectoryLog(std::vector<double> timestamps, std::vector<Frame> frames, double dt);

  const std::vector<double>& timestamps() const { return timestamps_; }
  const std::vector<Frame>& frames() const { return frames_; }
  double dt() const { return dt_; }
  std::size_t frame_count() const { return frames_.size(); }
  std::size_t agent_count() const { return frames_.front().size(); }

  /// Positions of one frame, in agent order.
  std::vector<Vec2> positions(std::size_t frame) const;

  friend bool operator==(const TrajectoryLog&, const TrajectoryLog&) = default;

 private:
  std::vector<double> timestamps_;
  std::vector<Frame> frames_;
  double dt_ = 0.0;
};

inline constexpr double kFixedStepTolerance = 1e-9;

/// Per-frame velocity estimates from positions only. Second-order central
/// differences in the interior, second-order one-sided differences at the
/// ends (first-order when the log has exactly two frames). Uses the actual
/// timestamps, so irregular grids are handled.
std::vector<std::vector<Vec2>> finite_difference_velocities(const TrajectoryLog& log);

// ---------------------------------------------------------------------------
// Observer context

enum class Coupling { rigid_single_body, none_feedforward, local_feedback, global_information };

std::string to_string(Coupling c);
Coupling coupling_from_string(const std::string& s);

/// Engine identifiers a context may name, plus "external".
const std::vector<std::string>& registered_dynamics_families();

/// What the observer declares it knows about the system. Scope and
/// resolution are free-text labels; latent state and disturbances only
/// appear as flags and parameters.
///
/// Per-agent parameters, when declared, use dynamics_params keys of the form
/// "agent.<index>.<name>".
struct ContextDescriptor {
  int n_components = 1;
  std::string scope_label;
  std::string resolution_label;
  Coupling coupling = Coupling::none_feedforward;
  bool has_control_input = false;
  bool uses_latent_state = false;
  bool group_goal_aware = false;
  bool leader_present = false;
  bool time_varying_context = false;
  std::string dynamics_family = "external";
  std::map<std::string, double> dynamics_params;

  /// Throws ValidationError if n_components < 1 or the family is unknown.
  void validate() const;

  /// Component count after resolution correction: a rigid single body is one
  /// component regardless of how many parts are visible.
  int effective_components() const {
    return coupling == Coupling::rigid_single_body ? 1 : n_components;
  }

  friend bool operator==(const ContextDescriptor&, const ContextDescriptor&) = default;
};

/// Parses and validates; n_components is normalized to 1 for rigid bodies.
ContextDescriptor context_from_json(const nlohmann::json& j);
nlohmann::json context_to_json(const ContextDescriptor& ctx);
ContextDescriptor load_context(const std::string& path);

// ---------------------------------------------------------------------------
// CSV formats

/// Shortest text that parses back to the same double; "nan" for NaN.
std::string format_number(double v);

/// Header: t,agent_id,x,y,heading,body_radius (heading blank when absent).
void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log);
TrajectoryLog read_trajectory_csv(std::istream& in);

}  // namespace swarmlab
