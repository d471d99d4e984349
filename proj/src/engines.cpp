#include "swarmlab/engines.hpp"

#include <algorithm>
#include <numbers>
#include <numeric>

#include "swarmlab/rng.hpp"
#include "swarmlab/sensing.hpp"

namespace swarmlab {

std::string to_string(EngineFamily f) {
  switch (f) {
    case EngineFamily::rigid_rotation:
      return "rigid_rotation";
    case EngineFamily::feedforward_field:
      return "feedforward_field";
    case EngineFamily::dubins_binary_sensor:
      return "dubins_binary_sensor";
    case EngineFamily::distributed_formation:
      return "distributed_formation";
  }
  return "unknown";
}

EngineFamily engine_family_from_string(const std::string& s) {
  if (s == "rigid_rotation") return EngineFamily::rigid_rotation;
  if (s == "feedforward_field") return EngineFamily::feedforward_field;
  if (s == "dubins_binary_sensor") return EngineFamily::dubins_binary_sensor;
  if (s == "distributed_formation") return EngineFamily::distributed_formation;
  throw ValidationError("unknown engine family '" + s + "'");
}

void EngineConfig::validate() const {
  if (n_agents < 1) throw ValidationError("engine: n_agents must be >= 1");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("engine: dt must be positive");
  if (!std::isfinite(duration) || duration < dt) throw ValidationError("engine: duration must be >= dt");
  if (log_every < 1) throw ValidationError("engine: log_every must be >= 1");
  for (const auto& [key, value] : params) {
    if (!std::isfinite(value)) throw ValidationError("engine: parameter '" + key + "' is not finite");
  }
}

double EngineConfig::param(const std::string& name, double fallback) const {
  const auto it = params.find(name);
  return it == params.end() ? fallback : it->second;
}

double EngineConfig::require(const std::string& name) const {
  const auto it = params.find(name);
  if (it == params.end()) throw ValidationError("engine: missing parameter '" + name + "'");
  return it->second;
}

Vec2 EngineConfig::vec_param(const std::string& name, Vec2 fallback) const {
  return {param(name + ".x", fallback.x), param(name + ".y", fallback.y)};
}

Vec2 EngineConfig::require_vec(const std::string& name) const {
  return {require(name + ".x"), require(name + ".y")};
}

std::int64_t EngineConfig::step_count() const {
  return static_cast<std::int64_t>(std::floor(duration / dt + 1e-9));
}

Frame random_initial(int n_agents, const RandomBox& box, std::uint64_t seed) {
  if (n_agents < 1) throw ValidationError("random initial: n_agents must be >= 1");
  if (!(box.max.x > box.min.x) || !(box.max.y > box.min.y)) {
    throw ValidationError("random initial: box max must exceed min");
  }
  SplitMix64 rng(seed);
  Frame out(static_cast<std::size_t>(n_agents));
  for (auto& a : out) {
    a.position.x = rng.uniform(box.min.x, box.max.x);
    a.position.y = rng.uniform(box.min.y, box.max.y);
    // pi - 2pi*[0,1) covers (-pi, pi].
    const double h = std::numbers::pi - 2.0 * std::numbers::pi * rng.uniform();
    if (box.with_heading) a.heading = h;
    a.body_radius = box.body_radius;
  }
  return out;
}

Frame ring_initial(int n_agents, double radius, Vec2 center, double body_radius) {
  Frame out;
  for (int i = 1; i <= n_agents; ++i) {
    const double angle = 2.0 * std::numbers::pi * i / n_agents;
    AgentState a;
    a.position = center + Vec2{radius * std::cos(angle), radius * std::sin(angle)};
    a.heading = wrap_angle(angle + 0.5 * std::numbers::pi);
    a.body_radius = body_radius;
    out.push_back(a);
  }
  return out;
}

namespace {

void check_initial(const EngineConfig& cfg, std::span<const AgentState> initial) {
  cfg.validate();
  if (initial.empty()) throw ValidationError("engine: initial state list is empty");
  if (static_cast<int>(initial.size()) != cfg.n_agents) {
    throw ValidationError("engine: initial agent count does not match n_agents");
  }
  for (const auto& a : initial) a.validate();
}

/// Step schedule: `full` steps of dt, then one partial step so the run ends
/// exactly at `duration`.
struct Schedule {
  std::int64_t full = 0;
  double partial = 0.0;

  explicit Schedule(const EngineConfig& cfg) : full(cfg.step_count()) {
    const double rest = cfg.duration - static_cast<double>(full) * cfg.dt;
    if (rest > 1e-9 * cfg.dt) partial = rest;
  }
  std::int64_t total() const { return full + (partial > 0.0 ? 1 : 0); }
};

/// Collects frames at logged steps and builds the final log.
class Recorder {
 public:
  Recorder(const EngineConfig& cfg, const Schedule& sched) : cfg_(cfg), sched_(sched) {
    const auto expected = static_cast<std::size_t>(sched.total() / cfg.log_every + 2);
    times_.reserve(expected);
    frames_.reserve(expected);
  }

  /// Offer the state after `step` completed steps.
  void offer(std::int64_t step, const Frame& frame) {
    const bool last = step == sched_.total();
    if (step % cfg_.log_every != 0 && !last) return;
    const double t = (step <= sched_.full) ? static_cast<double>(step) * cfg_.dt : cfg_.duration;
    times_.push_back(t);
    frames_.push_back(frame);
  }

  TrajectoryLog finish() {
    const bool uniform = sched_.partial == 0.0 && sched_.full % cfg_.log_every == 0;
    const double dt = uniform ? cfg_.dt * cfg_.log_every : 0.0;
    return TrajectoryLog(std::move(times_), std::move(frames_), dt);
  }

 private:
  const EngineConfig& cfg_;
  const Schedule& sched_;
  std::vector<double> times_;
  std::vector<Frame> frames_;
};

double step_length(const EngineConfig& cfg, const Schedule& sched, std::int64_t k) {
  return k < sched.full ? cfg.dt : sched.partial;
}

}  // namespace

TrajectoryLog simulate_rigid_rotation(const EngineConfig& cfg, std::span<const AgentState> initial) {
  check_initial(cfg, initial);
  const double omega = cfg.require("angular_speed");
  const Vec2 pivot = cfg.require_vec("pivot");
  const Schedule sched(cfg);
  Recorder rec(cfg, sched);

  Frame frame(initial.begin(), initial.end());
  rec.offer(0, frame);
  for (std::int64_t step = 1; step <= sched.total(); ++step) {
    const double t = step <= sched.full ? static_cast<double>(step) * cfg.dt : cfg.duration;
    if (step % cfg.log_every != 0 && step != sched.total()) continue;
    const double angle = omega * t;
    for (std::size_t i = 0; i < frame.size(); ++i) {
      frame[i].position = pivot + rotate(initial[i].position - pivot, angle);
      if (initial[i].heading) frame[i].heading = wrap_angle(*initial[i].heading + angle);
    }
    rec.offer(step, frame);
  }
  return rec.finish();
}

TrajectoryLog simulate_feedforward_field(const EngineConfig& cfg, std::span<const AgentState> initial) {
  check_initial(cfg, initial);
  const Schedule sched(cfg);
  Recorder rec(cfg, sched);

  Frame frame(initial.begin(), initial.end());
  for (auto& a : frame) a.heading.reset();
  rec.offer(0, frame);

  auto field = [](const Vec2& p) { return Vec2{-p.y, p.x}; };
  for (std::int64_t k = 0; k < sched.total(); ++k) {
    const double h = step_length(cfg, sched, k);
    for (auto& a : frame) {
      const Vec2 p = a.position;
      const Vec2 k1 = field(p);
      const Vec2 k2 = field(p + 0.5 * h * k1);
      const Vec2 k3 = field(p + 0.5 * h * k2);
      const Vec2 k4 = field(p + h * k3);
      a.position = p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    rec.offer(k + 1, frame);
  }
  return rec.finish();
}

TrajectoryLog simulate_dubins_swarm(const EngineConfig& cfg, std::span<const AgentState> initial) {
  check_initial(cfg, initial);
  for (const auto& a : initial) {
    if (!a.heading) throw ValidationError("dubins engine requires headings");
  }
  const double speed = cfg.param("speed", DubinsDefaults::speed);
  const double omega_max = cfg.param("omega_max", DubinsDefaults::omega_max);
  const FovSpec fov = FovSpec::from_opening(cfg.param("fov_range", DubinsDefaults::fov_range),
                                            cfg.param("fov_angle", DubinsDefaults::fov_angle));
  fov.validate();
  if (!(omega_max > 0.0)) throw ValidationError("dubins engine: omega_max must be positive");
  if (!(speed >= 0.0)) throw ValidationError("dubins engine: speed must be non-negative");

  const Schedule sched(cfg);
  Recorder rec(cfg, sched);
  Frame frame(initial.begin(), initial.end());
  rec.offer(0, frame);

  std::vector<double> turn(frame.size());
  for (std::int64_t k = 0; k < sched.total(); ++k) {
    const double h = step_length(cfg, sched, k);
    // All agents sense the same snapshot before anyone moves.
    for (std::size_t i = 0; i < frame.size(); ++i) {
      turn[i] = bang_bang_controller(binary_sensor(frame, i, fov), omega_max);
    }
    for (std::size_t i = 0; i < frame.size(); ++i) {
      auto& a = frame[i];
      const double th = *a.heading;
      const double u = turn[i];
      // RK4 with u held over the step; theta is linear in time, so the k2
      // and k3 stages coincide.
      const Vec2 k1{std::cos(th), std::sin(th)};
      const Vec2 k2{std::cos(th + 0.5 * h * u), std::sin(th + 0.5 * h * u)};
      const Vec2 k4{std::cos(th + h * u), std::sin(th + h * u)};
      a.position += (speed * h / 6.0) * (k1 + 4.0 * k2 + k4);
      a.heading = wrap_angle(th + h * u);
    }
    rec.offer(k + 1, frame);
  }
  return rec.finish();
}

namespace {

/// Counter-clockwise angular gap from each agent to the next agent around
/// `target`. Gaps sum to 2pi.
std::vector<double> ccw_gaps(const Frame& frame, const Vec2& target) {
  const std::size_t n = frame.size();
  std::vector<double> angle(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 r = frame[i].position - target;
    angle[i] = std::atan2(r.y, r.x);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return angle[a] < angle[b]; });
  std::vector<double> gap(n);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t i = order[s];
    const std::size_t next = order[(s + 1) % n];
    double g = angle[next] - angle[i];
    if (s + 1 == n) g += 2.0 * std::numbers::pi;
    gap[i] = g;
  }
  return gap;
}

}  // namespace

// Surrogate for a distributed circle-formation controller. The motion is
// p_i' = beta_i * u_i(p_i) where
//   u_i(p) = k_r (rho - |r|) r/|r| + J r/|r|,   r = p - target
// is a limit-cycle field whose attracting cycle is the circle of radius rho
// about the target, traversed counter-clockwise at unit speed, and
//   beta_i = max(0, 1 + k_s (gap_i - 2pi/N))
// speeds an agent up when the counter-clockwise gap to the next agent is
// larger than the even share. On the circle the gaps obey a ring consensus,
// so spacing becomes uniform. beta is the inter-agent term and is held over
// each step; the field is integrated with RK4.
TrajectoryLog simulate_distributed_formation(const EngineConfig& cfg, std::span<const AgentState> initial) {
  if (cfg.n_agents < 2 || initial.size() < 2) throw ValidationError("formation requires at least 2 agents");
  check_initial(cfg, initial);
  const Vec2 target = cfg.require_vec("target");
  const double rho = cfg.require("radius");
  const double k_r = cfg.require("k_r");
  const double k_s = cfg.require("k_s");
  if (!(rho > 0.0)) throw ValidationError("formation: radius must be positive");

  const Schedule sched(cfg);
  Recorder rec(cfg, sched);
  Frame frame(initial.begin(), initial.end());
  for (auto& a : frame) a.heading.reset();
  rec.offer(0, frame);

  const double share = 2.0 * std::numbers::pi / static_cast<double>(frame.size());
  auto field = [&](const Vec2& p) {
    const Vec2 r = p - target;
    const double d = r.norm();
    const Vec2 e = d > 1e-12 ? r * (1.0 / d) : Vec2{1.0, 0.0};
    const Vec2 tangent{-e.y, e.x};
    return k_r * (rho - d) * e + tangent;
  };

  for (std::int64_t k = 0; k < sched.total(); ++k) {
    const double h = step_length(cfg, sched, k);
    const auto gaps = ccw_gaps(frame, target);
    for (std::size_t i = 0; i < frame.size(); ++i) {
      const double beta = std::max(0.0, 1.0 + k_s * (gaps[i] - share));
      const Vec2 p = frame[i].position;
      const Vec2 k1 = beta * field(p);
      const Vec2 k2 = beta * field(p + 0.5 * h * k1);
      const Vec2 k3 = beta * field(p + 0.5 * h * k2);
      const Vec2 k4 = beta * field(p + h * k3);
      frame[i].position = p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    rec.offer(k + 1, frame);
  }
  return rec.finish();
}

TrajectoryLog simulate(const EngineConfig& cfg, std::span<const AgentState> initial) {
  switch (cfg.family) {
    case EngineFamily::rigid_rotation:
      return simulate_rigid_rotation(cfg, initial);
    case EngineFamily::feedforward_field:
      return simulate_feedforward_field(cfg, initial);
    case EngineFamily::dubins_binary_sensor:
      return simulate_dubins_swarm(cfg, initial);
    case EngineFamily::distributed_formation:
      return simulate_distributed_formation(cfg, initial);
  }
  throw ValidationError("unknown engine family");
}

}  // namespace swarmlab
