#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>

#include "swarmlab/core.hpp"

namespace swarmlab {

enum class EngineFamily { rigid_rotation, feedforward_field, dubins_binary_sensor, distributed_formation };

std::string to_string(EngineFamily f);
EngineFamily engine_family_from_string(const std::string& s);

/// Fixed-step engine configuration. Two-vector parameters are stored as
/// "<name>.x" / "<name>.y" entries of `params`.
struct EngineConfig {
  EngineFamily family = EngineFamily::rigid_rotation;
  int n_agents = 1;
  double dt = 0.01;
  double duration = 1.0;
  std::uint64_t seed = 0;
  /// Record every k-th integration step (step 0 is always recorded).
  int log_every = 1;
  std::map<std::string, double> params;

  void validate() const;

  double param(const std::string& name, double fallback) const;
  double require(const std::string& name) const;
  Vec2 vec_param(const std::string& name, Vec2 fallback) const;
  Vec2 require_vec(const std::string& name) const;
  void set_vec(const std::string& name, Vec2 v) {
    params[name + ".x"] = v.x;
    params[name + ".y"] = v.y;
  }

  std::int64_t step_count() const;
};

/// Shipped defaults for the Dubins binary-sensor mill.
struct DubinsDefaults {
  static constexpr double speed = 1.0;
  static constexpr double omega_max = 1.0;
  static constexpr double fov_angle = 0.7;  // full opening, radians
  static constexpr double fov_range = 8.0;
};

/// Axis-aligned box for random initial conditions.
struct RandomBox {
  Vec2 min{0.0, 0.0};
  Vec2 max{10.0, 10.0};
  double body_radius = 0.05;
  bool with_heading = true;
};

/// Positions uniform in the box, headings uniform in (-pi, pi], drawn from a
/// SplitMix64 stream keyed by `seed`.
Frame random_initial(int n_agents, const RandomBox& box, std::uint64_t seed);

/// Agents equally spaced on a circle, headings tangent (counter-clockwise).
/// Agent i (1-based) sits at angle i * 2pi / n.
Frame ring_initial(int n_agents, double radius, Vec2 center, double body_radius);

/// Closed-form rotation of every agent about `pivot` at `angular_speed`.
TrajectoryLog simulate_rigid_rotation(const EngineConfig& cfg, std::span<const AgentState> initial);

/// Independent agents in the field p' = (-p_y, p_x), integrated with RK4.
TrajectoryLog simulate_feedforward_field(const EngineConfig& cfg, std::span<const AgentState> initial);

/// Dubins vehicles steered by a binary FOV sensor and bang-bang controller.
/// Params: speed, omega_max, fov_angle (full opening), fov_range.
TrajectoryLog simulate_dubins_swarm(const EngineConfig& cfg, std::span<const AgentState> initial);

/// Surrogate distributed circle-formation controller (see engines.cpp).
/// Params: target (2-vector), radius, k_r, k_s.
TrajectoryLog simulate_distributed_formation(const EngineConfig& cfg, std::span<const AgentState> initial);

/// Dispatch on cfg.family.
TrajectoryLog simulate(const EngineConfig& cfg, std::span<const AgentState> initial);

}  // namespace swarmlab
