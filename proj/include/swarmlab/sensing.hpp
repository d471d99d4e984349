#pragma once

#include <span>

#include "swarmlab/core.hpp"

namespace swarmlab {

/// Conical field of view in front of an agent: closed sector of radius
/// `range` and total opening 2 * half_angle about the heading.
struct FovSpec {
  double range = 0.0;
  double half_angle = 0.0;

  static FovSpec from_opening(double range, double opening_angle) { return {range, 0.5 * opening_angle}; }

  void validate() const;
};

/// True when `target` lies in the closed FOV of `self` (center-point test).
/// Coincident points are never detected.
bool in_field_of_view(const AgentState& self, const Vec2& target, const FovSpec& fov);

/// Binary existence sensor: 1 iff any of `others` is inside the FOV of `self`.
/// Occlusion is ignored. `self` must carry a heading and must not be part of
/// `others`.
bool binary_sensor(const AgentState& self, std::span<const AgentState> others, const FovSpec& fov);

/// Same test over a whole frame, skipping the agent at `self_index`.
bool binary_sensor(std::span<const AgentState> frame, std::size_t self_index, const FovSpec& fov);

/// Memoryless bang-bang steering: +omega_max on detection, -omega_max otherwise.
double bang_bang_controller(bool detected, double omega_max);

}  // namespace swarmlab
