#include "swarmlab/sensing.hpp"

#include <numbers>

namespace swarmlab {

void FovSpec::validate() const {
  if (!(range > 0.0) || !std::isfinite(range)) throw ValidationError("fov range must be positive");
  if (!(half_angle > 0.0) || half_angle > std::numbers::pi) {
    throw ValidationError("fov half angle must lie in (0, pi]");
  }
}

bool in_field_of_view(const AgentState& self, const Vec2& target, const FovSpec& fov) {
  if (!self.heading) throw ValidationError("binary sensor requires a heading");
  const Vec2 d = target - self.position;
  const double dist = d.norm();
  if (!(dist > 0.0) || dist > fov.range) return false;
  const double bearing = wrap_angle(std::atan2(d.y, d.x) - *self.heading);
  return std::abs(bearing) <= fov.half_angle;
}

bool binary_sensor(const AgentState& self, std::span<const AgentState> others, const FovSpec& fov) {
  if (!self.heading) throw ValidationError("binary sensor requires a heading");
  for (const auto& o : others) {
    if (in_field_of_view(self, o.position, fov)) return true;
  }
  return false;
}

bool binary_sensor(std::span<const AgentState> frame, std::size_t self_index, const FovSpec& fov) {
  const auto& self = frame[self_index];
  for (std::size_t j = 0; j < frame.size(); ++j) {
    if (j != self_index && in_field_of_view(self, frame[j].position, fov)) return true;
  }
  return false;
}

double bang_bang_controller(bool detected, double omega_max) {
  if (!(omega_max > 0.0)) throw ValidationError("omega_max must be positive");
  return detected ? omega_max : -omega_max;
}

}  // namespace swarmlab
