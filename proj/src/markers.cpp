#include "swarmlab/markers.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

namespace swarmlab {

std::vector<Vec2> convex_hull(std::span<const Vec2> points) {
  std::vector<Vec2> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() <= 2) return pts;

  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
    hull[k++] = p;
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = pts.size() - 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double convex_hull_area(std::span<const Vec2> points) {
  const auto hull = convex_hull(points);
  if (hull.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * std::abs(twice);
}

NearestNeighborStats nearest_neighbor_stats(std::span<const Vec2> points) {
  const std::size_t n = points.size();
  if (n < 2) throw ValidationError("nearest-neighbor statistics need at least two points");
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = (points[j] - points[i]).norm();
      nearest[i] = std::min(nearest[i], d);
      nearest[j] = std::min(nearest[j], d);
    }
  }
  double sum = 0.0;
  for (double d : nearest) sum += d;
  const double mean = sum / static_cast<double>(n);
  // Deviations at rounding level of the mean are not resolvable spacing
  // differences; an exactly regular lattice then reports std = 0.
  const double floor = kSpacingResolution * mean;
  double ss = 0.0;
  for (double d : nearest) {
    const double dev = std::abs(d - mean) <= floor ? 0.0 : d - mean;
    ss += dev * dev;
  }
  return {mean, std::sqrt(ss / static_cast<double>(n))};
}

std::string to_string(MarkerId id) {
  switch (id) {
    case MarkerId::Y1:
      return "Y1";
    case MarkerId::Y2x:
      return "Y2x";
    case MarkerId::Y2y:
      return "Y2y";
    case MarkerId::Y3:
      return "Y3";
    case MarkerId::Y4:
      return "Y4";
    case MarkerId::Y5:
      return "Y5";
    case MarkerId::Y6:
      return "Y6";
    case MarkerId::Y7:
      return "Y7";
  }
  return "?";
}

MarkerId marker_from_string(const std::string& name) {
  for (auto id : {MarkerId::Y1, MarkerId::Y2x, MarkerId::Y2y, MarkerId::Y3, MarkerId::Y4, MarkerId::Y5, MarkerId::Y6,
                  MarkerId::Y7}) {
    if (to_string(id) == name) return id;
  }
  throw ValidationError("unknown marker '" + name + "'");
}

std::optional<double> MarkerVector::get(MarkerId id) const {
  switch (id) {
    case MarkerId::Y1:
      return y1_avg_speed;
    case MarkerId::Y2x:
      return y2_center_of_mass.x;
    case MarkerId::Y2y:
      return y2_center_of_mass.y;
    case MarkerId::Y3:
      return y3_circliness;
    case MarkerId::Y4:
      return y4_compactness;
    case MarkerId::Y5:
      return y5_mean_nn_dist;
    case MarkerId::Y6:
      return y6_std_nn_dist;
    case MarkerId::Y7:
      return y7_separation_uniformity;
  }
  return std::nullopt;
}

MarkerVector compute_markers(std::span<const AgentState> frame, std::span<const Vec2> velocities,
                             const MarkerOptions& options) {
  const std::size_t n = frame.size();
  if (n == 0) throw ValidationError("markers: frame is empty");
  if (velocities.size() != n) throw ValidationError("markers: velocities not aligned with frame");

  MarkerVector m;
  std::vector<Vec2> pos;
  pos.reserve(n);
  double speed_sum = 0.0;
  double body_area = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    pos.push_back(frame[i].position);
    m.y2_center_of_mass += frame[i].position;
    speed_sum += velocities[i].norm();
    body_area += std::numbers::pi * frame[i].body_radius * frame[i].body_radius;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  m.y1_avg_speed = speed_sum * inv_n;
  m.y2_center_of_mass *= inv_n;

  double dmin = std::numeric_limits<double>::infinity();
  double dmax = 0.0;
  for (const auto& p : pos) {
    const double d = (p - m.y2_center_of_mass).norm();
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  if (dmin >= kCentroidDegeneracy) m.y3_circliness = (dmax - dmin) / dmin;

  const double hull = convex_hull_area(pos);
  if (hull >= kHullDegeneracy) m.y4_compactness = std::clamp(1.0 - body_area / hull, 0.0, 1.0);

  if (n >= 2) {
    const auto nn = nearest_neighbor_stats(pos);
    m.y5_mean_nn_dist = nn.mean;
    m.y6_std_nn_dist = nn.std;
    // With coincident agents Y5 = 0 and the ratio is meaningless.
    if (nn.mean > 0.0) {
      const double ratio = nn.std / nn.mean;
      m.y7_separation_uniformity =
          options.separation == SeparationFormula::verbatim ? 1.0 - std::exp(ratio) : 1.0 - std::exp(-ratio);
    }
  }
  return m;
}

std::vector<MarkerVector> compute_marker_series(const TrajectoryLog& log, const MarkerOptions& options) {
  const auto vel = finite_difference_velocities(log);
  std::vector<MarkerVector> out;
  out.reserve(log.frame_count());
  for (std::size_t k = 0; k < log.frame_count(); ++k) {
    out.push_back(compute_markers(log.frames()[k], vel[k], options));
  }
  return out;
}

}  // namespace swarmlab
