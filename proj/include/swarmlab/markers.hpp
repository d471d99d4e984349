#pragma once

#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swarmlab/core.hpp"

namespace swarmlab {

/// Convex hull vertices in counter-clockwise order (Andrew's monotone chain).
/// Collinear boundary points are dropped. Fewer than three points, or a
/// collinear set, yields the extreme points only.
std::vector<Vec2> convex_hull(std::span<const Vec2> points);

/// Shoelace area of the convex hull; 0 for <= 2 points or collinear sets.
double convex_hull_area(std::span<const Vec2> points);

struct NearestNeighborStats {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

/// Relative spread below which nearest-neighbor distances count as equal
/// (a few ulps of the mean).
inline constexpr double kSpacingResolution = 8.0 * std::numeric_limits<double>::epsilon();

/// Mean and population std of each point's distance to its nearest other
/// point. Deviations within kSpacingResolution of the mean contribute zero.
/// Throws ValidationError for fewer than two points.
NearestNeighborStats nearest_neighbor_stats(std::span<const Vec2> points);

enum class MarkerId { Y1, Y2x, Y2y, Y3, Y4, Y5, Y6, Y7 };

std::string to_string(MarkerId id);
MarkerId marker_from_string(const std::string& name);

/// Which exponent sign to use for separation uniformity. `verbatim` is
/// 1 - exp(Y6/Y5) (<= 0); `negated_exponent` is 1 - exp(-Y6/Y5) (>= 0).
enum class SeparationFormula { verbatim, negated_exponent };

struct MarkerOptions {
  SeparationFormula separation = SeparationFormula::verbatim;
};

/// Markers for one frame. Undefined markers are empty optionals, never zeros.
struct MarkerVector {
  double y1_avg_speed = 0.0;
  Vec2 y2_center_of_mass;
  std::optional<double> y3_circliness;
  std::optional<double> y4_compactness;
  std::optional<double> y5_mean_nn_dist;
  std::optional<double> y6_std_nn_dist;
  std::optional<double> y7_separation_uniformity;

  std::optional<double> get(MarkerId id) const;
};

inline constexpr double kCentroidDegeneracy = 1e-9;
inline constexpr double kHullDegeneracy = 1e-12;

/// Positions and body radii come from `frame`; speeds from `velocities`
/// (aligned with the frame).
MarkerVector compute_markers(std::span<const AgentState> frame, std::span<const Vec2> velocities,
                             const MarkerOptions& options = {});

/// Markers for every frame of a log, using finite-difference velocities.
std::vector<MarkerVector> compute_marker_series(const TrajectoryLog& log, const MarkerOptions& options = {});

}  // namespace swarmlab
