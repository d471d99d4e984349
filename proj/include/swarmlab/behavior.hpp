#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "swarmlab/markers.hpp"

namespace swarmlab {

enum class Relation { less, less_equal, greater, greater_equal, within_tol_of };

std::string to_string(Relation r);
Relation relation_from_string(const std::string& s);

/// One face of a structure set: `marker relation threshold`. For
/// within_tol_of the test is |marker - threshold| <= tolerance; the other
/// relations ignore tolerance.
struct MarkerConstraint {
  std::string marker;
  Relation relation = Relation::less_equal;
  double threshold = 0.0;
  double tolerance = 0.0;

  bool holds(double value) const;
};

inline constexpr double kDefaultStructureTolerance = 1e-3;
inline constexpr int kDefaultDebounceFrames = 10;

/// A group behavior: conjunction of marker constraints, plus the number of
/// consecutive agreeing frames required before an onset/offset is reported.
struct BehaviorSpec {
  std::string id;
  std::vector<MarkerConstraint> predicate;
  int debounce_frames = kDefaultDebounceFrames;

  /// Throws ValidationError on unknown markers, negative tolerances or a
  /// negative debounce.
  void validate() const;
};

BehaviorSpec milling_spec(double circliness_tol = kDefaultStructureTolerance);
BehaviorSpec aggregation_spec(double compactness_tol = kDefaultStructureTolerance);
BehaviorSpec diffusing_spec(double uniformity_tol = kDefaultStructureTolerance);
/// milling, aggregation, diffusing, in that order.
std::vector<BehaviorSpec> default_behaviors();

BehaviorSpec behavior_from_json(const nlohmann::json& j);
nlohmann::json behavior_to_json(const BehaviorSpec& spec);
/// Accepts a JSON array of specs or an object with a "behaviors" array
/// (so a scenario file works too).
std::vector<BehaviorSpec> behaviors_from_json(const nlohmann::json& j);

struct BehaviorEvent {
  std::string behavior;
  double onset_t = 0.0;
  std::optional<double> offset_t;  // empty while still active

  friend bool operator==(const BehaviorEvent&, const BehaviorEvent&) = default;
};

struct BehaviorVerdict {
  std::string behavior_id;
  std::vector<bool> series;  // raw, before debouncing
  std::vector<BehaviorEvent> events;

  bool has_true_interval() const { return !events.empty(); }
};

/// Frame-wise predicate evaluation plus debounced events. A frame where any
/// referenced marker is undefined evaluates false. A state flip is recorded
/// once `debounce_frames` consecutive frames agree with the new state
/// (0 and 1 both mean "record every transition"); the event time is the
/// first frame of the agreeing run.
BehaviorVerdict evaluate_behavior(const BehaviorSpec& spec, std::span<const MarkerVector> markers,
                                  std::span<const double> timestamps);

/// Bit vector per frame, one column per spec in the given order.
using BehaviorMatrix = std::vector<std::vector<bool>>;

BehaviorMatrix behavior_matrix(std::span<const BehaviorSpec> specs, std::span<const MarkerVector> markers,
                               std::span<const double> timestamps);

/// Column layout of a matrix built from per-spec verdicts.
BehaviorMatrix to_matrix(std::span<const BehaviorVerdict> verdicts, std::size_t frames);

nlohmann::json event_to_json(const BehaviorEvent& e);
BehaviorEvent event_from_json(const nlohmann::json& j);

/// JSONL: one {"behavior","onset_t","offset_t"} object per line.
void write_events_jsonl(std::ostream& out, std::span<const BehaviorVerdict> verdicts);
std::vector<BehaviorEvent> read_events_jsonl(std::istream& in);

/// Groups loose events back into verdicts (series left empty).
std::vector<BehaviorVerdict> verdicts_from_events(std::span<const BehaviorEvent> events);

/// Marker CSV: t,Y1,Y2x,Y2y,Y3,Y4,Y5,Y6,Y7 then one 0/1 column per verdict.
void write_marker_csv(std::ostream& out, std::span<const double> timestamps, std::span<const MarkerVector> markers,
                      std::span<const BehaviorVerdict> verdicts);

/// Long-format t,series,value for external plotting.
void write_plot_data(std::ostream& out, std::span<const double> timestamps, std::span<const MarkerVector> markers,
                     std::span<const BehaviorVerdict> verdicts);

}  // namespace swarmlab
