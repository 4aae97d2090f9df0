#pragma once

#include <map>
#include <optional>
#include <vector>

#include "gfdwa/dwa.hpp"
#include "gfdwa/gpdf.hpp"

namespace gfdwa {

using RobotId = int;

/// Latest trajectory each robot has committed to.
class PredictionBoard {
 public:
  struct Entry {
    int step = 0;
    std::vector<Vec2> positions;
    bool operator==(const Entry&) const = default;
  };

  /// Replaces the robot's entry.
  void publish(RobotId id, int step, std::vector<Vec2> positions);
  void publish(RobotId id, int step, const Trajectory& trajectory);

  const std::map<RobotId, Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const Entry* find(RobotId id) const;

 private:
  std::map<RobotId, Entry> entries_;
};

/// Fits a field on every predicted position of every robot except self_id.
/// Empty when no other robot has published.
std::optional<GpField> build_fleet_field(const PredictionBoard& board, RobotId self_id,
                                         const KernelParams& params);

/// Other robots' predictions shifted by one step so that entry n lines up
/// with candidate state n of a plan made one step after publication.
std::vector<AlignedPrediction> aligned_predictions(const PredictionBoard& board, RobotId self_id,
                                                   int horizon);

/// Min-composition of the static obstacle field and the fleet field. Fleet
/// distances are reduced by two robot radii (center-to-center clearance).
class UnifiedField : public FieldSource {
 public:
  UnifiedField(const GpField* static_field, std::optional<GpField> fleet_field,
               double robot_radius);

  FieldQuery query(const Vec2& p) const override;

  const GpField* static_field() const { return static_field_; }
  const std::optional<GpField>& fleet_field() const { return fleet_field_; }

 private:
  const GpField* static_field_;
  std::optional<GpField> fleet_field_;
  double robot_radius_;
};

}  // namespace gfdwa
