#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scenebatch/polygon.hpp"
#include "scenebatch/surface.hpp"

namespace scenebatch {

enum class DistanceType { none, greater, less, equal, middle };
enum class DirectionKind { none, left, right, front, back, vector };
enum class DirectionFrame { global, local };

// Declarative spatial constraint between the object being placed and one or
// more already-placed anchor objects.
struct RelationshipSpec {
  SurfaceMode kind = SurfaceMode::on;
  std::vector<std::string> anchors;
  DirectionKind direction = DirectionKind::none;
  Vec2 direction_vector{0, 0};
  DirectionFrame frame = DirectionFrame::global;
  double distance = 0.0;
  DistanceType distance_type = DistanceType::none;
  std::optional<double> angle_threshold;  // radians; defaulted when absent
  std::optional<std::string> face_to;
  double ratio_on_support = 0.0;

  // pi/4 when a direction is set, pi (all directions) otherwise.
  double effective_angle_threshold() const;
  bool has_distance_constraint() const {
    return distance_type == DistanceType::greater || distance_type == DistanceType::less ||
           distance_type == DistanceType::equal;
  }

  void validate() const;  // throws std::invalid_argument on bad combinations
};

// Anchor pose projected into the support surface frame.
struct AnchorState {
  Vec2 position{0, 0};
  double yaw = 0.0;
};

// Sampleable region compiled from a RelationshipSpec. per_instance is set
// when anchor poses vary across instances, which breaks the rigid-transform
// propagation used by the sampler fast path.
struct ConstraintRegion {
  MultiPolygon2D region;  // canonical (instance 0) region
  bool per_instance = false;
  std::vector<MultiPolygon2D> regions_by_instance;

  const MultiPolygon2D& at(std::size_t instance) const {
    return per_instance ? regions_by_instance[instance] : region;
  }
  bool empty_at(std::size_t instance) const { return at(instance).empty(); }
};

// Maps named directions (left/right/front/back -> -x/+x/-y/+y), rotates by
// the anchor yaw in local frame, normalizes explicit vectors.
Vec2 resolve_direction(const RelationshipSpec& spec, double anchor_yaw);

// Distance band for the annulus by distance_type:
//   greater -> [d, unbounded), less -> [0, d], equal -> d +- max(0.05 d, 1 cm).
void distance_band(const RelationshipSpec& spec, double& min_r, double& max_r);

// Builds S' for each instance: single anchor -> annulus sector intersected
// with the support polygon; n >= 2 with distance_type `middle` -> polygon of
// anchor positions (inflated segment when degenerate) intersected with the
// support polygon. anchors[a][i] is anchor a in instance i, support frame.
ConstraintRegion build_constraint_region(const RelationshipSpec& spec,
                                         const MultiPolygon2D& support,
                                         const std::vector<std::vector<AnchorState>>& anchors,
                                         std::size_t n);

// Erodes every instance region by ratio * (shorter footprint edge / 2).
void apply_ratio_on_support(ConstraintRegion& region, double footprint_x, double footprint_y,
                            double ratio);

// Yaw turning the object's +x axis toward the target.
double face_to_yaw(const Vec2& object_position, const Vec2& target_position);

// The middle-polygon for given anchor points (exposed for tests): angular
// sort around the centroid, or the inflated-segment capsule when the points
// are collinear or only two.
Polygon2D middle_polygon(const std::vector<Vec2>& anchor_points);

}  // namespace scenebatch
