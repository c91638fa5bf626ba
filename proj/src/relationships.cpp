#include "scenebatch/relationships.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace scenebatch {

namespace {

constexpr double kEqualBandFloor = 0.01;  // meters
constexpr double kStadiumInflation = 0.1; // fraction of anchor separation
constexpr double kAnchorVaryTol = 1e-12;

Polygon2D stadium(const Vec2& a, const Vec2& b, double radius) {
  Vec2 d = b - a;
  double len = d.norm();
  Polygon2D out;
  if (len < 1e-12) {
    // coincident anchors: disc
    for (int i = 0; i < 72; ++i) {
      double ang = 2.0 * M_PI * i / 72;
      out.exterior.emplace_back(a.x() + radius * std::cos(ang), a.y() + radius * std::sin(ang));
    }
    return out;
  }
  Vec2 u = d / len;
  double base = std::atan2(u.y(), u.x());
  auto cap = [&](const Vec2& c, double a0, double a1) {
    int steps = 36;  // 5 degrees over a half circle
    for (int i = 0; i <= steps; ++i) {
      double ang = a0 + (a1 - a0) * i / steps;
      out.exterior.emplace_back(c.x() + radius * std::cos(ang), c.y() + radius * std::sin(ang));
    }
  };
  cap(b, base - M_PI / 2, base + M_PI / 2);
  cap(a, base + M_PI / 2, base + 3 * M_PI / 2);
  return out;
}

bool collinear(const std::vector<Vec2>& pts, double scale) {
  if (pts.size() < 3) return true;
  for (std::size_t i = 2; i < pts.size(); ++i) {
    double c = (pts[1] - pts[0]).x() * (pts[i] - pts[0]).y() -
               (pts[1] - pts[0]).y() * (pts[i] - pts[0]).x();
    if (std::abs(c) > 1e-9 * scale * scale) return false;
  }
  return true;
}

}  // namespace

double RelationshipSpec::effective_angle_threshold() const {
  if (angle_threshold) return *angle_threshold;
  return direction == DirectionKind::none ? M_PI : M_PI / 4.0;
}

void RelationshipSpec::validate() const {
  if (distance < 0.0) throw std::invalid_argument("relationship: distance must be >= 0");
  if (ratio_on_support < 0.0 || ratio_on_support > 1.0)
    throw std::invalid_argument("relationship: ratio_on_support outside [0,1]");
  if (angle_threshold && (*angle_threshold <= 0.0 || *angle_threshold > M_PI))
    throw std::invalid_argument("relationship: angle_threshold outside (0, pi]");
  if (distance_type == DistanceType::middle) {
    if (anchors.size() < 2)
      throw std::invalid_argument("relationship: middle requires at least 2 anchors");
  } else if (has_distance_constraint()) {
    if (anchors.size() != 1)
      throw std::invalid_argument("relationship: greater/less/equal require exactly 1 anchor");
  }
  if (direction != DirectionKind::none && anchors.size() != 1)
    throw std::invalid_argument("relationship: direction requires exactly 1 anchor");
  if (direction == DirectionKind::vector && direction_vector.norm() < 1e-12)
    throw std::invalid_argument("relationship: zero-length direction vector");
}

Vec2 resolve_direction(const RelationshipSpec& spec, double anchor_yaw) {
  Vec2 v;
  switch (spec.direction) {
    case DirectionKind::left: v = Vec2(-1, 0); break;
    case DirectionKind::right: v = Vec2(1, 0); break;
    case DirectionKind::front: v = Vec2(0, -1); break;
    case DirectionKind::back: v = Vec2(0, 1); break;
    case DirectionKind::vector: {
      double n = spec.direction_vector.norm();
      if (n < 1e-12) throw std::invalid_argument("resolve_direction: zero-length vector");
      v = spec.direction_vector / n;
      break;
    }
    case DirectionKind::none:
      throw std::invalid_argument("resolve_direction: no direction set");
  }
  if (spec.frame == DirectionFrame::local) {
    double c = std::cos(anchor_yaw), s = std::sin(anchor_yaw);
    v = Vec2(c * v.x() - s * v.y(), s * v.x() + c * v.y());
  }
  return v;
}

void distance_band(const RelationshipSpec& spec, double& min_r, double& max_r) {
  switch (spec.distance_type) {
    case DistanceType::greater:
      min_r = spec.distance;
      max_r = std::numeric_limits<double>::infinity();
      break;
    case DistanceType::less:
      min_r = 0.0;
      max_r = spec.distance;
      break;
    case DistanceType::equal: {
      double half = std::max(0.05 * spec.distance, kEqualBandFloor);
      min_r = std::max(0.0, spec.distance - half);
      max_r = spec.distance + half;
      break;
    }
    default:
      min_r = 0.0;
      max_r = std::numeric_limits<double>::infinity();
      break;
  }
}

Polygon2D middle_polygon(const std::vector<Vec2>& anchor_points) {
  if (anchor_points.size() < 2)
    throw std::invalid_argument("middle_polygon: need at least 2 anchors");

  Aabb2 bb;
  for (const auto& p : anchor_points) bb.expand(p);
  double scale = std::max(1e-9, bb.diagonal());

  if (anchor_points.size() == 2 || collinear(anchor_points, scale)) {
    // Degenerate hull: inflate the extreme segment into a capsule.
    Vec2 lo = anchor_points[0], hi = anchor_points[0];
    for (const auto& p : anchor_points) {
      if (std::make_pair(p.x(), p.y()) < std::make_pair(lo.x(), lo.y())) lo = p;
      if (std::make_pair(p.x(), p.y()) > std::make_pair(hi.x(), hi.y())) hi = p;
    }
    double sep = (hi - lo).norm();
    return stadium(lo, hi, std::max(1e-6, kStadiumInflation * sep));
  }

  Vec2 centroid(0, 0);
  for (const auto& p : anchor_points) centroid += p;
  centroid /= static_cast<double>(anchor_points.size());

  std::vector<Vec2> sorted = anchor_points;
  std::sort(sorted.begin(), sorted.end(), [&](const Vec2& a, const Vec2& b) {
    return std::atan2(a.y() - centroid.y(), a.x() - centroid.x()) <
           std::atan2(b.y() - centroid.y(), b.x() - centroid.x());
  });
  Polygon2D poly;
  poly.exterior = sorted;
  if (!is_valid_polygon(poly)) {
    // equal-angle ties can produce a self-touching ring
    return convex_hull(anchor_points);
  }
  return poly;
}

ConstraintRegion build_constraint_region(const RelationshipSpec& spec,
                                         const MultiPolygon2D& support,
                                         const std::vector<std::vector<AnchorState>>& anchors,
                                         std::size_t n) {
  spec.validate();
  ConstraintRegion out;
  if (anchors.empty()) {
    out.region = support;
    return out;
  }
  for (const auto& a : anchors) {
    if (a.size() != n) throw std::invalid_argument("anchor state batch size mismatch");
  }

  // Anchors that move across instances force per-instance regions; a rigid
  // transform of the canonical region cannot reproduce the clip against the
  // static support polygon.
  bool vary = false;
  for (const auto& a : anchors) {
    for (std::size_t i = 1; i < n && !vary; ++i) {
      if ((a[i].position - a[0].position).norm() > kAnchorVaryTol ||
          std::abs(a[i].yaw - a[0].yaw) > kAnchorVaryTol)
        vary = true;
    }
    if (vary) break;
  }

  Aabb2 clip = bounds(support);

  auto region_for = [&](std::size_t i) -> MultiPolygon2D {
    if (spec.distance_type == DistanceType::middle) {
      std::vector<Vec2> pts;
      pts.reserve(anchors.size());
      for (const auto& a : anchors) pts.push_back(a[i].position);
      return intersect(MultiPolygon2D::from(middle_polygon(pts)), support);
    }
    const AnchorState& anchor = anchors[0][i];
    double min_r, max_r;
    distance_band(spec, min_r, max_r);
    double theta = spec.effective_angle_threshold();
    Vec2 v(1, 0);
    if (spec.direction != DirectionKind::none) v = resolve_direction(spec, anchor.yaw);
    Aabb2 clip_i = clip;
    clip_i.expand(anchor.position);
    Polygon2D ring = annulus_sector(anchor.position, v, theta, min_r, max_r, clip_i);
    return intersect(MultiPolygon2D::from(ring), support);
  };

  if (!vary) {
    out.region = region_for(0);
    return out;
  }
  out.per_instance = true;
  out.regions_by_instance.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.regions_by_instance[i] = region_for(i);
  out.region = out.regions_by_instance.empty() ? support : out.regions_by_instance[0];
  return out;
}

void apply_ratio_on_support(ConstraintRegion& region, double footprint_x, double footprint_y,
                            double ratio) {
  if (ratio < 0.0 || ratio > 1.0)
    throw std::invalid_argument("apply_ratio_on_support: ratio outside [0,1]");
  if (footprint_x <= 0.0 || footprint_y <= 0.0)
    throw std::invalid_argument("apply_ratio_on_support: footprint edges must be positive");
  double r = ratio * std::min(footprint_x, footprint_y) / 2.0;
  if (r == 0.0) return;
  region.region = erode(region.region, r);
  for (auto& m : region.regions_by_instance) m = erode(m, r);
}

double face_to_yaw(const Vec2& object_position, const Vec2& target_position) {
  Vec2 d = target_position - object_position;
  if (d.norm() < 1e-12) {
    std::fprintf(stderr, "face_to: coincident object and target, yaw set to 0\n");
    return 0.0;
  }
  return std::atan2(d.y(), d.x());
}

}  // namespace scenebatch
