#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "scenebatch/aabb.hpp"
#include "scenebatch/rng.hpp"
#include "scenebatch/transform.hpp"

namespace scenebatch {

// Simple ring polygon: exterior CCW, holes CW, coordinates in meters.
struct Polygon2D {
  std::vector<Vec2> exterior;
  std::vector<std::vector<Vec2>> holes;
};

// Disjoint polygon parts.
struct MultiPolygon2D {
  std::vector<Polygon2D> parts;

  bool empty() const { return parts.empty(); }
  static MultiPolygon2D from(Polygon2D p) {
    MultiPolygon2D m;
    m.parts.push_back(std::move(p));
    return m;
  }
};

Polygon2D make_rect(double x0, double y0, double x1, double y1);

double area(const Polygon2D& p);
double area(const MultiPolygon2D& m);
Aabb2 bounds(const MultiPolygon2D& m);

// Inward offset by r (meters). Reflex corners become 5-degree arcs; the
// result may be empty. r == 0 returns the input unchanged.
MultiPolygon2D erode(const MultiPolygon2D& region, double r);

MultiPolygon2D intersect(const MultiPolygon2D& a, const MultiPolygon2D& b);
MultiPolygon2D union_of(const MultiPolygon2D& a, const MultiPolygon2D& b);

// Boundary counts as inside within 1e-9.
bool point_in_region(const MultiPolygon2D& region, const Vec2& p);

// 0 inside, distance to the region otherwise.
double distance_to_region(const MultiPolygon2D& region, const Vec2& p);

// Ring sector {p : min_r <= |p-center| <= max_r, angle(p-center, v) <= theta},
// arcs discretized at <= 5 degrees per segment. theta == pi yields the full
// annulus (a hole appears when min_r > 0). An unbounded max_r is passed as
// infinity and replaced by the clip bound's diagonal length.
Polygon2D annulus_sector(const Vec2& center, const Vec2& v, double theta, double min_r,
                         double max_r, const Aabb2& clip_bound);

// Area-weighted triangulation for exact-uniform point sampling. Built once
// per region, reused across draws; 3 rng values consumed per point.
class PolygonSampler {
 public:
  PolygonSampler() = default;
  explicit PolygonSampler(const MultiPolygon2D& region);

  bool valid() const { return !tris_.empty(); }
  double total_area() const { return total_area_; }
  std::size_t triangle_count() const { return tris_.size(); }

  Vec2 draw(Pcg32& rng) const;
  void draw_many(Pcg32& rng, std::size_t k, std::vector<Vec2>& out) const;

 private:
  struct Tri {
    Vec2 a, b, c;
  };
  std::vector<Tri> tris_;
  std::vector<double> cum_;  // cumulative normalized areas
  double total_area_ = 0.0;
};

// Ear-clipping triangulation; holes are merged into the exterior via bridge
// edges first. Exposed for tests (area conservation, sampling oracles).
std::vector<std::array<Vec2, 3>> triangulate(const Polygon2D& poly);

// 64-bit content hash of the region's coordinates, used as cache fingerprint.
uint64_t region_fingerprint(const MultiPolygon2D& region);

// Simple-ring validity per the OGC rules (no self intersection, area > 0).
bool is_valid_polygon(const Polygon2D& p);

Polygon2D convex_hull(const std::vector<Vec2>& points);

}  // namespace scenebatch
