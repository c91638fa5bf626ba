#pragma once

#include <algorithm>
#include <limits>

#include "scenebatch/transform.hpp"

namespace scenebatch {

struct Aabb3 {
  Vec3 min{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
           std::numeric_limits<double>::infinity()};
  Vec3 max{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity()};

  bool empty() const { return min.x() > max.x(); }
  Vec3 center() const { return 0.5 * (min + max); }
  Vec3 extent() const { return max - min; }

  void expand(const Vec3& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  void expand(const Aabb3& b) {
    min = min.cwiseMin(b.min);
    max = max.cwiseMax(b.max);
  }

  bool overlaps(const Aabb3& o, double margin = 0.0) const {
    return min.x() <= o.max.x() + margin && o.min.x() <= max.x() + margin &&
           min.y() <= o.max.y() + margin && o.min.y() <= max.y() + margin &&
           min.z() <= o.max.z() + margin && o.min.z() <= max.z() + margin;
  }
};

struct Aabb2 {
  Vec2 min{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Vec2 max{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};

  bool empty() const { return min.x() > max.x(); }
  double diagonal() const { return empty() ? 0.0 : (max - min).norm(); }

  void expand(const Vec2& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  void expand(const Aabb2& b) {
    min = min.cwiseMin(b.min);
    max = max.cwiseMax(b.max);
  }
};

// Arvo's method: axis-aligned bound of a rigidly transformed box.
inline Aabb3 transform_aabb(const Mat4& m, const Aabb3& b) {
  Vec3 c = transform_point(m, b.center());
  Vec3 h = 0.5 * b.extent();
  Vec3 wh = m.block<3, 3>(0, 0).cwiseAbs() * h;
  Aabb3 out;
  out.min = c - wh;
  out.max = c + wh;
  return out;
}

}  // namespace scenebatch
