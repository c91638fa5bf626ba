#define BOOST_ALLOW_DEPRECATED_HEADERS
#include "scenebatch/polygon.hpp"

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <list>
#include <stdexcept>

namespace scenebatch {

namespace bg = boost::geometry;
using BPoint = bg::model::d2::point_xy<double>;
using BPoly = bg::model::polygon<BPoint, false, true>;  // CCW outer, closed
using BMulti = bg::model::multi_polygon<BPoly>;

namespace {

constexpr double kArcStepDeg = 5.0;
constexpr int kPointsPerCircle = static_cast<int>(360.0 / kArcStepDeg);

BPoly to_boost(const Polygon2D& p) {
  BPoly out;
  for (const auto& v : p.exterior) bg::append(out.outer(), BPoint(v.x(), v.y()));
  out.inners().resize(p.holes.size());
  for (std::size_t h = 0; h < p.holes.size(); ++h) {
    for (const auto& v : p.holes[h]) bg::append(out.inners()[h], BPoint(v.x(), v.y()));
  }
  bg::correct(out);
  return out;
}

BMulti to_boost(const MultiPolygon2D& m) {
  BMulti out;
  for (const auto& p : m.parts) out.push_back(to_boost(p));
  return out;
}

std::vector<Vec2> ring_to_vec(const BPoly::ring_type& ring) {
  std::vector<Vec2> out;
  out.reserve(ring.size());
  for (const auto& pt : ring) out.emplace_back(bg::get<0>(pt), bg::get<1>(pt));
  // boost rings are closed; drop the repeated last vertex
  if (out.size() > 1 && (out.front() - out.back()).norm() < 1e-15) out.pop_back();
  return out;
}

MultiPolygon2D from_boost(const BMulti& m) {
  MultiPolygon2D out;
  for (const auto& bp : m) {
    Polygon2D p;
    p.exterior = ring_to_vec(bp.outer());
    if (p.exterior.size() < 3) continue;
    for (const auto& inner : bp.inners()) {
      auto hole = ring_to_vec(inner);
      if (hole.size() >= 3) p.holes.push_back(std::move(hole));
    }
    out.parts.push_back(std::move(p));
  }
  return out;
}

double cross2(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

double ring_area(const std::vector<Vec2>& ring) {
  double s = 0.0;
  for (std::size_t i = 0, n = ring.size(); i < n; ++i) {
    const Vec2& a = ring[i];
    const Vec2& b = ring[(i + 1) % n];
    s += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * s;
}

}  // namespace

Polygon2D make_rect(double x0, double y0, double x1, double y1) {
  Polygon2D p;
  p.exterior = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  return p;
}

double area(const Polygon2D& p) { return bg::area(to_boost(p)); }

double area(const MultiPolygon2D& m) { return bg::area(to_boost(m)); }

Aabb2 bounds(const MultiPolygon2D& m) {
  Aabb2 b;
  for (const auto& p : m.parts)
    for (const auto& v : p.exterior) b.expand(v);
  return b;
}

MultiPolygon2D erode(const MultiPolygon2D& region, double r) {
  if (r < 0.0) throw std::invalid_argument("erode: negative radius");
  if (r == 0.0 || region.empty()) return region;
  BMulti in = to_boost(region);
  BMulti out;
  bg::strategy::buffer::distance_symmetric<double> dist(-r);
  bg::strategy::buffer::side_straight side;
  bg::strategy::buffer::join_round join(kPointsPerCircle);
  bg::strategy::buffer::end_round end(kPointsPerCircle);
  bg::strategy::buffer::point_circle circ(kPointsPerCircle);
  bg::buffer(in, out, dist, side, join, end, circ);
  return from_boost(out);
}

MultiPolygon2D intersect(const MultiPolygon2D& a, const MultiPolygon2D& b) {
  BMulti out;
  bg::intersection(to_boost(a), to_boost(b), out);
  return from_boost(out);
}

MultiPolygon2D union_of(const MultiPolygon2D& a, const MultiPolygon2D& b) {
  BMulti out;
  bg::union_(to_boost(a), to_boost(b), out);
  return from_boost(out);
}

bool point_in_region(const MultiPolygon2D& region, const Vec2& p) {
  return distance_to_region(region, p) <= 1e-9;
}

double distance_to_region(const MultiPolygon2D& region, const Vec2& p) {
  if (region.empty()) return std::numeric_limits<double>::infinity();
  return bg::distance(BPoint(p.x(), p.y()), to_boost(region));
}

Polygon2D annulus_sector(const Vec2& center, const Vec2& v, double theta, double min_r,
                         double max_r, const Aabb2& clip_bound) {
  if (!(theta > 0.0) || theta > M_PI + 1e-12)
    throw std::invalid_argument("annulus_sector: theta outside (0, pi]");
  if (std::isinf(max_r)) max_r = std::max(clip_bound.diagonal(), min_r + 1e-6);
  if (!(min_r < max_r)) throw std::invalid_argument("annulus_sector: min_r >= max_r");

  double base = std::atan2(v.y(), v.x());
  bool full = theta >= M_PI - 1e-12;
  double step = kArcStepDeg * M_PI / 180.0;

  auto arc = [&](double radius, double a0, double a1, std::vector<Vec2>& out) {
    int n = std::max(1, static_cast<int>(std::ceil(std::abs(a1 - a0) / step)));
    for (int i = 0; i <= n; ++i) {
      double a = a0 + (a1 - a0) * static_cast<double>(i) / n;
      out.emplace_back(center.x() + radius * std::cos(a), center.y() + radius * std::sin(a));
    }
  };

  Polygon2D poly;
  if (full) {
    // Full ring: outer circle exterior, inner circle as hole.
    arc(max_r, 0.0, 2.0 * M_PI, poly.exterior);
    poly.exterior.pop_back();  // closing vertex
    if (min_r > 0.0) {
      std::vector<Vec2> hole;
      arc(min_r, 2.0 * M_PI, 0.0, hole);  // CW
      hole.pop_back();
      poly.holes.push_back(std::move(hole));
    }
    return poly;
  }

  arc(max_r, base - theta, base + theta, poly.exterior);
  if (min_r > 0.0) {
    arc(min_r, base + theta, base - theta, poly.exterior);
  } else {
    poly.exterior.push_back(center);
  }
  return poly;
}

// ---------------------------------------------------------------------------
// Ear clipping with hole bridging.

namespace {

struct EarVertex {
  Vec2 p;
  int prev, next;
  bool reflex;
};

bool point_in_tri_strict(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
  constexpr double eps = 1e-12;
  double d1 = cross2(a, b, p);
  double d2 = cross2(b, c, p);
  double d3 = cross2(c, a, p);
  return d1 > eps && d2 > eps && d3 > eps;
}

// Merges one hole (CW) into the outer ring (CCW) with a bridge at the hole's
// max-x vertex, per the classic visibility construction.
std::vector<Vec2> bridge_hole(const std::vector<Vec2>& outer, const std::vector<Vec2>& hole) {
  std::size_t mi = 0;
  for (std::size_t i = 1; i < hole.size(); ++i)
    if (hole[i].x() > hole[mi].x()) mi = i;
  const Vec2 m = hole[mi];

  // Closest intersection of the +x ray from m with outer edges.
  double best_x = std::numeric_limits<double>::infinity();
  std::size_t best_edge = outer.size();
  Vec2 hit;
  for (std::size_t i = 0, n = outer.size(); i < n; ++i) {
    const Vec2& a = outer[i];
    const Vec2& b = outer[(i + 1) % n];
    if ((a.y() > m.y()) == (b.y() > m.y())) continue;
    double t = (m.y() - a.y()) / (b.y() - a.y());
    double x = a.x() + t * (b.x() - a.x());
    if (x >= m.x() - 1e-12 && x < best_x) {
      best_x = x;
      best_edge = i;
      hit = Vec2(x, m.y());
    }
  }
  if (best_edge == outer.size()) {
    // Degenerate input; append hole unbridged rather than lose area entirely.
    return outer;
  }

  const Vec2& ea = outer[best_edge];
  const Vec2& eb = outer[(best_edge + 1) % outer.size()];
  std::size_t cand = ea.x() > eb.x() ? best_edge : (best_edge + 1) % outer.size();

  // A reflex vertex of the outer ring inside triangle (m, hit, cand) blocks
  // visibility; take the blocking vertex with the smallest angle to +x.
  Vec2 c = outer[cand];
  double best_metric = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0, n = outer.size(); i < n; ++i) {
    if (i == cand) continue;
    const Vec2& prev = outer[(i + n - 1) % n];
    const Vec2& next = outer[(i + 1) % n];
    bool reflex = cross2(prev, outer[i], next) < 0.0;
    if (!reflex) continue;
    if (point_in_tri_strict(outer[i], m, hit, c) || point_in_tri_strict(outer[i], m, c, hit)) {
      Vec2 d = outer[i] - m;
      double metric = std::abs(std::atan2(d.y(), d.x()));
      if (metric < best_metric) {
        best_metric = metric;
        cand = i;
        c = outer[i];
      }
    }
  }

  std::vector<Vec2> merged;
  merged.reserve(outer.size() + hole.size() + 2);
  for (std::size_t i = 0; i <= cand; ++i) merged.push_back(outer[i]);
  for (std::size_t k = 0; k <= hole.size(); ++k) merged.push_back(hole[(mi + k) % hole.size()]);
  merged.push_back(outer[cand]);
  for (std::size_t i = cand + 1; i < outer.size(); ++i) merged.push_back(outer[i]);
  return merged;
}

void ear_clip_ring(std::vector<Vec2> ring, std::vector<std::array<Vec2, 3>>& out) {
  // Drop consecutive duplicates.
  std::vector<Vec2> clean;
  for (const auto& p : ring) {
    if (clean.empty() || (p - clean.back()).squaredNorm() > 1e-24) clean.push_back(p);
  }
  while (clean.size() > 1 && (clean.front() - clean.back()).squaredNorm() <= 1e-24)
    clean.pop_back();
  int n = static_cast<int>(clean.size());
  if (n < 3) return;

  std::vector<EarVertex> verts(n);
  for (int i = 0; i < n; ++i) {
    verts[i].p = clean[i];
    verts[i].prev = (i + n - 1) % n;
    verts[i].next = (i + 1) % n;
  }
  auto update_reflex = [&](int i) {
    verts[i].reflex = cross2(verts[verts[i].prev].p, verts[i].p, verts[verts[i].next].p) < 0.0;
  };
  for (int i = 0; i < n; ++i) update_reflex(i);

  auto is_ear = [&](int i) {
    if (verts[i].reflex) return false;
    const Vec2& a = verts[verts[i].prev].p;
    const Vec2& b = verts[i].p;
    const Vec2& c = verts[verts[i].next].p;
    if (std::abs(cross2(a, b, c)) < 1e-18) return false;  // degenerate sliver
    for (int j = verts[verts[i].next].next; j != verts[i].prev; j = verts[j].next) {
      if (verts[j].reflex && point_in_tri_strict(verts[j].p, a, b, c)) return false;
    }
    return true;
  };

  int remaining = n;
  int cur = 0;
  int since_clip = 0;
  while (remaining > 3) {
    if (is_ear(cur)) {
      int p = verts[cur].prev, q = verts[cur].next;
      out.push_back({verts[p].p, verts[cur].p, verts[q].p});
      verts[p].next = q;
      verts[q].prev = p;
      update_reflex(p);
      update_reflex(q);
      cur = q;
      --remaining;
      since_clip = 0;
      continue;
    }
    cur = verts[cur].next;
    if (++since_clip > remaining) {
      // Numeric stalemate: clip the least-degenerate convex corner to keep
      // progress; the skipped area is below triangulation tolerance.
      int best = -1;
      double best_a = -1.0;
      for (int j = cur, k = 0; k < remaining; j = verts[j].next, ++k) {
        if (verts[j].reflex) continue;
        double a = cross2(verts[verts[j].prev].p, verts[j].p, verts[verts[j].next].p);
        if (a > best_a) {
          best_a = a;
          best = j;
        }
      }
      if (best < 0) break;
      int p = verts[best].prev, q = verts[best].next;
      out.push_back({verts[p].p, verts[best].p, verts[q].p});
      verts[p].next = q;
      verts[q].prev = p;
      update_reflex(p);
      update_reflex(q);
      cur = q;
      --remaining;
      since_clip = 0;
    }
  }
  if (remaining == 3) {
    int p = verts[cur].prev, q = verts[cur].next;
    out.push_back({verts[p].p, verts[cur].p, verts[q].p});
  }
}

}  // namespace

std::vector<std::array<Vec2, 3>> triangulate(const Polygon2D& poly) {
  std::vector<std::array<Vec2, 3>> tris;
  if (poly.exterior.size() < 3) return tris;

  std::vector<Vec2> outer = poly.exterior;
  if (ring_area(outer) < 0.0) std::reverse(outer.begin(), outer.end());

  // Merge holes right-to-left so earlier bridges cannot occlude later ones.
  std::vector<std::vector<Vec2>> holes = poly.holes;
  for (auto& h : holes)
    if (ring_area(h) > 0.0) std::reverse(h.begin(), h.end());  // holes CW
  std::sort(holes.begin(), holes.end(), [](const auto& a, const auto& b) {
    double ax = -std::numeric_limits<double>::infinity();
    double bx = ax;
    for (const auto& p : a) ax = std::max(ax, p.x());
    for (const auto& p : b) bx = std::max(bx, p.x());
    return ax > bx;
  });
  for (const auto& h : holes) {
    if (h.size() >= 3) outer = bridge_hole(outer, h);
  }

  ear_clip_ring(std::move(outer), tris);
  return tris;
}

PolygonSampler::PolygonSampler(const MultiPolygon2D& region) {
  for (const auto& part : region.parts) {
    auto tris = triangulate(part);
    for (const auto& t : tris) {
      double a = 0.5 * std::abs(cross2(t[0], t[1], t[2]));
      if (a <= 0.0) continue;
      tris_.push_back({t[0], t[1], t[2]});
      total_area_ += a;
      cum_.push_back(total_area_);
    }
  }
  if (total_area_ > 0.0) {
    for (auto& c : cum_) c /= total_area_;
    cum_.back() = 1.0;
  } else {
    tris_.clear();
    cum_.clear();
  }
}

Vec2 PolygonSampler::draw(Pcg32& rng) const {
  // Always 3 draws per point, so streams are position-addressable.
  double u = rng.next_double();
  double r1 = rng.next_double();
  double r2 = rng.next_double();
  auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
  std::size_t idx = std::min<std::size_t>(tris_.size() - 1, it - cum_.begin());
  const Tri& t = tris_[idx];
  double s = std::sqrt(r1);
  return t.a * (1.0 - s) + t.b * (s * (1.0 - r2)) + t.c * (s * r2);
}

void PolygonSampler::draw_many(Pcg32& rng, std::size_t k, std::vector<Vec2>& out) const {
  out.reserve(out.size() + k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(draw(rng));
}

bool is_valid_polygon(const Polygon2D& p) {
  if (p.exterior.size() < 3) return false;
  return bg::is_valid(to_boost(p));
}

Polygon2D convex_hull(const std::vector<Vec2>& points) {
  bg::model::multi_point<BPoint> mp;
  for (const auto& v : points) bg::append(mp, BPoint(v.x(), v.y()));
  BPoly hull;
  bg::convex_hull(mp, hull);
  Polygon2D out;
  out.exterior = ring_to_vec(hull.outer());
  return out;
}

uint64_t region_fingerprint(const MultiPolygon2D& region) {
  uint64_t h = 0x9e3779b97f4a7c15ULL;
  auto feed = [&h](double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    h = mix64(h ^ bits);
  };
  for (const auto& p : region.parts) {
    h = mix64(h ^ p.exterior.size());
    for (const auto& v : p.exterior) {
      feed(v.x());
      feed(v.y());
    }
    for (const auto& hole : p.holes) {
      h = mix64(h ^ hole.size());
      for (const auto& v : hole) {
        feed(v.x());
        feed(v.y());
      }
    }
  }
  return h;
}

}  // namespace scenebatch
