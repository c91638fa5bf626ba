#include "scenebatch/collision.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace scenebatch {

namespace {

constexpr double kEps = 1e-12;

// Edge-to-plane crossing parameters for Moller's interval test.
void isect_interval(double vv0, double vv1, double vv2, double d0, double d1, double d2,
                    double& lo, double& hi) {
  // d0*d2 > 0 pattern has been arranged so the lone vertex is v1.
  double t0 = vv0 + (vv1 - vv0) * d0 / (d0 - d1);
  double t1 = vv2 + (vv1 - vv2) * d2 / (d2 - d1);
  lo = std::min(t0, t1);
  hi = std::max(t0, t1);
}

// Rearranges so the vertex on its own side is in the middle slot.
bool compute_interval(double p0, double p1, double p2, double d0, double d1, double d2,
                      double& lo, double& hi) {
  if (d0 * d1 > 0.0) {
    isect_interval(p0, p2, p1, d0, d2, d1, lo, hi);
  } else if (d0 * d2 > 0.0) {
    isect_interval(p0, p1, p2, d0, d1, d2, lo, hi);
  } else if (d1 * d2 > 0.0 || d0 != 0.0) {
    isect_interval(p1, p0, p2, d1, d0, d2, lo, hi);
  } else if (d1 != 0.0) {
    isect_interval(p0, p1, p2, d0, d1, d2, lo, hi);
  } else if (d2 != 0.0) {
    isect_interval(p0, p2, p1, d0, d2, d1, lo, hi);
  } else {
    return false;  // coplanar
  }
  return true;
}

bool seg_seg_cross_2d(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    return (q.x() - p.x()) * (r.y() - p.y()) - (q.y() - p.y()) * (r.x() - p.x());
  };
  double o1 = orient(a, b, c), o2 = orient(a, b, d);
  double o3 = orient(c, d, a), o4 = orient(c, d, b);
  // strict crossing only; touching endpoints are free
  return ((o1 > kEps && o2 < -kEps) || (o1 < -kEps && o2 > kEps)) &&
         ((o3 > kEps && o4 < -kEps) || (o3 < -kEps && o4 > kEps));
}

bool point_in_tri_2d(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
  auto orient = [](const Vec2& o, const Vec2& q, const Vec2& r) {
    return (q.x() - o.x()) * (r.y() - o.y()) - (q.y() - o.y()) * (r.x() - o.x());
  };
  double d1 = orient(a, b, p), d2 = orient(b, c, p), d3 = orient(c, a, p);
  bool has_neg = d1 < -kEps || d2 < -kEps || d3 < -kEps;
  bool has_pos = d1 > kEps || d2 > kEps || d3 > kEps;
  return !(has_neg && has_pos) && (has_neg || has_pos);
}

bool coplanar_tri_tri(const Vec3& n, const Vec3& p0, const Vec3& p1, const Vec3& p2,
                      const Vec3& q0, const Vec3& q1, const Vec3& q2) {
  // Project onto the dominant axis plane.
  int axis = 0;
  Vec3 an = n.cwiseAbs();
  if (an.y() > an.x()) axis = 1;
  if (an.z() > an[axis]) axis = 2;
  int u = (axis + 1) % 3, v = (axis + 2) % 3;
  Vec2 a(p0[u], p0[v]), b(p1[u], p1[v]), c(p2[u], p2[v]);
  Vec2 d(q0[u], q0[v]), e(q1[u], q1[v]), f(q2[u], q2[v]);
  const Vec2 t1[3] = {a, b, c};
  const Vec2 t2[3] = {d, e, f};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (seg_seg_cross_2d(t1[i], t1[(i + 1) % 3], t2[j], t2[(j + 1) % 3])) return true;
  Vec2 c1 = (a + b + c) / 3.0;
  Vec2 c2 = (d + e + f) / 3.0;
  if (point_in_tri_2d(c1, d, e, f)) return true;
  if (point_in_tri_2d(c2, a, b, c)) return true;
  return false;
}

}  // namespace

bool tri_tri_intersect(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& q0,
                       const Vec3& q1, const Vec3& q2) {
  Vec3 n2 = (q1 - q0).cross(q2 - q0);
  double d2c = -n2.dot(q0);
  double dp0 = n2.dot(p0) + d2c;
  double dp1 = n2.dot(p1) + d2c;
  double dp2 = n2.dot(p2) + d2c;
  double scale2 = n2.norm();
  double tol2 = kEps * std::max(1.0, scale2);
  if (std::abs(dp0) < tol2) dp0 = 0.0;
  if (std::abs(dp1) < tol2) dp1 = 0.0;
  if (std::abs(dp2) < tol2) dp2 = 0.0;
  if ((dp0 > 0 && dp1 > 0 && dp2 > 0) || (dp0 < 0 && dp1 < 0 && dp2 < 0)) return false;

  Vec3 n1 = (p1 - p0).cross(p2 - p0);
  double d1c = -n1.dot(p0);
  double dq0 = n1.dot(q0) + d1c;
  double dq1 = n1.dot(q1) + d1c;
  double dq2 = n1.dot(q2) + d1c;
  double scale1 = n1.norm();
  double tol1 = kEps * std::max(1.0, scale1);
  if (std::abs(dq0) < tol1) dq0 = 0.0;
  if (std::abs(dq1) < tol1) dq1 = 0.0;
  if (std::abs(dq2) < tol1) dq2 = 0.0;
  if ((dq0 > 0 && dq1 > 0 && dq2 > 0) || (dq0 < 0 && dq1 < 0 && dq2 < 0)) return false;

  bool coplanar = dp0 == 0 && dp1 == 0 && dp2 == 0;
  if (coplanar) return coplanar_tri_tri(n1, p0, p1, p2, q0, q1, q2);

  Vec3 dir = n1.cross(n2);
  int axis = 0;
  Vec3 ad = dir.cwiseAbs();
  if (ad.y() > ad.x()) axis = 1;
  if (ad.z() > ad[axis]) axis = 2;

  double lo1, hi1, lo2, hi2;
  if (!compute_interval(p0[axis], p1[axis], p2[axis], dp0, dp1, dp2, lo1, hi1))
    return coplanar_tri_tri(n1, p0, p1, p2, q0, q1, q2);
  if (!compute_interval(q0[axis], q1[axis], q2[axis], dq0, dq1, dq2, lo2, hi2))
    return coplanar_tri_tri(n1, p0, p1, p2, q0, q1, q2);

  // strict overlap: tangency is free
  return hi1 > lo2 + kEps && hi2 > lo1 + kEps;
}

namespace {

double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

double seg_seg_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1) {
  Vec3 d1 = p1 - p0, d2 = q1 - q0, r = p0 - q0;
  double a = d1.dot(d1), e = d2.dot(d2), f = d2.dot(r);
  double s, t;
  if (a <= kEps && e <= kEps) return r.norm();
  if (a <= kEps) {
    s = 0.0;
    t = clamp01(f / e);
  } else {
    double c = d1.dot(r);
    if (e <= kEps) {
      t = 0.0;
      s = clamp01(-c / a);
    } else {
      double b = d1.dot(d2);
      double denom = a * e - b * b;
      s = denom > kEps ? clamp01((b * f - c * e) / denom) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = clamp01(-c / a);
      } else if (t > 1.0) {
        t = 1.0;
        s = clamp01((b - c) / a);
      }
    }
  }
  return (p0 + d1 * s - (q0 + d2 * t)).norm();
}

double point_tri_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  Vec3 ab = b - a, ac = c - a, ap = p - a;
  double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return ap.norm();
  Vec3 bp = p - b;
  double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return bp.norm();
  double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) {
    double v = d1 / (d1 - d3);
    return (p - (a + ab * v)).norm();
  }
  Vec3 cp = p - c;
  double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return cp.norm();
  double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) {
    double w = d2 / (d2 - d6);
    return (p - (a + ac * w)).norm();
  }
  double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
    double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return (p - (b + (c - b) * w)).norm();
  }
  double denom = 1.0 / (va + vb + vc);
  double v = vb * denom, w = vc * denom;
  return (p - (a + ab * v + ac * w)).norm();
}

}  // namespace

double tri_tri_distance(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& q0,
                        const Vec3& q1, const Vec3& q2) {
  if (tri_tri_intersect(p0, p1, p2, q0, q1, q2)) return 0.0;
  const Vec3 pa[3] = {p0, p1, p2};
  const Vec3 qa[3] = {q0, q1, q2};
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      best = std::min(best, seg_seg_distance(pa[i], pa[(i + 1) % 3], qa[j], qa[(j + 1) % 3]));
  for (int i = 0; i < 3; ++i) {
    best = std::min(best, point_tri_distance(pa[i], q0, q1, q2));
    best = std::min(best, point_tri_distance(qa[i], p0, p1, p2));
  }
  return best;
}

// ---------------------------------------------------------------------------
// MeshBvh

MeshBvh::MeshBvh(const TriMesh& mesh) {
  if (mesh.empty()) throw std::invalid_argument("MeshBvh: empty mesh");
  std::size_t n = mesh.triangles.size();
  std::vector<Vec3> centroids(n);
  std::vector<uint32_t> order(n);
  for (std::size_t t = 0; t < n; ++t) {
    const auto& tri = mesh.triangles[t];
    centroids[t] =
        (mesh.vertices[tri[0]] + mesh.vertices[tri[1]] + mesh.vertices[tri[2]]) / 3.0;
    order[t] = static_cast<uint32_t>(t);
  }
  nodes_.reserve(2 * n);
  tris_.reserve(n);

  // tris_ is filled in leaf order during the build.
  std::vector<uint32_t> scratch = order;
  struct Builder {
    const TriMesh& mesh;
    const std::vector<Vec3>& centroids;
    MeshBvh& bvh;
    int max_depth = 0;

    Aabb3 tri_box(uint32_t t) const {
      Aabb3 b;
      for (uint32_t vi : mesh.triangles[t]) b.expand(mesh.vertices[vi]);
      return b;
    }

    int build(std::vector<uint32_t>& tris, uint32_t begin, uint32_t end, int depth) {
      max_depth = std::max(max_depth, depth);
      int idx = static_cast<int>(bvh.nodes_.size());
      bvh.nodes_.emplace_back();
      Aabb3 box;
      for (uint32_t i = begin; i < end; ++i) box.expand(tri_box(tris[i]));
      bvh.nodes_[idx].box = box;

      if (end - begin <= 4) {
        bvh.nodes_[idx].start = static_cast<uint32_t>(bvh.tris_.size());
        bvh.nodes_[idx].count = end - begin;
        for (uint32_t i = begin; i < end; ++i) {
          const auto& tri = mesh.triangles[tris[i]];
          bvh.tris_.push_back({mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]});
        }
        return idx;
      }

      Aabb3 cbox;
      for (uint32_t i = begin; i < end; ++i) cbox.expand(centroids[tris[i]]);
      Vec3 ext = cbox.extent();
      int axis = 0;
      if (ext.y() > ext.x()) axis = 1;
      if (ext.z() > ext[axis]) axis = 2;
      uint32_t mid = (begin + end) / 2;
      std::nth_element(tris.begin() + begin, tris.begin() + mid, tris.begin() + end,
                       [&](uint32_t a, uint32_t b) { return centroids[a][axis] < centroids[b][axis]; });

      int left = build(tris, begin, mid, depth + 1);
      bvh.nodes_[idx].left = left;
      build(tris, mid, end, depth + 1);
      return idx;
    }
  } builder{mesh, centroids, *this};
  builder.build(scratch, 0, static_cast<uint32_t>(n), 1);
  depth_ = builder.max_depth;
}

int MeshBvh::depth() const { return depth_; }

bool MeshBvh::collide(const MeshBvh& other, const Mat4& other_in_self, double margin,
                      std::atomic<uint64_t>* pair_counter) const {
  if (empty() || other.empty()) return false;
  uint64_t pairs = 0;
  struct Item {
    int a, b;
  };
  std::vector<Item> stack;
  stack.push_back({0, 0});
  bool hit = false;
  while (!stack.empty() && !hit) {
    Item it = stack.back();
    stack.pop_back();
    const Node& na = nodes_[it.a];
    const Node& nb = other.nodes_[it.b];
    Aabb3 nb_in_a = transform_aabb(other_in_self, nb.box);
    if (!na.box.overlaps(nb_in_a, margin)) continue;

    if (leaf(na) && leaf(nb)) {
      for (uint32_t i = na.start; i < na.start + na.count && !hit; ++i) {
        for (uint32_t j = nb.start; j < nb.start + nb.count && !hit; ++j) {
          const auto& ta = tris_[i];
          const auto& tb = other.tris_[j];
          Vec3 q0 = transform_point(other_in_self, tb[0]);
          Vec3 q1 = transform_point(other_in_self, tb[1]);
          Vec3 q2 = transform_point(other_in_self, tb[2]);
          ++pairs;
          if (margin > 0.0) {
            hit = tri_tri_distance(ta[0], ta[1], ta[2], q0, q1, q2) < margin;
          } else {
            hit = tri_tri_intersect(ta[0], ta[1], ta[2], q0, q1, q2);
          }
        }
      }
    } else if (leaf(nb) || (!leaf(na) && na.box.extent().squaredNorm() >= nb_in_a.extent().squaredNorm())) {
      stack.push_back({na.left, it.b});
      stack.push_back({na.left + 1, it.b});
    } else {
      stack.push_back({it.a, nb.left});
      stack.push_back({it.a, nb.left + 1});
    }
  }
  if (pair_counter != nullptr) pair_counter->fetch_add(pairs, std::memory_order_relaxed);
  return hit;
}

// ---------------------------------------------------------------------------
// CollisionWorld

CollisionWorld::CollisionWorld(std::size_t batch_size, double margin)
    : n_(batch_size), margin_(margin) {
  if (batch_size == 0) throw std::invalid_argument("CollisionWorld: batch_size must be >= 1");
}

int CollisionWorld::register_geometry(const TriMesh& mesh) {
  if (mesh.empty()) throw std::invalid_argument("register_geometry: empty mesh");
  uint64_t fp = mesh_fingerprint(mesh);
  for (std::size_t i = 0; i < geoms_.size(); ++i) {
    if (geoms_[i].fingerprint == fp) return static_cast<int>(i);
  }
  Geometry g;
  g.mesh = mesh;
  g.mesh.drop_degenerate();
  g.bvh = MeshBvh(g.mesh);
  g.local_box = g.mesh.aabb();
  g.fingerprint = fp;
  geoms_.push_back(std::move(g));
  ++stats_.geometry_registrations;
  ++stats_.bvh_builds;
  return static_cast<int>(geoms_.size() - 1);
}

const TriMesh& CollisionWorld::geometry_mesh(int geom_id) const {
  return geoms_.at(static_cast<std::size_t>(geom_id)).mesh;
}

const MeshBvh& CollisionWorld::geometry_bvh(int geom_id) const {
  return geoms_.at(static_cast<std::size_t>(geom_id)).bvh;
}

int CollisionWorld::add_object(const std::string& name, int geom_id) {
  geoms_.at(static_cast<std::size_t>(geom_id));
  Object o;
  o.name = name;
  o.geom = geom_id;
  o.poses = TransformBatch(n_);
  o.world_boxes.assign(n_, Aabb3{});
  for (std::size_t i = 0; i < n_; ++i) o.world_boxes[i] = geoms_[geom_id].local_box;
  o.enabled.assign(n_, 0);
  objects_.push_back(std::move(o));
  return static_cast<int>(objects_.size() - 1);
}

const std::string& CollisionWorld::object_name(int object) const {
  return objects_.at(static_cast<std::size_t>(object)).name;
}

int CollisionWorld::object_geometry(int object) const {
  return objects_.at(static_cast<std::size_t>(object)).geom;
}

bool CollisionWorld::enabled(int object, std::size_t instance) const {
  return objects_.at(static_cast<std::size_t>(object)).enabled.at(instance) != 0;
}

void CollisionWorld::set_enabled(int object, std::span<const uint32_t> instances, bool enabled) {
  Object& o = objects_.at(static_cast<std::size_t>(object));
  for (uint32_t i : instances) o.enabled.at(i) = enabled ? 1 : 0;
}

void CollisionWorld::set_enabled_all(int object, bool enabled) {
  Object& o = objects_.at(static_cast<std::size_t>(object));
  o.enabled.assign(n_, enabled ? 1 : 0);
}

void CollisionWorld::update_transforms(int object, const TransformBatch& poses) {
  Object& o = objects_.at(static_cast<std::size_t>(object));
  if (poses.size() != n_) throw std::invalid_argument("update_transforms: batch size mismatch");
  o.poses = poses;
  const Aabb3& local = geoms_[o.geom].local_box;
  for (std::size_t i = 0; i < n_; ++i) o.world_boxes[i] = transform_aabb(poses[i], local);
}

void CollisionWorld::update_transform(int object, std::size_t instance, const Mat4& pose) {
  Object& o = objects_.at(static_cast<std::size_t>(object));
  o.poses[instance] = pose;
  o.world_boxes[instance] = transform_aabb(pose, geoms_[o.geom].local_box);
}

const Mat4& CollisionWorld::object_pose(int object, std::size_t instance) const {
  return objects_.at(static_cast<std::size_t>(object)).poses[instance];
}

CollisionMask CollisionWorld::check_batch(int geom_id, std::span<const Mat4> poses,
                                          std::span<const uint32_t> active, ThreadPool* pool) {
  const Geometry& g = geoms_.at(static_cast<std::size_t>(geom_id));
  if (poses.size() != active.size())
    throw std::invalid_argument("check_batch: poses/active size mismatch");

  CollisionMask mask;
  mask.free.assign(n_, 1);
  mask.contact_object.assign(n_, -1);

  ++stats_.check_calls;
  stats_.checked_instances += active.size();
  std::atomic<uint64_t> narrow{0};
  std::atomic<uint64_t> pairs{0};

  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      uint32_t inst = active[j];
      const Mat4& cand_pose = poses[j];
      Aabb3 cand_box = transform_aabb(cand_pose, g.local_box);
      Mat4 inv_cand = inverse_rigid(cand_pose);
      for (std::size_t ob = 0; ob < objects_.size(); ++ob) {
        const Object& o = objects_[ob];
        if (o.enabled[inst] == 0) continue;
        if (!cand_box.overlaps(o.world_boxes[inst], margin_)) continue;
        narrow.fetch_add(1, std::memory_order_relaxed);
        Mat4 other_in_cand = inv_cand * o.poses[inst];
        if (g.bvh.collide(geoms_[o.geom].bvh, other_in_cand, margin_, &pairs)) {
          mask.free[inst] = 0;
          mask.contact_object[inst] = static_cast<int32_t>(ob);
          break;
        }
      }
    }
  };
  if (pool != nullptr && active.size() > 1) {
    pool->parallel_for(active.size(), run);
  } else {
    run(0, active.size());
  }
  stats_.narrow_phase_tests += narrow.load();
  stats_.triangle_pair_tests += pairs.load();
  return mask;
}

}  // namespace scenebatch
