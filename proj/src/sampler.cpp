#include "scenebatch/sampler.hpp"

#include <cmath>
#include <stdexcept>

namespace scenebatch {

namespace {
constexpr uint64_t kCacheSalt = 0x63616368ULL;    // "cach"
constexpr uint64_t kFallbackSalt = 0x66616c6cULL; // "fall"
constexpr uint64_t kYawSalt = 0x79617721ULL;      // "yaw!"
}  // namespace

void refill_cache(SampleCache& cache, const MultiPolygon2D& region, std::size_t n, Pcg32& rng) {
  if (region.empty()) throw std::invalid_argument("refill_cache: empty region");
  uint64_t fp = region_fingerprint(region);
  if (fp != cache.fingerprint) {
    cache.queue.clear();
    cache.sampler = PolygonSampler(region);
    cache.fingerprint = fp;
  }
  std::size_t target = static_cast<std::size_t>(cache.refill_factor * static_cast<double>(n));
  if (target < n) target = n;
  if (cache.queue.size() >= target) return;
  std::size_t need = target - cache.queue.size();
  for (std::size_t i = 0; i < need; ++i) cache.queue.push_back(cache.sampler.draw(rng));
  ++cache.refill_count;
}

std::vector<Vec2> drain_cache(SampleCache& cache, const MultiPolygon2D& region, std::size_t k,
                              Pcg32& rng) {
  uint64_t fp = region_fingerprint(region);
  if (fp != cache.fingerprint || cache.queue.size() < k) {
    refill_cache(cache, region, std::max(k, static_cast<std::size_t>(1)), rng);
  }
  std::vector<Vec2> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    out.push_back(cache.queue.front());
    cache.queue.pop_front();
  }
  return out;
}

RestPose rest_pose(const TriMesh& geometry) {
  Aabb3 box = geometry.aabb();
  if (box.empty() || !box.min.allFinite() || !box.max.allFinite())
    throw std::invalid_argument("rest_pose: degenerate bounding box");
  RestPose rp;
  rp.z_offset = -box.min.z() + kRestClearance;
  return rp;
}

void PositionSampler::prepare(const ConstraintRegion* constraint, std::size_t batch_size,
                              uint64_t run_seed) {
  constraint_ = constraint;
  n_ = batch_size;
  run_seed_ = run_seed;
  cache_.bind_stream(stream_key({run_seed, salt_, kCacheSalt}));
  cache_rng_ = make_stream(run_seed, {salt_, kCacheSalt});
  if (constraint_ != nullptr && constraint_->per_instance) {
    fallback_.assign(n_, PolygonSampler());
    fallback_ready_.assign(n_, 0);
  } else {
    fallback_.clear();
    fallback_ready_.clear();
  }
}

void PositionSampler::sample(const TransformBatch& support_world,
                             std::span<const uint32_t> active, uint64_t attempt,
                             std::vector<Vec3>& positions, std::vector<uint8_t>& placeable,
                             ThreadPool* pool) {
  if (constraint_ == nullptr) throw std::logic_error("PositionSampler: prepare() not called");
  positions.assign(active.size(), Vec3::Zero());
  placeable.assign(active.size(), 1);

  if (!constraint_->per_instance) {
    const MultiPolygon2D& region = constraint_->region;
    if (region.empty()) {
      placeable.assign(active.size(), 0);
      return;
    }
    // The drain is serial so the point stream only depends on drain order;
    // the per-instance transform applies afterwards.
    std::vector<Vec2> pts = drain_cache(cache_, region, active.size(), cache_rng_);
    auto map = [&](std::size_t begin, std::size_t end) {
      for (std::size_t j = begin; j < end; ++j) {
        uint32_t inst = active[j];
        positions[j] = transform_point(support_world[inst], Vec3(pts[j].x(), pts[j].y(), 0.0));
      }
    };
    if (pool != nullptr && active.size() >= 512) {
      pool->parallel_for(active.size(), map);
    } else {
      map(0, active.size());
    }
    return;
  }

  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      uint32_t inst = active[j];
      const MultiPolygon2D& region = constraint_->regions_by_instance[inst];
      if (region.empty()) {
        placeable[j] = 0;
        continue;
      }
      if (fallback_ready_[inst] == 0) {
        fallback_[inst] = PolygonSampler(region);
        fallback_ready_[inst] = 1;
      }
      if (!fallback_[inst].valid()) {
        placeable[j] = 0;
        continue;
      }
      Pcg32 rng = make_stream(run_seed_, {salt_, kFallbackSalt, inst, attempt});
      Vec2 p = fallback_[inst].draw(rng);
      positions[j] = transform_point(support_world[inst], Vec3(p.x(), p.y(), 0.0));
    }
  };
  if (pool != nullptr && active.size() >= 64) {
    pool->parallel_for(active.size(), run);
  } else {
    run(0, active.size());
  }
}

std::vector<double> sample_orientations(const OrientationRule& rule,
                                        std::span<const uint32_t> active,
                                        std::span<const Vec3> object_positions,
                                        const std::vector<Vec2>* face_targets, uint64_t run_seed,
                                        uint64_t placement_salt, uint64_t attempt) {
  std::vector<double> yaws(active.size(), 0.0);
  switch (rule.kind) {
    case OrientationRule::Kind::fixed:
      break;
    case OrientationRule::Kind::uniform_yaw:
      for (std::size_t j = 0; j < active.size(); ++j) {
        Pcg32 rng = make_stream(run_seed, {placement_salt, kYawSalt, active[j], attempt});
        yaws[j] = rng.uniform(0.0, 2.0 * M_PI);
      }
      break;
    case OrientationRule::Kind::face_to: {
      if (face_targets == nullptr)
        throw std::invalid_argument("sample_orientations: face_to target positions missing");
      for (std::size_t j = 0; j < active.size(); ++j) {
        uint32_t inst = active[j];
        Vec2 obj(object_positions[j].x(), object_positions[j].y());
        yaws[j] = face_to_yaw(obj, (*face_targets)[inst]);
      }
      break;
    }
  }
  return yaws;
}

}  // namespace scenebatch
