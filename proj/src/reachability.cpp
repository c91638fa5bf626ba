#include "scenebatch/reachability.hpp"

#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace scenebatch {

Mat4 KinematicChain::fk(std::span<const double> joint_values) const {
  if (joint_values.size() != links.size())
    throw std::invalid_argument("fk: joint value count mismatch");
  Mat4 t = Mat4::Identity();
  for (std::size_t i = 0; i < links.size(); ++i) {
    t = t * links[i].origin * links[i].joint.motion(joint_values[i]);
  }
  return t * ee_offset;
}

double KinematicChain::max_reach() const {
  double reach = ee_offset.block<3, 1>(0, 3).norm();
  for (const auto& link : links) {
    reach += link.origin.block<3, 1>(0, 3).norm();
    if (link.joint.kind == JointSpec::Kind::prismatic)
      reach += std::max(std::abs(link.joint.lo), std::abs(link.joint.hi));
  }
  return reach;
}

namespace {

double tool_inclination(const Mat4& ee) {
  // angle between tool axis (ee +z) and world -z
  Vec3 axis = ee.block<3, 3>(0, 0) * Vec3(0, 0, 1);
  double c = std::clamp(-axis.z(), -1.0, 1.0);
  return std::acos(c);
}

}  // namespace

ReachMap4D ReachMap4D::build(const KinematicChain& chain, std::size_t samples, double resolution,
                             double psi_resolution, uint64_t seed, ThreadPool* pool) {
  if (chain.links.empty()) throw std::invalid_argument("build: chain has no joints");
  if (samples < 1) throw std::invalid_argument("build: need at least one sample");
  if (resolution <= 0.0 || psi_resolution <= 0.0)
    throw std::invalid_argument("build: resolution must be positive");

  ReachMap4D map;
  map.samples_ = samples;
  map.res_ = resolution;
  map.psi_res_ = psi_resolution;
  double reach = chain.max_reach();
  map.r_max_ = reach + resolution;
  map.z_min_ = -reach - resolution;
  map.z_max_ = reach + resolution;
  map.nr_ = static_cast<std::size_t>(std::ceil(map.r_max_ / resolution));
  map.nz_ = static_cast<std::size_t>(std::ceil((map.z_max_ - map.z_min_) / resolution));
  map.npsi_ = static_cast<std::size_t>(std::ceil(M_PI / psi_resolution));

  std::size_t cells = map.cell_count();
  std::vector<std::atomic<uint64_t>> occ((cells + 63) / 64);
  std::vector<std::atomic<uint32_t>> counts(cells);
  for (auto& w : occ) w.store(0, std::memory_order_relaxed);
  for (auto& c : counts) c.store(0, std::memory_order_relaxed);

  std::size_t joints = chain.links.size();
  auto run = [&](std::size_t begin, std::size_t end) {
    std::vector<double> values(joints);
    for (std::size_t s = begin; s < end; ++s) {
      Pcg32 rng = make_stream(seed, {0x7265616368ULL, s});
      for (std::size_t j = 0; j < joints; ++j)
        values[j] = rng.uniform(chain.links[j].joint.lo, chain.links[j].joint.hi);
      Mat4 ee = chain.fk(values);
      Vec3 p = ee.block<3, 1>(0, 3);
      std::size_t ir, iz;
      if (!map.bin(p, ir, iz)) continue;
      double psi = tool_inclination(ee);
      std::size_t ipsi = std::min(map.npsi_ - 1,
                                  static_cast<std::size_t>(psi / map.psi_res_));
      std::size_t idx = map.flat(ir, iz, ipsi);
      occ[idx >> 6].fetch_or(1ULL << (idx & 63), std::memory_order_relaxed);
      counts[idx].fetch_add(1, std::memory_order_relaxed);
    }
  };
  if (pool != nullptr) {
    pool->parallel_for(samples, run);
  } else {
    run(0, samples);
  }

  map.occ_.resize(occ.size());
  for (std::size_t i = 0; i < occ.size(); ++i) map.occ_[i] = occ[i].load();
  map.counts_.resize(cells);
  for (std::size_t i = 0; i < cells; ++i) map.counts_[i] = counts[i].load();

  map.occ_any_.assign((map.nr_ * map.nz_ + 63) / 64, 0);
  for (std::size_t ir = 0; ir < map.nr_; ++ir) {
    for (std::size_t iz = 0; iz < map.nz_; ++iz) {
      bool any = false;
      for (std::size_t ip = 0; ip < map.npsi_ && !any; ++ip)
        any = map.bit(map.occ_, map.flat(ir, iz, ip));
      if (any) {
        std::size_t idx = ir * map.nz_ + iz;
        map.occ_any_[idx >> 6] |= 1ULL << (idx & 63);
      }
    }
  }
  return map;
}

bool ReachMap4D::bin(const Vec3& p, std::size_t& ir, std::size_t& iz) const {
  double r = std::hypot(p.x(), p.y());
  if (r >= r_max_ || p.z() < z_min_ || p.z() >= z_max_) return false;
  ir = static_cast<std::size_t>(r / res_);
  iz = static_cast<std::size_t>((p.z() - z_min_) / res_);
  return ir < nr_ && iz < nz_;
}

std::size_t ReachMap4D::occupied_cells() const {
  std::size_t c = 0;
  for (uint64_t w : occ_) c += static_cast<std::size_t>(__builtin_popcountll(w));
  return c;
}

uint32_t ReachMap4D::cell_samples(std::size_t ir, std::size_t iz, std::size_t ipsi) const {
  if (counts_.empty()) return 0;
  return counts_[flat(ir, iz, ipsi)];
}

bool ReachMap4D::query(const Vec3& target, std::optional<double> inclination) const {
  std::size_t ir, iz;
  if (!bin(target, ir, iz)) return false;
  if (!inclination) {
    std::size_t idx = ir * nz_ + iz;
    return bit(occ_any_, idx);
  }
  double psi = std::clamp(*inclination, 0.0, M_PI);
  std::size_t ipsi = std::min(npsi_ - 1, static_cast<std::size_t>(psi / psi_res_));
  return bit(occ_, flat(ir, iz, ipsi));
}

std::vector<uint8_t> ReachMap4D::query_batch(const TransformBatch& base_poses,
                                             std::span<const Vec3> targets,
                                             std::optional<double> inclination,
                                             ThreadPool* pool) const {
  if (base_poses.size() != targets.size())
    throw std::invalid_argument("query_batch: size mismatch");
  std::vector<uint8_t> out(targets.size(), 0);
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Vec3 local = transform_point(inverse_rigid(base_poses[i]), targets[i]);
      out[i] = query(local, inclination) ? 1 : 0;
    }
  };
  if (pool != nullptr && targets.size() >= 1024) {
    pool->parallel_for(targets.size(), run);
  } else {
    run(0, targets.size());
  }
  return out;
}

std::vector<uint8_t> placement_filter(const ReachMap4D& map, const TransformBatch& robot_base,
                                      const std::vector<const TransformBatch*>& frames,
                                      std::span<const uint32_t> active, ThreadPool* pool) {
  std::vector<uint8_t> out(active.size(), 1);
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      uint32_t inst = active[j];
      Mat4 inv_base = inverse_rigid(robot_base[inst]);
      bool ok = true;
      for (const TransformBatch* f : frames) {
        if (f == nullptr) continue;
        Vec3 local = transform_point(inv_base, (*f)[inst].block<3, 1>(0, 3));
        if (!map.query(local)) {
          ok = false;
          break;
        }
      }
      out[j] = ok ? 1 : 0;
    }
  };
  if (pool != nullptr && active.size() >= 1024) {
    pool->parallel_for(active.size(), run);
  } else {
    run(0, active.size());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Versioned binary file: header (bounds, resolution, sample count) + bitset.

namespace {
constexpr char kMagic[4] = {'S', 'B', 'R', 'M'};
constexpr uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
void read_pod(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
}
}  // namespace

void ReachMap4D::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for write: " + path);
  os.write(kMagic, 4);
  write_pod(os, kVersion);
  write_pod(os, static_cast<uint64_t>(samples_));
  write_pod(os, res_);
  write_pod(os, psi_res_);
  write_pod(os, r_max_);
  write_pod(os, z_min_);
  write_pod(os, z_max_);
  write_pod(os, static_cast<uint64_t>(nr_));
  write_pod(os, static_cast<uint64_t>(nz_));
  write_pod(os, static_cast<uint64_t>(npsi_));
  write_pod(os, static_cast<uint64_t>(occ_.size()));
  os.write(reinterpret_cast<const char*>(occ_.data()),
           static_cast<std::streamsize>(occ_.size() * sizeof(uint64_t)));
  if (!os) throw std::runtime_error("write failed: " + path);
}

ReachMap4D ReachMap4D::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open reach map: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("not a reach map file: " + path);
  uint32_t version = 0;
  read_pod(is, version);
  if (version != kVersion) throw std::runtime_error("unsupported reach map version");
  ReachMap4D map;
  uint64_t samples = 0, nr = 0, nz = 0, npsi = 0, words = 0;
  read_pod(is, samples);
  read_pod(is, map.res_);
  read_pod(is, map.psi_res_);
  read_pod(is, map.r_max_);
  read_pod(is, map.z_min_);
  read_pod(is, map.z_max_);
  read_pod(is, nr);
  read_pod(is, nz);
  read_pod(is, npsi);
  read_pod(is, words);
  map.samples_ = samples;
  map.nr_ = nr;
  map.nz_ = nz;
  map.npsi_ = npsi;
  map.occ_.resize(words);
  is.read(reinterpret_cast<char*>(map.occ_.data()),
          static_cast<std::streamsize>(words * sizeof(uint64_t)));
  if (!is) throw std::runtime_error("truncated reach map: " + path);

  map.occ_any_.assign((map.nr_ * map.nz_ + 63) / 64, 0);
  for (std::size_t ir = 0; ir < map.nr_; ++ir) {
    for (std::size_t iz = 0; iz < map.nz_; ++iz) {
      bool any = false;
      for (std::size_t ip = 0; ip < map.npsi_ && !any; ++ip)
        any = map.bit(map.occ_, map.flat(ir, iz, ip));
      if (any) {
        std::size_t idx = ir * map.nz_ + iz;
        map.occ_any_[idx >> 6] |= 1ULL << (idx & 63);
      }
    }
  }
  return map;
}

}  // namespace scenebatch
