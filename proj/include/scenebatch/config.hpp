#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scenebatch/reachability.hpp"
#include "scenebatch/relationships.hpp"
#include "scenebatch/sampler.hpp"
#include "scenebatch/scene_graph.hpp"
#include "scenebatch/trimesh.hpp"

namespace scenebatch {

struct AssetSpec {
  enum class Kind { box, cylinder, sphere, mesh, composite };

  struct Part {
    std::string name;
    std::string asset;   // another (non-composite) asset in the config
    std::string parent;  // empty = part tree root
    Vec3 origin_xyz{0, 0, 0};
    double origin_yaw = 0.0;
    std::optional<JointSpec> joint;
    bool randomize = false;
  };

  Kind kind = Kind::box;
  Vec3 box_size{1, 1, 1};
  double radius = 0.0;
  double height = 0.0;
  int segments = 32;
  std::string mesh_path;  // relative to the config file
  std::vector<Part> parts;
};

struct FixedPose {
  Vec3 xyz{0, 0, 0};
  double yaw = 0.0;
  Mat4 matrix() const;
};

struct PlacementSpec {
  std::string name;
  std::string asset;
  std::string parent;  // "world", an object name, or "object/part"
  std::optional<FixedPose> fixed_pose;
  RelationshipSpec relationship;
  OrientationRule orientation;
  bool reachable = false;
  int surface_index = 0;  // among qualifying surfaces sorted by area desc
};

struct RobotSpec {
  FixedPose base_pose;
  KinematicChain chain;
  std::string map_file;  // optional; built in-process when empty
  std::size_t map_samples = 1000000;
  double map_resolution = 0.05;
  double map_psi_resolution = 15.0 * M_PI / 180.0;
};

struct SceneConfig {
  uint32_t schema_version = 1;
  std::string name;
  int max_retries = 10;
  std::map<std::string, AssetSpec> assets;
  std::vector<PlacementSpec> placements;
  std::optional<RobotSpec> robot;
  uint64_t seed = 0;
  std::string base_dir;  // directory of the config file; not serialized

  // Placement order must respect parent/anchor/face_to dependencies; every
  // referenced asset must resolve; reachability flags require a robot.
  void validate() const;
};

// Strict parse: unknown fields are rejected with their path.
SceneConfig parse_config(const std::string& json_text, const std::string& base_dir = ".");
SceneConfig load_config(const std::string& path);
std::string serialize_config(const SceneConfig& config);
uint64_t config_hash(const SceneConfig& config);

// Primitive or wavefront mesh referenced by an asset (composites excluded).
TriMesh load_asset_mesh(const AssetSpec& asset, const std::string& base_dir);

// Wavefront OBJ subset: v / f records, fan triangulation of polygon faces.
// Parse errors carry the line number.
TriMesh load_obj(const std::string& path);

}  // namespace scenebatch
