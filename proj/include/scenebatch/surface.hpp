#pragma once

#include <vector>

#include "scenebatch/polygon.hpp"
#include "scenebatch/transform.hpp"
#include "scenebatch/trimesh.hpp"

namespace scenebatch {

// `on` selects surfaces open to the sky of their own mesh; `inside` selects
// cavity floors (geometry above them).
enum class SurfaceMode { on, inside };

struct SupportSurface {
  Polygon2D polygon;  // z = 0 plane of `frame`
  Mat4 frame;         // surface frame -> object frame
  bool roofed = false;
  double area = 0.0;
};

// Clusters upward-facing facets (normal within 5 degrees of +z), projects
// each connected cluster to a polygon at the cluster's top plane, and tags it
// roofed when upward ray casts from interior points hit the mesh.
// Surfaces below 1e-4 m^2 are discarded.
std::vector<SupportSurface> extract_support_surfaces(const TriMesh& mesh, SurfaceMode mode);

// All qualifying clusters regardless of roof state; mode filters above.
std::vector<SupportSurface> extract_all_support_surfaces(const TriMesh& mesh);

}  // namespace scenebatch
