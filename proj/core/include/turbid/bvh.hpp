#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "turbid/mesh.hpp"

namespace turbid {

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit length
};

struct Hit {
  int face = -1;
  double distance = std::numeric_limits<double>::infinity();
  double u = 0.0;  // barycentric weight of vertex 1
  double v = 0.0;  // barycentric weight of vertex 2
  explicit operator bool() const { return face >= 0; }
};

/// Bounding-volume hierarchy over the faces of a TriMesh. Keeps a reference
/// to the mesh, which must outlive it.
class Bvh {
 public:
  explicit Bvh(const TriMesh& mesh);

  /// Nearest intersection with distance in (t_min, t_max).
  Hit intersect(const Ray& ray, double t_min = 0.0,
                double t_max = std::numeric_limits<double>::infinity()) const;

  /// True if any face intersects the open segment (t_min, t_max).
  bool occluded(const Ray& ray, double t_min, double t_max) const;

  const TriMesh& mesh() const { return *mesh_; }

 private:
  struct Node {
    Eigen::AlignedBox3d box;
    std::uint32_t first = 0;  // first primitive (leaf) or right child (inner)
    std::uint32_t count = 0;  // 0 for inner nodes
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end,
                      std::vector<Vec3>& centroids);
  template <bool AnyHit>
  Hit traverse(const Ray& ray, double t_min, double t_max) const;

  const TriMesh* mesh_;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> order_;
};

/// Moller-Trumbore ray/triangle test. Returns the hit distance or +inf.
double intersect_triangle(const Ray& ray, const Vec3& a, const Vec3& b,
                          const Vec3& c, double* u = nullptr,
                          double* v = nullptr);

}  // namespace turbid
