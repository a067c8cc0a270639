#include "turbid/bvh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace turbid {

namespace {

constexpr std::uint32_t kLeafSize = 4;

bool hit_box(const Eigen::AlignedBox3d& box, const Vec3& origin, const Vec3& inv_dir,
             double t_min, double t_max) {
  for (int a = 0; a < 3; ++a) {
    double t0 = (box.min()[a] - origin[a]) * inv_dir[a];
    double t1 = (box.max()[a] - origin[a]) * inv_dir[a];
    if (inv_dir[a] < 0.0) std::swap(t0, t1);
    // NaN from 0 * inf fails both comparisons and keeps the interval.
    if (t0 > t_min) t_min = t0;
    if (t1 < t_max) t_max = t1;
    if (t_max < t_min) return false;
  }
  return true;
}

}  // namespace

double intersect_triangle(const Ray& ray, const Vec3& a, const Vec3& b, const Vec3& c,
                          double* u_out, double* v_out) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 p = ray.direction.cross(e2);
  const double det = e1.dot(p);
  if (det == 0.0) return kInf;
  const double inv = 1.0 / det;
  const Vec3 s = ray.origin - a;
  const double u = s.dot(p) * inv;
  if (u < 0.0 || u > 1.0) return kInf;
  const Vec3 q = s.cross(e1);
  const double v = ray.direction.dot(q) * inv;
  if (v < 0.0 || u + v > 1.0) return kInf;
  const double t = e2.dot(q) * inv;
  if (u_out) *u_out = u;
  if (v_out) *v_out = v;
  return t;
}

Bvh::Bvh(const TriMesh& mesh) : mesh_(&mesh) {
  const auto n = static_cast<std::uint32_t>(mesh.face_count());
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0u);
  if (n == 0) return;
  std::vector<Vec3> centroids(n);
  for (std::uint32_t k = 0; k < n; ++k) centroids[k] = mesh.centroid(k);
  nodes_.reserve(2 * n / kLeafSize + 2);
  build(0, n, centroids);
}

std::uint32_t Bvh::build(std::uint32_t begin, std::uint32_t end, std::vector<Vec3>& centroids) {
  const auto index = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();
  Eigen::AlignedBox3d box;
  Eigen::AlignedBox3d cbox;
  for (std::uint32_t i = begin; i < end; ++i) {
    const auto f = order_[i];
    for (int c = 0; c < 3; ++c) box.extend(mesh_->vertex(f, c));
    cbox.extend(centroids[f]);
  }
  nodes_[index].box = box;
  if (end - begin <= kLeafSize) {
    nodes_[index].first = begin;
    nodes_[index].count = end - begin;
    return index;
  }
  int axis = 0;
  cbox.diagonal().maxCoeff(&axis);
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     return centroids[a][axis] < centroids[b][axis];
                   });
  build(begin, mid, centroids);
  const std::uint32_t right = build(mid, end, centroids);
  nodes_[index].first = right;
  nodes_[index].count = 0;
  return index;
}

template <bool AnyHit>
Hit Bvh::traverse(const Ray& ray, double t_min, double t_max) const {
  Hit best;
  if (nodes_.empty()) return best;
  const Vec3 inv_dir = ray.direction.cwiseInverse();
  std::array<std::uint32_t, 64> stack{};
  int top = 0;
  stack[top++] = 0;
  double limit = t_max;
  int axis_hint = 0;
  ray.direction.cwiseAbs().maxCoeff(&axis_hint);
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (!hit_box(node.box, ray.origin, inv_dir, t_min, limit)) continue;
    if (node.count > 0) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const auto f = order_[i];
        double u = 0.0;
        double v = 0.0;
        const double t = intersect_triangle(ray, mesh_->vertex(f, 0), mesh_->vertex(f, 1),
                                            mesh_->vertex(f, 2), &u, &v);
        if (t > t_min && t < limit) {
          best.face = static_cast<int>(f);
          best.distance = t;
          best.u = u;
          best.v = v;
          if constexpr (AnyHit) return best;
          limit = t;
        }
      }
    } else {
      const auto self = static_cast<std::uint32_t>(&node - nodes_.data());
      const std::uint32_t left = self + 1;
      const std::uint32_t right = node.first;
      // Visit the child nearer along the ray first.
      const bool left_first = (nodes_[left].box.center()[axis_hint] - ray.origin[axis_hint]) *
                                  ray.direction[axis_hint] <=
                              (nodes_[right].box.center()[axis_hint] - ray.origin[axis_hint]) *
                                  ray.direction[axis_hint];
      if (left_first) {
        stack[top++] = right;
        stack[top++] = left;
      } else {
        stack[top++] = left;
        stack[top++] = right;
      }
    }
  }
  return best;
}

Hit Bvh::intersect(const Ray& ray, double t_min, double t_max) const {
  return traverse<false>(ray, t_min, t_max);
}

bool Bvh::occluded(const Ray& ray, double t_min, double t_max) const {
  return static_cast<bool>(traverse<true>(ray, t_min, t_max));
}

}  // namespace turbid
