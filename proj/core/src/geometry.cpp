#include "turbid/geometry.hpp"

#include <cmath>
#include <numbers>

#include "turbid/errors.hpp"
#include "turbid/parallel.hpp"

namespace turbid {

Surface::Surface(TriMesh mesh)
    : mesh_(std::move(mesh)), bvh_(mesh_), epsilon_(1e-4 * mesh_.diameter()) {}

std::optional<double> Surface::height_at(double x, double y) const {
  const auto box = mesh_.bounds();
  const double top = box.max().z() + 1.0;
  const Ray ray{Vec3(x, y, top), Vec3(0.0, 0.0, -1.0)};
  const Hit hit = bvh_.intersect(ray);
  if (!hit) return std::nullopt;
  return top - hit.distance;
}

ProjectionMap::ProjectionMap(int width, int height, std::size_t face_count)
    : width_(width),
      height_(height),
      hit_face_(static_cast<std::size_t>(width) * height, -1),
      face_(static_cast<std::size_t>(width) * height, -1),
      depth_(static_cast<std::size_t>(width) * height, std::numeric_limits<double>::infinity()),
      point_(static_cast<std::size_t>(width) * height, Vec3::Zero()),
      ray_(static_cast<std::size_t>(width) * height, Vec3::Zero()),
      face_offsets_(face_count + 1, 0) {}

std::span<const int> ProjectionMap::pixels_of(std::size_t face) const {
  const auto begin = static_cast<std::size_t>(face_offsets_[face]);
  const auto end = static_cast<std::size_t>(face_offsets_[face + 1]);
  return {face_pixels_.data() + begin, end - begin};
}

int ProjectionMap::pixel_count_of(std::size_t face) const {
  return face_offsets_[face + 1] - face_offsets_[face];
}

int ProjectionMap::background_count() const {
  return pixel_count() - static_cast<int>(face_pixels_.size());
}

ProjectionMap project(const Surface& surface, const Pose& camera, const CameraModel& model) {
  const TriMesh& mesh = surface.mesh();
  if (mesh.empty()) throw DataError("cannot project an empty mesh");
  if (!camera.is_finite()) throw DataError("camera pose is not finite");
  model.validate();

  ProjectionMap map(model.width, model.height, mesh.face_count());
  const Vec3 origin = camera.position();
  parallel_for(model.height, [&](int j) {
    for (int i = 0; i < model.width; ++i) {
      const int p = j * model.width + i;
      const Vec3 dir = model.ray_direction(camera, i + 0.5, j + 0.5);
      map.ray_[p] = dir;
      const Hit hit = surface.bvh().intersect(Ray{origin, dir});
      if (!hit) continue;
      map.hit_face_[p] = hit.face;
      map.depth_[p] = hit.distance;
      map.point_[p] = origin + hit.distance * dir;
      if (mesh.normal(static_cast<std::size_t>(hit.face)).dot(dir) < 0.0) {
        map.face_[p] = hit.face;
      }
    }
  });

  // Counting sort of pixels by observing face.
  for (int f : map.face_) {
    if (f >= 0) ++map.face_offsets_[static_cast<std::size_t>(f) + 1];
  }
  for (std::size_t k = 0; k < mesh.face_count(); ++k) {
    map.face_offsets_[k + 1] += map.face_offsets_[k];
  }
  map.face_pixels_.resize(static_cast<std::size_t>(map.face_offsets_.back()));
  std::vector<int> cursor(map.face_offsets_.begin(), map.face_offsets_.end() - 1);
  for (int p = 0; p < map.pixel_count(); ++p) {
    const int f = map.face_[p];
    if (f >= 0) map.face_pixels_[static_cast<std::size_t>(cursor[f]++)] = p;
  }
  return map;
}

bool inside_cone(const Pose& light, double cos_half_angle, const Vec3& point) {
  const Vec3 d = point - light.position();
  const double len = d.norm();
  if (len == 0.0) return false;
  return light.forward().dot(d) >= cos_half_angle * len;
}

bool light_visibility(const Surface& surface, const Pose& light, double cone_half_angle,
                      const Vec3& point, const Vec3& normal) {
  if (cone_half_angle < std::numbers::pi &&
      !inside_cone(light, std::cos(cone_half_angle), point)) {
    return false;
  }
  const Vec3 to_light = light.position() - point;
  const Vec3 offset = normal.dot(to_light) >= 0.0 ? normal : Vec3(-normal);
  const Vec3 start = point + surface.epsilon() * offset;
  const Vec3 d = light.position() - start;
  const double dist = d.norm();
  if (dist == 0.0) return true;
  return !surface.bvh().occluded(Ray{start, d / dist}, 0.0, dist);
}

std::optional<double> segment_resolution(const ProjectionMap& map, const TriMesh& mesh,
                                         std::size_t face) {
  const int count = map.pixel_count_of(face);
  if (count == 0) return std::nullopt;
  return count / mesh.area(face);
}

}  // namespace turbid
