#include "turbid/infogain.hpp"

#include <cmath>
#include <numbers>

#include "turbid/errors.hpp"

namespace turbid {

double gaussian_entropy(double variance) {
  if (!(variance > 0.0)) throw NumericalError("entropy needs a positive variance");
  return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * variance);
}

double info_gain(double variance_before, double variance_after) {
  if (!(variance_before > 0.0) || !(variance_after > 0.0)) {
    throw NumericalError("information gain needs positive variances");
  }
  return 0.5 * std::log(variance_before / variance_after);
}

std::vector<double> prospective_qualities(const World& world, const ProjectionMap& projection,
                                          const JointView& view) {
  const ModelImages model = render_model(*world.surface, world.optics, projection, view);
  const ImageD var = model_variance(model.irradiance, model.backscatter, projection,
                                    world.estimation, world.optics.camera.read_noise);
  return segment_qualities(projection, var, world.mesh(), world.estimation);
}

std::vector<double> prospective_qualities(const World& world, const JointView& view) {
  return prospective_qualities(world, project(*world.surface, view.camera, world.optics.camera),
                               view);
}

double prospective_quality(const World& world, const JointView& view, std::size_t face) {
  return prospective_qualities(world, view).at(face);
}

GainReport view_gain(const TextureLayout& layout, std::span<const double> face_quality,
                     const std::vector<double>& q) {
  GainReport report;
  const std::size_t n = q.size();
  report.face_gain.assign(n, 0.0);
  report.face_quality = q;
  report.unobserved.assign(n, false);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(q[k] > 0.0)) {
      report.unobserved[k] = true;
      continue;
    }
    report.face_gain[k] = 0.5 * std::log1p(q[k] / face_quality[k]) * layout.patch_count(k);
    report.total += report.face_gain[k];
  }
  return report;
}

GainReport view_gain(const World& world, const TextureMap& texture, const JointView& view) {
  return view_gain(*world.layout, texture.face_qualities(), prospective_qualities(world, view));
}

double path_gain(const TextureLayout& layout, std::span<const double> face_quality,
                 std::span<const std::vector<double>> view_qualities) {
  double total = 0.0;
  for (std::size_t k = 0; k < face_quality.size(); ++k) {
    double added = 0.0;
    for (const auto& q : view_qualities) added += q[k];
    if (added > 0.0) total += 0.5 * std::log1p(added / face_quality[k]) * layout.patch_count(k);
  }
  return total;
}

double path_gain(const World& world, const TextureMap& texture, std::span<const JointView> path) {
  std::vector<std::vector<double>> qs;
  qs.reserve(path.size());
  for (const auto& v : path) qs.push_back(prospective_qualities(world, v));
  return path_gain(*world.layout, texture.face_qualities(), qs);
}

}  // namespace turbid
