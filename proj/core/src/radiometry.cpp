#include "turbid/radiometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "turbid/errors.hpp"
#include "turbid/parallel.hpp"
#include "turbid/rng.hpp"

namespace turbid {

double Medium::ambient() const {
  if (!ambient_enabled) return 0.0;
  return ambient_gain.value_or(kDefaultAmbientPerBeta * beta);
}

void Medium::validate() const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw DataError("extinction must be nonnegative");
  if (!(std::abs(g) < 1.0)) throw DataError("anisotropy g must satisfy |g| < 1");
  if (!(scattering_fraction >= 0.0 && scattering_fraction <= 1.0)) {
    throw DataError("scattering fraction must lie in [0, 1]");
  }
  if (ambient_gain && !(*ambient_gain >= 0.0)) throw DataError("ambient gain must be nonnegative");
}

void SpotLight::validate() const {
  if (!(intensity > 0.0)) throw DataError("light intensity must be positive");
  if (!(half_angle > 0.0 && half_angle < 0.5 * std::numbers::pi)) {
    throw DataError("light cone half-angle must lie in (0, pi/2)");
  }
  if (!pose.is_finite()) throw DataError("light pose is not finite");
}

void Optics::validate() const {
  camera.validate();
  medium.validate();
  light_at(Pose()).validate();
  if (backscatter_samples < 1) throw DataError("backscatter sample count must be positive");
  if (!(ambient_min_distance > 0.0)) throw DataError("ambient clamp distance must be positive");
}

double hg_phase(double cos_theta, double g) {
  const double g2 = g * g;
  const double denom = 1.0 + g2 - 2.0 * g * cos_theta;
  return (1.0 - g2) / (4.0 * std::numbers::pi * denom * std::sqrt(denom));
}

double direct_irradiance(const SurfacePoint& s, const SpotLight& light, const Medium& medium,
                         bool visible) {
  const Vec3 to_light = light.pose.position() - s.position;
  const double dist = to_light.norm();
  if (dist == 0.0) throw NumericalError("light coincides with the surface point");
  if (!visible) return 0.0;
  const double cos_i = std::max(0.0, s.normal.dot(to_light) / dist);
  return light.intensity * std::exp(-medium.beta * dist) / (dist * dist) * cos_i;
}

double ambient_irradiance(const Vec3& s, const SpotLight& light, const Medium& medium,
                          double min_distance) {
  const double gain = medium.ambient();
  if (gain == 0.0) return 0.0;
  const Vec3 axis = light.pose.forward();
  const double along = (s - light.pose.position()).dot(axis);
  if (along < 0.0) return 0.0;
  const Vec3 z = light.pose.position() + along * axis;
  const double l_lz = std::max(along, min_distance);
  const double l_sz = std::max((s - z).norm(), min_distance);
  return gain * light.intensity * std::exp(-medium.beta * (l_lz + l_sz)) /
         (l_lz * l_lz * l_sz * l_sz);
}

double backscatter(const Ray& ray, double length, const SpotLight& light, const Medium& medium,
                   int samples) {
  const double sigma_s = medium.scattering();
  if (sigma_s == 0.0 || medium.beta == 0.0) return 0.0;
  if (!std::isfinite(length)) length = 5.0 / medium.beta;
  if (!(length > 0.0) || samples < 1) return 0.0;
  const double dl = length / samples;
  const double cos_half = std::cos(light.half_angle);
  const Vec3 axis = light.pose.forward();
  const Vec3& lpos = light.pose.position();
  double sum = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double l = (i + 0.5) * dl;
    const Vec3 p = ray.origin + l * ray.direction;
    const Vec3 v = p - lpos;
    const double l_lp = v.norm();
    if (l_lp == 0.0 || axis.dot(v) < cos_half * l_lp) continue;
    // Scattering angle between the incident beam and the direction back to
    // the camera.
    const double cos_theta = -v.dot(ray.direction) / l_lp;
    sum += hg_phase(cos_theta, medium.g) * std::exp(-medium.beta * (l_lp + l)) / (l_lp * l_lp);
  }
  return sigma_s * light.intensity * sum * dl;
}

ModelImages render_model(const Surface& surface, const Optics& optics,
                         const ProjectionMap& projection, const JointView& view) {
  const int w = projection.width();
  const int h = projection.height();
  ModelImages out{ImageD(w, h), ImageD(w, h), Mask(w, h, 0)};
  const SpotLight light = optics.light_at(view.light);
  const TriMesh& mesh = surface.mesh();
  const Medium& medium = optics.medium;
  const Vec3& cam = view.camera.position();
  parallel_for(h, [&](int j) {
    for (int i = 0; i < w; ++i) {
      const int p = j * w + i;
      const double depth = projection.depth(p);
      out.backscatter[p] = backscatter(Ray{cam, projection.ray(p)}, depth, light, medium,
                                       optics.backscatter_samples);
      const int f = projection.face(p);
      if (f < 0) continue;
      const SurfacePoint s{projection.point(p), mesh.normal(static_cast<std::size_t>(f))};
      if ((light.pose.position() - s.position).squaredNorm() == 0.0) continue;
      const bool visible =
          light_visibility(surface, light.pose, light.half_angle, s.position, s.normal);
      const double direct = direct_irradiance(s, light, medium, visible);
      const double ambient =
          ambient_irradiance(s.position, light, medium, optics.ambient_min_distance);
      out.irradiance[p] = (direct + ambient) * std::exp(-medium.beta * depth);
      out.lit[p] = visible && direct > 0.0 ? 1 : 0;
    }
  });
  return out;
}

double sense(double signal, double read_noise, double full_well, std::uint64_t key) {
  const double sigma = std::sqrt(std::max(0.0, signal) + read_noise * read_noise);
  return std::clamp(signal + sigma * standard_normal(key), 0.0, full_well);
}

Frame render(const Surface& surface, const Optics& optics, const JointView& view,
             std::optional<std::uint64_t> seed) {
  return render(surface, optics, project(surface, view.camera, optics.camera), view, seed);
}

Frame render(const Surface& surface, const Optics& optics, const ProjectionMap& projection,
             const JointView& view, std::optional<std::uint64_t> seed) {
  ModelImages model = render_model(surface, optics, projection, view);
  const int w = projection.width();
  const int h = projection.height();
  Frame frame{ImageD(w, h),
              std::move(model.irradiance),
              std::move(model.backscatter),
              ImageD(w, h),
              std::move(model.lit),
              projection,
              view};
  const auto& albedo = surface.mesh().albedo();
  const double full_well = optics.camera.full_well;
  for (int p = 0; p < w * h; ++p) {
    const int f = projection.face(p);
    const double rho = f >= 0 ? albedo[static_cast<std::size_t>(f)] : 0.0;
    const double signal = rho * frame.irradiance[p] + frame.backscatter[p];
    frame.noiseless[p] = signal;
    frame.intensity[p] =
        seed ? sense(signal, optics.camera.read_noise, full_well,
                     stream_key(*seed, static_cast<std::uint64_t>(view.t),
                                static_cast<std::uint64_t>(p)))
             : std::clamp(signal, 0.0, full_well);
  }
  return frame;
}

double snr(double irradiance, double backscatter, double read_noise, double rho_bar) {
  const double signal = rho_bar * irradiance;
  const double denom = std::sqrt(signal + backscatter + read_noise * read_noise);
  return denom > 0.0 ? signal / denom : 0.0;
}

double snr(const Frame& frame, int pixel, double read_noise, double rho_bar) {
  return snr(frame.irradiance[pixel], frame.backscatter[pixel], read_noise, rho_bar);
}

}  // namespace turbid
