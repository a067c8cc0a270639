#pragma once

#include <cstdint>
#include <optional>

#include "turbid/bvh.hpp"
#include "turbid/geometry.hpp"
#include "turbid/image.hpp"

namespace turbid {

/// Homogeneous single-scattering medium.
struct Medium {
  double beta = 0.0;  // extinction coefficient [1/m]
  double g = 0.0;     // Henyey-Greenstein anisotropy
  double scattering_fraction = 1.0;  // sigma_s / beta
  /// Ambient gain kappa_A [m^2]; defaults to kDefaultAmbientPerBeta * beta.
  std::optional<double> ambient_gain;
  bool ambient_enabled = true;

  static constexpr double kDefaultAmbientPerBeta = 5e-5;

  double scattering() const { return scattering_fraction * beta; }
  double ambient() const;
  void validate() const;
};

/// Spot light with a hard cone edge and no lateral falloff inside it.
struct SpotLight {
  Pose pose;
  double intensity = 1.0;  // C0 [e m^2]
  double half_angle = 0.6;  // [rad]

  void validate() const;
};

struct SurfacePoint {
  Vec3 position;
  Vec3 normal;  // unit
};

/// Henyey-Greenstein phase function per steradian.
double hg_phase(double cos_theta, double g);

/// Direct irradiance from the light, attenuated along the light path and
/// foreshortened by the Lambertian cosine. Zero when not visible; throws
/// NumericalError when the light coincides with the point.
double direct_irradiance(const SurfacePoint& s, const SpotLight& light, const Medium& medium,
                         bool visible);

/// Ambient irradiance from off-axis scattering of the beam. The beam-axis
/// point z nearest to s anchors the two path lengths; both are clamped
/// below at `min_distance`. Zero when z falls behind the source.
double ambient_irradiance(const Vec3& s, const SpotLight& light, const Medium& medium,
                          double min_distance);

/// Single-scattered radiance along `ray` up to `length` (midpoint rule with
/// `samples` nodes). An infinite length integrates to 5 / beta.
double backscatter(const Ray& ray, double length, const SpotLight& light, const Medium& medium,
                   int samples);

/// Forward model parameters shared by every view of a scene.
struct Optics {
  CameraModel camera;
  Medium medium;
  double light_intensity = 1.0;
  double light_half_angle = 0.6;
  int backscatter_samples = 64;
  double ambient_min_distance = 0.05;  // [m]

  SpotLight light_at(const Pose& pose) const { return {pose, light_intensity, light_half_angle}; }
  void validate() const;
};

/// Noise-free model images of a view: E(x) is the effective irradiance
/// transported to the camera, B(x) the backscatter. `lit` marks observed
/// pixels that receive direct light.
struct ModelImages {
  ImageD irradiance;
  ImageD backscatter;
  Mask lit;
};

ModelImages render_model(const Surface& surface, const Optics& optics,
                         const ProjectionMap& projection, const JointView& view);

struct Frame {
  ImageD intensity;    // I(x), photoelectrons, clamped to [0, full well]
  ImageD irradiance;   // E(x)
  ImageD backscatter;  // B(x)
  ImageD noiseless;    // rho E + B
  Mask lit;
  ProjectionMap projection;
  JointView view;
};

/// Noisy sensor reading of a noise-free signal: Gaussian with variance
/// signal + read_noise^2, clamped to [0, full_well].
double sense(double signal, double read_noise, double full_well, std::uint64_t key);

/// Renders I, E and B for a view. Without a seed the intensity is the
/// noise-free signal (still clamped to the full well).
Frame render(const Surface& surface, const Optics& optics, const JointView& view,
             std::optional<std::uint64_t> seed = std::nullopt);
Frame render(const Surface& surface, const Optics& optics, const ProjectionMap& projection,
             const JointView& view, std::optional<std::uint64_t> seed = std::nullopt);

/// rho_bar E / sqrt(rho_bar E + B + read_noise^2).
double snr(double irradiance, double backscatter, double read_noise, double rho_bar);
double snr(const Frame& frame, int pixel, double read_noise, double rho_bar);

}  // namespace turbid
