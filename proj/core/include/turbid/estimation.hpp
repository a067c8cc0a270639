#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "turbid/geometry.hpp"
#include "turbid/image.hpp"
#include "turbid/radiometry.hpp"

namespace turbid {

/// Typical albedo used to predict noise before the true albedo is known.
struct OperatingPoint {
  double rho_bar = 0.5;
  void validate() const;
};

struct ConditioningConfig {
  bool enabled = false;
  double sigma_irradiance = 3.0;  // h_E [px]
  double sigma_intensity = 3.0;   // h_I [px]
  double sigma_total = 1.0;       // h_T [px]
  int mask_dilation = 2;          // [px]
};

struct EstimationConfig {
  double r_min = 50000.0;  // required resolution [px / m^2]
  OperatingPoint operating_point;
  double eta = 10.0;        // resolution penalty constant
  double prior_sigma = 10.0;  // albedo prior standard deviation
  std::optional<double> e_min;  // irradiance threshold [e]; defaults to read noise
  ConditioningConfig conditioning;

  double prior_quality() const { return 1.0 / (prior_sigma * prior_sigma); }
  double irradiance_threshold(double read_noise) const { return e_min.value_or(read_noise); }
  void validate() const;
};

/// Per-pixel albedo estimate and its variance. Invalid pixels (not on an
/// observed face, or with E below threshold) carry the prior variance.
struct DescatteredFrame {
  ImageD albedo;
  ImageD variance;
  Mask valid;
};

/// Modeled per-pixel variance (rho_bar E + B + read_noise^2) / E^2 with the
/// prior variance wherever E is below threshold or no face is observed.
ImageD model_variance(const ImageD& irradiance, const ImageD& backscatter,
                      const ProjectionMap& projection, const EstimationConfig& config,
                      double read_noise);

/// Stabilized irradiance: blend of E * h_E and I * h_I on a (dilated) mask
/// of raw albedo > 1, smoothed by h_T.
ImageD condition_irradiance(const ImageD& irradiance, const ImageD& intensity,
                            const ImageD& raw_albedo, const ConditioningConfig& config);

/// Inverts I = rho E + B. The denominator is the conditioned irradiance when
/// conditioning is enabled in `config`, else the model E itself. Pixels at
/// or above `full_well` are saturated and treated as invalid.
DescatteredFrame descatter(const Frame& frame, const EstimationConfig& config, double read_noise,
                           double full_well = std::numeric_limits<double>::infinity());

/// Resolution-adjusted variance for scale ratio gamma = R / R_min: penalized
/// by exp(eta (1/gamma - 1)) below 1, averaged down by 1/gamma above.
double resolution_weight(double variance, double gamma, double eta);
/// Same for a set of pixel variances; gamma >= 1 gives sum / (gamma |U|).
double resolution_weight(std::span<const double> variances, double gamma, double eta);

/// Per-face quality Q_k of one view from its variance image: the mean pixel
/// standard deviation over the face, scaled by the resolution factor.
/// Invisible faces get 0.
std::vector<double> segment_qualities(const ProjectionMap& projection, const ImageD& variance,
                                      const TriMesh& mesh, const EstimationConfig& config);

}  // namespace turbid
