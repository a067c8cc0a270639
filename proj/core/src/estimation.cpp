#include "turbid/estimation.hpp"

#include <cmath>

#include "turbid/errors.hpp"

namespace turbid {

void OperatingPoint::validate() const {
  if (!(rho_bar > 0.0 && rho_bar <= 1.0)) throw DataError("operating albedo must lie in (0, 1]");
}

void EstimationConfig::validate() const {
  if (!(r_min > 0.0)) throw DataError("R_min must be positive");
  operating_point.validate();
  if (!(eta >= 0.0)) throw DataError("resolution penalty eta must be nonnegative");
  if (!(prior_sigma > 0.0)) throw DataError("prior sigma must be positive");
  if (e_min && !(*e_min >= 0.0)) throw DataError("E_min must be nonnegative");
}

ImageD model_variance(const ImageD& irradiance, const ImageD& backscatter,
                      const ProjectionMap& projection, const EstimationConfig& config,
                      double read_noise) {
  const double prior = config.prior_sigma * config.prior_sigma;
  const double threshold = config.irradiance_threshold(read_noise);
  const double rho_bar = config.operating_point.rho_bar;
  const double rn2 = read_noise * read_noise;
  ImageD var(irradiance.width(), irradiance.height(), prior);
  for (int p = 0; p < var.size(); ++p) {
    const double e = irradiance[p];
    if (projection.face(p) < 0 || !(e >= threshold) || e <= 0.0) continue;
    var[p] = (rho_bar * e + backscatter[p] + rn2) / (e * e);
  }
  return var;
}

ImageD condition_irradiance(const ImageD& irradiance, const ImageD& intensity,
                            const ImageD& raw_albedo, const ConditioningConfig& config) {
  Mask w(raw_albedo.width(), raw_albedo.height(), 0);
  for (int p = 0; p < w.size(); ++p) w[p] = raw_albedo[p] > 1.0 ? 1 : 0;
  w = dilate(w, config.mask_dilation);
  const ImageD e_smooth = gaussian_blur(irradiance, config.sigma_irradiance);
  const ImageD i_smooth = gaussian_blur(intensity, config.sigma_intensity);
  ImageD blend(irradiance.width(), irradiance.height());
  for (int p = 0; p < blend.size(); ++p) blend[p] = w[p] ? i_smooth[p] : e_smooth[p];
  return gaussian_blur(blend, config.sigma_total);
}

DescatteredFrame descatter(const Frame& frame, const EstimationConfig& config, double read_noise,
                           double full_well) {
  const int w = frame.intensity.width();
  const int h = frame.intensity.height();
  const double threshold = config.irradiance_threshold(read_noise);
  DescatteredFrame out{ImageD(w, h), model_variance(frame.irradiance, frame.backscatter,
                                                    frame.projection, config, read_noise),
                       Mask(w, h, 0)};
  for (int p = 0; p < w * h; ++p) {
    const double e = frame.irradiance[p];
    if (frame.projection.face(p) < 0 || !(e >= threshold) || e <= 0.0) continue;
    if (frame.intensity[p] >= full_well) {
      out.variance[p] = config.prior_sigma * config.prior_sigma;
      continue;
    }
    out.valid[p] = 1;
    out.albedo[p] = (frame.intensity[p] - frame.backscatter[p]) / e;
  }
  if (config.conditioning.enabled) {
    const ImageD stable =
        condition_irradiance(frame.irradiance, frame.intensity, out.albedo, config.conditioning);
    for (int p = 0; p < w * h; ++p) {
      if (out.valid[p] && stable[p] > 0.0) {
        out.albedo[p] = (frame.intensity[p] - frame.backscatter[p]) / stable[p];
      }
    }
  }
  return out;
}

double resolution_weight(double variance, double gamma, double eta) {
  if (gamma < 1.0) return variance * std::exp(eta * (1.0 / gamma - 1.0));
  return variance / gamma;
}

double resolution_weight(std::span<const double> variances, double gamma, double eta) {
  if (variances.empty()) return 0.0;
  double sum = 0.0;
  for (double v : variances) sum += v;
  return resolution_weight(sum / static_cast<double>(variances.size()), gamma, eta);
}

std::vector<double> segment_qualities(const ProjectionMap& projection, const ImageD& variance,
                                      const TriMesh& mesh, const EstimationConfig& config) {
  std::vector<double> q(mesh.face_count(), 0.0);
  for (std::size_t k = 0; k < mesh.face_count(); ++k) {
    const auto pixels = projection.pixels_of(k);
    if (pixels.empty()) continue;
    double sum_sigma = 0.0;
    for (int p : pixels) sum_sigma += std::sqrt(variance[p]);
    const double mean_sigma = sum_sigma / static_cast<double>(pixels.size());
    const double gamma = static_cast<double>(pixels.size()) / mesh.area(k) / config.r_min;
    double inv_q = mean_sigma * mean_sigma;
    if (gamma < 1.0) {
      const double s = mean_sigma * std::exp(config.eta * (1.0 / gamma - 1.0));
      inv_q = s * s;
    } else {
      inv_q /= gamma;
    }
    q[k] = inv_q > 0.0 && std::isfinite(inv_q) ? 1.0 / inv_q : 0.0;
  }
  return q;
}

}  // namespace turbid
