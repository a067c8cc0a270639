#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include "turbid/estimation.hpp"

namespace turbid {

/// Texel layout of the albedo atlas. Face k maps linearly onto a right
/// triangle Y[k] with legs of L_k texels, split into L_k^2 equal-area
/// sub-triangles; each sub-triangle is one texel (patch), so the patch
/// count is lambda_k = L_k^2 with L_k = max(1, round(sqrt(|T_k| R_min))).
///
/// In the atlas image each face owns an L_k x L_k block: the upper-left
/// half holds the "upright" sub-triangles, the lower-right half the
/// inverted ones.
class TextureLayout {
 public:
  TextureLayout(const TriMesh& mesh, double r_min);

  std::size_t face_count() const { return side_.size(); }
  std::size_t texel_count() const { return static_cast<std::size_t>(offset_.back()); }
  int side(std::size_t face) const { return side_[face]; }
  int patch_count(std::size_t face) const { return side_[face] * side_[face]; }
  int first_texel(std::size_t face) const { return offset_[face]; }
  int face_of(int texel) const { return texel_face_[static_cast<std::size_t>(texel)]; }
  /// Barycentric weights (w0, w1, w2) of a texel center on its face.
  const Vec3& barycentric(int texel) const { return bary_[static_cast<std::size_t>(texel)]; }
  Vec3 position(const TriMesh& mesh, int texel) const;

  int atlas_width() const { return atlas_width_; }
  int atlas_height() const { return atlas_height_; }
  /// Texel containing the point with barycentric weights (1-u-v, u, v) on
  /// `face`. Points on shared texel edges go to either neighbor.
  int texel_at(std::size_t face, double u, double v) const;

  /// Atlas pixel index of a texel.
  int atlas_pixel(int texel) const { return atlas_pixel_[static_cast<std::size_t>(texel)]; }

 private:
  std::vector<int> side_;
  std::vector<int> offset_;
  std::vector<int> texel_face_;
  std::vector<Vec3> bary_;
  std::vector<int> atlas_pixel_;
  int atlas_width_ = 0;
  int atlas_height_ = 0;
};

enum class FusionRule {
  MaximumLikelihood,  // inverse-variance weighting
  SimpleAverage,      // unweighted mean of all observations
};

/// Accumulated albedo estimate over the texel atlas plus the per-face
/// quality bookkeeping used for planning.
///
/// Texel sums: S0 = sum 1/var, S1 = sum rho/var (ML), and count, sum rho,
/// sum var (simple average). Per face: Q_ML = q0 + sum Q_k(t) and, for the
/// averaging rule, sum 1/Q_k(t) with the observation count.
class TextureMap {
 public:
  TextureMap(std::shared_ptr<const TextureLayout> layout, double prior_quality,
             FusionRule rule = FusionRule::MaximumLikelihood);

  const TextureLayout& layout() const { return *layout_; }
  std::shared_ptr<const TextureLayout> layout_ptr() const { return layout_; }
  FusionRule rule() const { return rule_; }
  double prior_quality() const { return prior_quality_; }

  bool observed(int texel) const { return count_[static_cast<std::size_t>(texel)] > 0; }
  int observation_count(int texel) const { return count_[static_cast<std::size_t>(texel)]; }
  /// Fused albedo under the map's rule; 0 for unobserved texels.
  double value(int texel) const;
  /// Fused variance under the map's rule; the prior variance when unobserved.
  double variance(int texel) const;
  double information_sum(int texel) const { return s0_[static_cast<std::size_t>(texel)]; }
  double weighted_sum(int texel) const { return s1_[static_cast<std::size_t>(texel)]; }

  /// Q^ML_k including the prior.
  double face_quality(std::size_t face) const { return quality_[face]; }
  const std::vector<double>& face_qualities() const { return quality_; }
  int face_observations(std::size_t face) const { return face_obs_[face]; }
  /// Per-face estimation variance under the map's rule.
  double face_variance(std::size_t face) const;
  /// Sum_k lambda_k var_k.
  double total_uncertainty() const;

  /// Folds one view's per-face qualities into the face bookkeeping.
  void add_face_qualities(const std::vector<double>& q);
  /// Adds one (albedo, variance) measurement to a texel.
  void add_measurement(int texel, double albedo, double variance);

  void save(const std::filesystem::path& path) const;
  /// Loads a snapshot; the layout must match the saved one.
  static TextureMap load(const std::filesystem::path& path,
                         std::shared_ptr<const TextureLayout> layout);

  friend bool operator==(const TextureMap&, const TextureMap&) = default;

 private:
  std::shared_ptr<const TextureLayout> layout_;
  double prior_quality_;
  FusionRule rule_;
  std::vector<double> s0_;
  std::vector<double> s1_;
  std::vector<int> count_;
  std::vector<double> sum_value_;
  std::vector<double> sum_variance_;
  std::vector<double> quality_;
  std::vector<double> inv_quality_sum_;
  std::vector<int> face_obs_;
};

/// Resamples each visible face onto its texels and accumulates one
/// measurement per texel: the mean albedo and mean variance of the face's
/// valid pixels inside the texel, or, for texels no pixel falls into, a
/// bilinear sample at the projected texel center. Variances get the
/// resolution weight of the face. Then adds the view's per-face qualities.
/// A face whose image footprint is degenerate is skipped.
void fuse(TextureMap& texture, const DescatteredFrame& frame, const ProjectionMap& projection,
          const TriMesh& mesh, const CameraModel& camera_model, const Pose& camera,
          const EstimationConfig& config);

/// Atlas images of the fused albedo and variance (unused atlas pixels 0).
ImageD atlas_albedo(const TextureMap& texture);
ImageD atlas_variance(const TextureMap& texture);

}  // namespace turbid
