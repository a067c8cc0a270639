#pragma once

#include <span>
#include <vector>

#include "turbid/world.hpp"

namespace turbid {

/// Differential entropy of a Gaussian with variance `variance`, in nats.
/// Throws NumericalError for a nonpositive variance.
double gaussian_entropy(double variance);

/// Information gain 0.5 ln(before / after) in nats.
double info_gain(double variance_before, double variance_after);

inline double nats_to_bits(double nats) { return nats * 1.4426950408889634; }

/// Noise-free per-face quality Q_k a view would deliver, using the
/// operating-point albedo (never the ground truth). Invisible faces get 0.
std::vector<double> prospective_qualities(const World& world, const JointView& view);
std::vector<double> prospective_qualities(const World& world, const ProjectionMap& projection,
                                          const JointView& view);
double prospective_quality(const World& world, const JointView& view, std::size_t face);

struct GainReport {
  double total = 0.0;                 // nats
  std::vector<double> face_gain;      // lambda_k-weighted, nats
  std::vector<double> face_quality;   // Q_k(t+1)
  std::vector<bool> unobserved;       // Q_k(t+1) == 0

  double total_bits() const { return nats_to_bits(total); }
};

/// Segment-level information gain sum_k lambda_k/2 ln(1 + Q_k / Q^ML_k)
/// of a view with per-face qualities `q` against the current face
/// qualities. The texture is not modified.
GainReport view_gain(const TextureLayout& layout, std::span<const double> face_quality,
                     const std::vector<double>& q);
GainReport view_gain(const World& world, const TextureMap& texture, const JointView& view);

/// Information gain of a sequence of per-view qualities starting from the
/// given face qualities: sum_k lambda_k/2 ln(Q_end / Q_start).
double path_gain(const TextureLayout& layout, std::span<const double> face_quality,
                 std::span<const std::vector<double>> view_qualities);
double path_gain(const World& world, const TextureMap& texture, std::span<const JointView> path);

}  // namespace turbid
