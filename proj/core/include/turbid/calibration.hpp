#pragma once

#include <memory>
#include <string>
#include <vector>

#include "turbid/radiometry.hpp"

namespace turbid {

/// A flat reference sheet imaged from a known joint pose. The medium inside
/// `optics` only contributes its scattering fraction, ambient gain setting
/// and ambient flag; beta and g are what gets fitted.
struct CalibrationSetup {
  std::shared_ptr<const Surface> surface;
  Optics optics;
  JointView view;
  ImageD image;
  double reference_albedo = 1.0;
};

struct CalibrationBounds {
  double beta_min = 1e-3;  // [1/m]
  double beta_max = 10.0;
  double g_min = -0.9;
  double g_max = 0.9;
  int beta_points = 16;
  double g_step = 0.1;
  int refine_polls = 50;

  void validate() const;
};

struct CalibrationResult {
  double beta = 0.0;
  double g = 0.0;
  double residual = 0.0;  // Frobenius norm over the unsaturated pixels
  bool weak_g = false;    // residual varies < 1% along g at the fitted beta
  int evaluations = 0;
  std::vector<std::string> warnings;
};

/// Least-squares fit of (beta, g) to the reference image: log-spaced beta
/// grid x g grid, then pattern-search refinement in (ln beta, g). Pixels
/// saturated in the image are ignored. Throws NumericalError
/// ("unidentifiable") when the residual is flat over the grid.
CalibrationResult fit_medium(const CalibrationSetup& setup, const CalibrationBounds& bounds = {});

/// Residual norm of the forward model at (beta, g); exposed for tests.
double calibration_residual(const CalibrationSetup& setup, double beta, double g);

}  // namespace turbid
