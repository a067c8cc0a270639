#pragma once

#include <memory>

#include "turbid/estimation.hpp"
#include "turbid/geometry.hpp"
#include "turbid/radiometry.hpp"
#include "turbid/texture.hpp"

namespace turbid {

/// Everything needed to simulate and evaluate views of one surface:
/// geometry, forward-model optics and the estimator settings.
struct World {
  std::shared_ptr<const Surface> surface;
  Optics optics;
  EstimationConfig estimation;
  std::shared_ptr<const TextureLayout> layout;

  static World make(std::shared_ptr<const Surface> surface, Optics optics,
                    EstimationConfig estimation);

  const TriMesh& mesh() const { return surface->mesh(); }
  TextureMap blank_texture(FusionRule rule = FusionRule::MaximumLikelihood) const {
    return TextureMap(layout, estimation.prior_quality(), rule);
  }
};

}  // namespace turbid
