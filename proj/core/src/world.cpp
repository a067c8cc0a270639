#include "turbid/world.hpp"

#include "turbid/errors.hpp"

namespace turbid {

World World::make(std::shared_ptr<const Surface> surface, Optics optics,
                  EstimationConfig estimation) {
  if (!surface || surface->mesh().empty()) throw DataError("world needs a non-empty surface");
  optics.validate();
  estimation.validate();
  auto layout = std::make_shared<const TextureLayout>(surface->mesh(), estimation.r_min);
  return World{std::move(surface), std::move(optics), std::move(estimation), std::move(layout)};
}

}  // namespace turbid
