#pragma once

#include <stdexcept>
#include <string>

namespace turbid {

// Bad or inconsistent input data: malformed files, out-of-range parameters,
// meshes that violate their invariants.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation that cannot produce a meaningful answer, e.g. an
// unidentifiable fit or a degenerate light placement.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace turbid
