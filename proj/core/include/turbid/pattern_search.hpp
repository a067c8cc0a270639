#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace turbid {

/// Generalized pattern search (compass poll, maximization).
///
/// Each iteration polls the 2n points x +/- delta * scale_i * e_i (plus the
/// diagonals when requested). With a complete poll the best improving point
/// is taken (lowest poll index on ties); an opportunistic poll takes the
/// first improvement. On success the mesh size delta is kept (or expanded),
/// on failure it is halved. Points outside the
/// bounds are not evaluated. The objective may return -inf for infeasible
/// points.
struct PatternSearchOptions {
  int max_iterations = 20;
  int max_evaluations = -1;   // < 0: unlimited
  double min_delta = 1e-9;    // stop once delta drops below this
  bool complete_poll = true;
  /// Mesh-size factor applied after a successful poll (1 keeps delta).
  double expansion = 1.0;
  /// Adds the 2n(n-1) diagonal directions +-e_i +-e_j to the poll set.
  bool diagonal_poll = false;
};

struct PatternSearchResult {
  std::vector<double> x;
  double value = 0.0;
  double initial_value = 0.0;
  double delta = 1.0;  // final mesh size (multiplies the scales)
  int iterations = 0;
  int evaluations = 0;
  /// Best objective after each iteration; non-decreasing.
  std::vector<double> history;
  std::string variant;  // poll set and step rule used
};

using Objective = std::function<double(std::span<const double>)>;

PatternSearchResult pattern_search(const Objective& objective, std::vector<double> x0,
                                   std::span<const double> scale, std::span<const double> lower,
                                   std::span<const double> upper,
                                   const PatternSearchOptions& options = {});

}  // namespace turbid
