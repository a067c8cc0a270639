#include "turbid/pattern_search.hpp"

#include <cmath>
#include <limits>

#include "turbid/errors.hpp"
#include "turbid/parallel.hpp"

namespace turbid {

PatternSearchResult pattern_search(const Objective& objective, std::vector<double> x0,
                                   std::span<const double> scale, std::span<const double> lower,
                                   std::span<const double> upper,
                                   const PatternSearchOptions& options) {
  const std::size_t n = x0.size();
  if (scale.size() != n || lower.size() != n || upper.size() != n) {
    throw DataError("pattern search: dimension mismatch");
  }
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();

  PatternSearchResult result;
  result.x = std::move(x0);
  result.value = objective(result.x);
  result.initial_value = result.value;
  result.evaluations = 1;
  result.delta = 1.0;

  // Poll directions in scaled coordinates.
  std::vector<std::vector<double>> dirs;
  for (std::size_t i = 0; i < n; ++i) {
    for (double sign : {1.0, -1.0}) {
      std::vector<double> d(n, 0.0);
      d[i] = sign;
      dirs.push_back(std::move(d));
    }
  }
  if (options.diagonal_poll) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        for (double si : {1.0, -1.0}) {
          for (double sj : {1.0, -1.0}) {
            std::vector<double> d(n, 0.0);
            d[i] = si;
            d[j] = sj;
            dirs.push_back(std::move(d));
          }
        }
      }
    }
  }
  result.variant = std::string(options.diagonal_poll ? "GPS compass + diagonals" : "GPS compass 2n") +
                   (options.complete_poll ? ", complete poll" : ", opportunistic poll") +
                   (options.expansion > 1.0 ? ", expand on success" : ", keep step on success") +
                   ", halve on failure";

  const auto polls = static_cast<int>(dirs.size());
  std::vector<std::vector<double>> points(static_cast<std::size_t>(polls));
  std::vector<double> values(static_cast<std::size_t>(polls));
  std::vector<char> feasible(static_cast<std::size_t>(polls));

  for (int it = 0; it < options.max_iterations; ++it) {
    if (result.delta < options.min_delta) break;
    if (options.max_evaluations >= 0 && result.evaluations >= options.max_evaluations) break;
    for (int d = 0; d < polls; ++d) {
      const auto& dir = dirs[static_cast<std::size_t>(d)];
      auto& p = points[static_cast<std::size_t>(d)];
      p = result.x;
      bool inside = true;
      for (std::size_t i = 0; i < n; ++i) {
        if (dir[i] == 0.0) continue;
        p[i] += dir[i] * result.delta * scale[i];
        inside = inside && p[i] >= lower[i] && p[i] <= upper[i];
      }
      feasible[static_cast<std::size_t>(d)] = inside;
      values[static_cast<std::size_t>(d)] = kNegInf;
    }

    int best = -1;
    double best_value = result.value;
    if (options.complete_poll) {
      parallel_for(polls, [&](int d) {
        if (feasible[static_cast<std::size_t>(d)]) {
          values[static_cast<std::size_t>(d)] = objective(points[static_cast<std::size_t>(d)]);
        }
      });
      for (int d = 0; d < polls; ++d) {
        if (!feasible[static_cast<std::size_t>(d)]) continue;
        ++result.evaluations;
        if (values[static_cast<std::size_t>(d)] > best_value) {
          best_value = values[static_cast<std::size_t>(d)];
          best = d;
        }
      }
    } else {
      for (int d = 0; d < polls; ++d) {
        if (!feasible[static_cast<std::size_t>(d)]) continue;
        const double v = objective(points[static_cast<std::size_t>(d)]);
        ++result.evaluations;
        if (v > best_value) {
          best_value = v;
          best = d;
          break;
        }
      }
    }

    if (best >= 0) {
      result.x = points[static_cast<std::size_t>(best)];
      result.value = best_value;
      result.delta *= options.expansion;
    } else {
      result.delta *= 0.5;
    }
    ++result.iterations;
    result.history.push_back(result.value);
  }
  return result;
}

}  // namespace turbid
