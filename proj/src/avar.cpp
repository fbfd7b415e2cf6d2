#include "superhedge/avar.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "superhedge/error.hpp"

namespace superhedge {

double avar_discrete(std::span<const double> values, std::span<const double> weights, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) fail(ErrorKind::LevelError, "AV@R level must lie in (0,1]");
  if (values.size() != weights.size()) fail(ErrorKind::ShapeError, "values and weights differ in length");
  if (values.empty()) fail(ErrorKind::EmptySample, "AV@R of an empty distribution");

  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });

  double remaining = alpha;
  double acc = 0.0;
  for (std::size_t idx : order) {
    const double take = std::min(weights[idx], remaining);
    acc += take * values[idx];
    remaining -= take;
    if (remaining <= 0.0) break;
  }
  // Weights summing marginally below one leave dust; charge it to the minimum.
  if (remaining > 0.0) acc += remaining * values[order.back()];
  return acc / alpha;
}

}  // namespace superhedge
