#include "emoc/marking.hpp"

#include <algorithm>
#include <numeric>

#include "emoc/errors.hpp"

namespace emoc {

std::vector<int> doerfler_mark(const std::vector<double>& eta_sq,
                               double theta) {
  if (!(theta > 0.0) || !(theta < 1.0))
    throw InputError("doerfler_mark: theta must lie in (0, 1)");
  for (double v : eta_sq)
    if (v < 0.0)
      throw InputError("doerfler_mark: negative squared indicator");

  const double total = std::accumulate(eta_sq.begin(), eta_sq.end(), 0.0);
  if (total <= 0.0)
    return {};

  std::vector<int> order(eta_sq.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return eta_sq[static_cast<size_t>(a)] > eta_sq[static_cast<size_t>(b)];
  });

  std::vector<int> marked;
  double acc = 0.0;
  for (int t : order) {
    marked.push_back(t);
    acc += eta_sq[static_cast<size_t>(t)];
    if (acc >= theta * total)
      break;
  }
  std::sort(marked.begin(), marked.end());
  return marked;
}

std::vector<int> maximum_mark(const std::vector<double>& eta_sq, double gamma) {
  if (!(gamma > 0.0) || !(gamma <= 1.0))
    throw InputError("maximum_mark: gamma must lie in (0, 1]");
  double mx = 0.0;
  for (double v : eta_sq) {
    if (v < 0.0)
      throw InputError("maximum_mark: negative squared indicator");
    mx = std::max(mx, v);
  }
  std::vector<int> marked;
  if (mx <= 0.0)
    return marked;
  const double cut = gamma * gamma * mx;
  for (size_t t = 0; t < eta_sq.size(); ++t)
    if (eta_sq[t] >= cut)
      marked.push_back(static_cast<int>(t));
  return marked;
}

} // namespace emoc
