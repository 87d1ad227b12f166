#pragma once

// Element marking strategies operating on squared indicator values.

#include <vector>

namespace emoc {

// Bulk-chasing (Doerfler) marking: the smallest prefix of elements in
// descending indicator order whose squared sum reaches theta times the
// total.  Ties break toward lower element ids; the result is sorted
// ascending.  Empty exactly when the total vanishes.
std::vector<int> doerfler_mark(const std::vector<double>& eta_sq, double theta);

// Maximum strategy: all elements with eta_sq >= gamma^2 * max(eta_sq).
std::vector<int> maximum_mark(const std::vector<double>& eta_sq, double gamma);

} // namespace emoc
