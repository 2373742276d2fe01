#pragma once

#include <vector>

namespace specdim {

// Gauss-Legendre rule mapped to (0,1); weights sum to 1. Rules are built on
// first use (Newton on the Legendre recurrence) and cached per order.
struct GaussLegendre {
  std::vector<double> node;    // ascending, strictly inside (0,1)
  std::vector<double> weight;

  // Cached lookup; the returned reference stays valid for the process
  // lifetime. order must be in [2, 100000].
  static const GaussLegendre& unit(int order);
};

}  // namespace specdim
