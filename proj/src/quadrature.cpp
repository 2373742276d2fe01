#include "specdim/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "specdim/errors.hpp"

namespace specdim {
namespace {

// Legendre P_n(x) and P_n'(x) by the three-term recurrence.
void legendre(int n, double x, double* p, double* dp) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  *p = p1;
  *dp = n * (x * p1 - p0) / (x * x - 1.0);
}

std::unique_ptr<GaussLegendre> build(int n) {
  auto rule = std::make_unique<GaussLegendre>();
  rule->node.resize(n);
  rule->weight.resize(n);
  // Roots come in +- pairs; solve the upper half with Newton from the
  // Chebyshev-like initial guess and mirror.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p = 0.0, dp = 1.0;
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
      legendre(n, x, &p, &dp);
      double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw NumericError("Gauss-Legendre node failed to converge, order " +
                         std::to_string(n));
    }
    legendre(n, x, &p, &dp);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // map [-1,1] -> (0,1); x descends as i grows, so mirror into ascending
    rule->node[i] = 0.5 * (1.0 - x);
    rule->node[n - 1 - i] = 0.5 * (1.0 + x);
    rule->weight[i] = 0.5 * w;
    rule->weight[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

}  // namespace

const GaussLegendre& GaussLegendre::unit(int order) {
  if (order < 2 || order > 100000) {
    throw std::invalid_argument("Gauss-Legendre order out of range: " +
                                std::to_string(order));
  }
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussLegendre>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) {
    it = cache.emplace(order, build(order)).first;
  }
  return *it->second;
}

}  // namespace specdim
