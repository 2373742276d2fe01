#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "specdim/interval.hpp"

namespace specdim {

// Finite purely atomic measure. Positions are strictly increasing and all
// weights positive; cum[i] = w_0 + ... + w_i gives O(log M) ball masses.
struct AtomicMeasure {
  std::vector<double> atoms;
  std::vector<double> weights;
  std::vector<double> cum;
  double total = 0.0;

  AtomicMeasure(std::vector<double> atoms_in, std::vector<double> weights_in);

  std::size_t size() const { return atoms.size(); }
  double min_gap() const;  // +inf for a single atom
  // Sum of the first k weights (k = 0..size()); exact prefix lookup.
  double prefix(std::size_t k) const { return k == 0 ? 0.0 : cum[k - 1]; }
};

// Absolutely continuous measure given by a closed-form CDF and quantile.
// cdf maps [support.lo, support.hi] onto [0, total] and quantile inverts it.
// Construction spot-checks |cdf(quantile(u)) - u| <= 1e-9 * total on a grid.
struct DensityMeasure {
  Interval support;
  std::function<double(double)> cdf;
  std::function<double(double)> quantile;
  double total = 0.0;
  std::string label;

  DensityMeasure(Interval support_in, std::function<double(double)> cdf_in,
                 std::function<double(double)> quantile_in, double total_in,
                 std::string label_in);
};

struct Measure;

// Nonnegative combination sum_i coef_i * component_i.
struct MixtureMeasure {
  std::vector<std::pair<double, std::shared_ptr<const Measure>>> components;

  explicit MixtureMeasure(
      std::vector<std::pair<double, std::shared_ptr<const Measure>>> comps);
};

struct Measure {
  std::variant<AtomicMeasure, DensityMeasure, MixtureMeasure> rep;

  Measure(AtomicMeasure m) : rep(std::move(m)) {}
  Measure(DensityMeasure m) : rep(std::move(m)) {}
  Measure(MixtureMeasure m) : rep(std::move(m)) {}

  double total() const;
  const AtomicMeasure* as_atomic() const {
    return std::get_if<AtomicMeasure>(&rep);
  }
};

Measure make_atomic(std::vector<double> atoms, std::vector<double> weights);
Measure make_uniform(double a, double b);
// Density 0.5 * x^-(theta+1/2) on [0,1]; requires theta in (-1/2, 1/2).
// CDF(x) = x^a / (2a) with a = 1/2 - theta; total = 1/(2a).
Measure make_power_law(double theta);
// Level-L approximation of the Cantor measure: 2^L atoms of weight 2^-L at
// the left endpoints of the level-L construction intervals. Ball masses are
// exact down to scale 3^-L. level in [1, 20].
Measure make_cantor(int level = 16);
Measure make_mixture(std::vector<std::pair<double, Measure>> components);

// mu([x - eps, x + eps]); balls are closed, so atomic masses are
// right-continuous in eps and boundary atoms count.
double ball_mass(const Measure& m, double x, double eps);
// mu((-inf, x]) and its left limit mu((-inf, x)). The two bracket atoms:
// ball_mass(m, x, e) == cdf(m, x+e) - cdf_left(m, x-e) exactly.
double cdf(const Measure& m, double x);
double cdf_left(const Measure& m, double x);
// Generalized inverse: smallest support point with cdf >= u, u in [0, total].
double quantile(const Measure& m, double u);
// Integral of g against mu. Atomic parts are exact weighted sums in atom
// order; density parts use `nodes`-point Gauss-Legendre in quantile
// coordinates. Throws NumericError if g is non-finite at an evaluation point.
double integrate_mu(const Measure& m, const std::function<double(double)>& g,
                    int nodes = 2048);
// Smallest closed interval containing the support.
Interval support_interval(const Measure& m);

}  // namespace specdim
