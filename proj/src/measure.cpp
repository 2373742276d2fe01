#include "specdim/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "specdim/errors.hpp"
#include "specdim/quadrature.hpp"

namespace specdim {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + " must be finite");
  }
}

}  // namespace

AtomicMeasure::AtomicMeasure(std::vector<double> atoms_in,
                             std::vector<double> weights_in)
    : atoms(std::move(atoms_in)), weights(std::move(weights_in)) {
  if (atoms.empty()) {
    throw std::invalid_argument("atomic measure needs at least one atom");
  }
  if (atoms.size() != weights.size()) {
    throw std::invalid_argument("atoms and weights differ in length");
  }
  cum.resize(atoms.size());
  double running = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    require_finite(atoms[i], "atom position");
    if (i > 0 && !(atoms[i - 1] < atoms[i])) {
      throw std::invalid_argument("atom positions must be strictly increasing");
    }
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      throw std::invalid_argument("atom weights must be positive and finite");
    }
    running += weights[i];
    cum[i] = running;
  }
  total = running;
}

double AtomicMeasure::min_gap() const {
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < atoms.size(); ++i) {
    g = std::min(g, atoms[i] - atoms[i - 1]);
  }
  return g;
}

DensityMeasure::DensityMeasure(Interval support_in,
                               std::function<double(double)> cdf_in,
                               std::function<double(double)> quantile_in,
                               double total_in, std::string label_in)
    : support(support_in),
      cdf(std::move(cdf_in)),
      quantile(std::move(quantile_in)),
      total(total_in),
      label(std::move(label_in)) {
  if (!(support.lo < support.hi)) {
    throw std::invalid_argument("density support must be a proper interval");
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw std::invalid_argument("density total must be positive and finite");
  }
  if (!cdf || !quantile) {
    throw std::invalid_argument("density needs cdf and quantile callables");
  }
  const double tol = 1e-9 * total;
  if (std::abs(cdf(support.lo)) > tol || std::abs(cdf(support.hi) - total) > tol) {
    throw std::invalid_argument("density cdf must run from 0 to total over the support");
  }
  // spot-check the cdf/quantile round trip on an interior grid
  double prev = -std::numeric_limits<double>::infinity();
  for (int i = 1; i < 32; ++i) {
    const double u = total * i / 32.0;
    const double x = quantile(u);
    if (!(x >= support.lo && x <= support.hi)) {
      throw std::invalid_argument("density quantile leaves the support");
    }
    const double f = cdf(x);
    if (f < prev - tol) {
      throw std::invalid_argument("density cdf is not nondecreasing");
    }
    prev = f;
    if (std::abs(f - u) > tol) {
      throw std::invalid_argument("density cdf(quantile(u)) differs from u");
    }
  }
}

MixtureMeasure::MixtureMeasure(
    std::vector<std::pair<double, std::shared_ptr<const Measure>>> comps)
    : components(std::move(comps)) {
  if (components.empty()) {
    throw std::invalid_argument("mixture needs at least one component");
  }
  for (const auto& [coef, part] : components) {
    if (!(coef > 0.0) || !std::isfinite(coef)) {
      throw std::invalid_argument("mixture coefficients must be positive and finite");
    }
    if (!part) {
      throw std::invalid_argument("mixture component is null");
    }
  }
}

double Measure::total() const {
  return std::visit(
      [](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, AtomicMeasure> ||
                      std::is_same_v<T, DensityMeasure>) {
          return m.total;
        } else {
          double sum = 0.0;
          for (const auto& [coef, part] : m.components) {
            sum += coef * part->total();
          }
          return sum;
        }
      },
      rep);
}

Measure make_atomic(std::vector<double> atoms, std::vector<double> weights) {
  return Measure(AtomicMeasure(std::move(atoms), std::move(weights)));
}

Measure make_uniform(double a, double b) {
  require_finite(a, "uniform endpoint");
  require_finite(b, "uniform endpoint");
  if (!(a < b)) {
    throw std::invalid_argument("uniform measure needs a < b");
  }
  const double len = b - a;
  return Measure(DensityMeasure(
      {a, b}, [a](double x) { return x - a; },
      [a](double u) { return a + u; }, len,
      "uniform[" + std::to_string(a) + "," + std::to_string(b) + "]"));
}

Measure make_power_law(double theta) {
  require_finite(theta, "theta");
  if (!(theta > -0.5 && theta < 0.5)) {
    throw std::invalid_argument("power law needs theta in (-1/2, 1/2)");
  }
  const double a = 0.5 - theta;  // CDF(x) = x^a / (2a), total = 1/(2a)
  const double total = 1.0 / (2.0 * a);
  return Measure(DensityMeasure(
      {0.0, 1.0},
      [a, total](double x) {
        if (x <= 0.0) return 0.0;
        if (x >= 1.0) return total;
        return std::pow(x, a) * total;
      },
      [a](double u) { return std::pow(2.0 * a * u, 1.0 / a); }, total,
      "power_law(theta=" + std::to_string(theta) + ")"));
}

Measure make_cantor(int level) {
  if (level < 1 || level > 20) {
    throw std::invalid_argument("cantor level must lie in [1, 20]");
  }
  const std::size_t count = std::size_t{1} << level;
  // pow3[k] = 3^-(k+1), built by repeated division for determinism
  std::vector<double> pow3(static_cast<std::size_t>(level));
  double p = 1.0;
  for (int k = 0; k < level; ++k) {
    p /= 3.0;
    pow3[static_cast<std::size_t>(k)] = p;
  }
  std::vector<double> atoms(count);
  for (std::size_t idx = 0; idx < count; ++idx) {
    // binary digits of idx (msb first) pick the 0/2 ternary digits, so
    // ascending idx enumerates left endpoints in increasing order
    double x = 0.0;
    for (int k = 0; k < level; ++k) {
      if ((idx >> (level - 1 - k)) & 1u) {
        x += 2.0 * pow3[static_cast<std::size_t>(k)];
      }
    }
    atoms[idx] = x;
  }
  std::vector<double> weights(count, std::ldexp(1.0, -level));
  return make_atomic(std::move(atoms), std::move(weights));
}

Measure make_mixture(std::vector<std::pair<double, Measure>> components) {
  std::vector<std::pair<double, std::shared_ptr<const Measure>>> parts;
  parts.reserve(components.size());
  for (auto& [coef, m] : components) {
    parts.emplace_back(coef, std::make_shared<const Measure>(std::move(m)));
  }
  return Measure(MixtureMeasure(std::move(parts)));
}

double ball_mass(const Measure& m, double x, double eps) {
  require_finite(x, "ball center");
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("ball radius must be positive and finite");
  }
  return std::visit(
      [&](const auto& part) -> double {
        using T = std::decay_t<decltype(part)>;
        if constexpr (std::is_same_v<T, AtomicMeasure>) {
          // closed ball: atoms at both endpoints count
          const auto lo = std::lower_bound(part.atoms.begin(), part.atoms.end(),
                                           x - eps) -
                          part.atoms.begin();
          const auto hi = std::upper_bound(part.atoms.begin(), part.atoms.end(),
                                           x + eps) -
                          part.atoms.begin();
          return part.prefix(static_cast<std::size_t>(hi)) -
                 part.prefix(static_cast<std::size_t>(lo));
        } else if constexpr (std::is_same_v<T, DensityMeasure>) {
          const double f_hi =
              x + eps >= part.support.hi ? part.total
              : x + eps <= part.support.lo ? 0.0
                                           : part.cdf(x + eps);
          const double f_lo =
              x - eps <= part.support.lo ? 0.0
              : x - eps >= part.support.hi ? part.total
                                           : part.cdf(x - eps);
          return std::max(0.0, f_hi - f_lo);
        } else {
          double sum = 0.0;
          for (const auto& [coef, sub] : part.components) {
            sum += coef * ball_mass(*sub, x, eps);
          }
          return sum;
        }
      },
      m.rep);
}

double cdf(const Measure& m, double x) {
  require_finite(x, "cdf argument");
  return std::visit(
      [&](const auto& part) -> double {
        using T = std::decay_t<decltype(part)>;
        if constexpr (std::is_same_v<T, AtomicMeasure>) {
          const auto k = std::upper_bound(part.atoms.begin(), part.atoms.end(),
                                          x) -
                         part.atoms.begin();
          return part.prefix(static_cast<std::size_t>(k));
        } else if constexpr (std::is_same_v<T, DensityMeasure>) {
          if (x <= part.support.lo) return 0.0;
          if (x >= part.support.hi) return part.total;
          return std::clamp(part.cdf(x), 0.0, part.total);
        } else {
          double sum = 0.0;
          for (const auto& [coef, sub] : part.components) {
            sum += coef * cdf(*sub, x);
          }
          return sum;
        }
      },
      m.rep);
}

double cdf_left(const Measure& m, double x) {
  require_finite(x, "cdf argument");
  return std::visit(
      [&](const auto& part) -> double {
        using T = std::decay_t<decltype(part)>;
        if constexpr (std::is_same_v<T, AtomicMeasure>) {
          const auto k = std::lower_bound(part.atoms.begin(), part.atoms.end(),
                                          x) -
                         part.atoms.begin();
          return part.prefix(static_cast<std::size_t>(k));
        } else if constexpr (std::is_same_v<T, DensityMeasure>) {
          if (x <= part.support.lo) return 0.0;
          if (x >= part.support.hi) return part.total;
          return std::clamp(part.cdf(x), 0.0, part.total);
        } else {
          double sum = 0.0;
          for (const auto& [coef, sub] : part.components) {
            sum += coef * cdf_left(*sub, x);
          }
          return sum;
        }
      },
      m.rep);
}

double quantile(const Measure& m, double u) {
  const double total = m.total();
  if (!std::isfinite(u) || u < -1e-12 * total || u > total * (1.0 + 1e-12)) {
    throw std::invalid_argument("quantile argument outside [0, total]");
  }
  u = std::clamp(u, 0.0, total);
  return std::visit(
      [&](const auto& part) -> double {
        using T = std::decay_t<decltype(part)>;
        if constexpr (std::is_same_v<T, AtomicMeasure>) {
          // smallest atom with cum >= u; u = 0 maps to the first atom
          const auto k = std::lower_bound(part.cum.begin(), part.cum.end(), u) -
                         part.cum.begin();
          return part.atoms[std::min<std::size_t>(
              static_cast<std::size_t>(k), part.atoms.size() - 1)];
        } else if constexpr (std::is_same_v<T, DensityMeasure>) {
          const double x = part.quantile(u);
          return std::clamp(x, part.support.lo, part.support.hi);
        } else {
          const Interval s = support_interval(m);
          if (cdf(m, s.lo) >= u) return s.lo;
          // bisection; cdf(hi) >= u is invariant, loop ends at double
          // resolution
          double lo = s.lo, hi = s.hi;
          while (true) {
            const double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi) break;
            if (cdf(m, mid) >= u) {
              hi = mid;
            } else {
              lo = mid;
            }
          }
          return hi;
        }
      },
      m.rep);
}

double integrate_mu(const Measure& m, const std::function<double(double)>& g,
                    int nodes) {
  return std::visit(
      [&](const auto& part) -> double {
        using T = std::decay_t<decltype(part)>;
        if constexpr (std::is_same_v<T, AtomicMeasure>) {
          double sum = 0.0;
          for (std::size_t i = 0; i < part.atoms.size(); ++i) {
            const double v = g(part.atoms[i]);
            if (!std::isfinite(v)) {
              throw NumericError("integrand non-finite at x = " +
                                 std::to_string(part.atoms[i]));
            }
            sum += part.weights[i] * v;
          }
          return sum;
        } else if constexpr (std::is_same_v<T, DensityMeasure>) {
          const auto& rule = GaussLegendre::unit(nodes);
          double sum = 0.0;
          for (std::size_t i = 0; i < rule.node.size(); ++i) {
            const double x = std::clamp(part.quantile(rule.node[i] * part.total),
                                        part.support.lo, part.support.hi);
            const double v = g(x);
            if (!std::isfinite(v)) {
              throw NumericError("integrand non-finite at x = " +
                                 std::to_string(x));
            }
            sum += rule.weight[i] * v;
          }
          return part.total * sum;
        } else {
          double sum = 0.0;
          for (const auto& [coef, sub] : part.components) {
            sum += coef * integrate_mu(*sub, g, nodes);
          }
          return sum;
        }
      },
      m.rep);
}

Interval support_interval(const Measure& m) {
  return std::visit(
      [](const auto& part) -> Interval {
        using T = std::decay_t<decltype(part)>;
        if constexpr (std::is_same_v<T, AtomicMeasure>) {
          return {part.atoms.front(), part.atoms.back()};
        } else if constexpr (std::is_same_v<T, DensityMeasure>) {
          return part.support;
        } else {
          Interval hull = support_interval(*part.components.front().second);
          for (std::size_t i = 1; i < part.components.size(); ++i) {
            hull = Interval::hull(hull,
                                  support_interval(*part.components[i].second));
          }
          return hull;
        }
      },
      m.rep);
}

}  // namespace specdim
