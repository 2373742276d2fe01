#include "specdim/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "specdim/errors.hpp"
#include "specdim/parallel.hpp"
#include "specdim/quadrature.hpp"

namespace specdim {

namespace {

constexpr double kQOneGuard = 1e-9;
constexpr double kMassFloor = 1e-300;

void require_q(double q) {
  if (!std::isfinite(q) || !(q > 0.0)) {
    throw std::invalid_argument("q must be positive and finite");
  }
  if (std::abs(q - 1.0) < kQOneGuard) {
    throw std::invalid_argument("q too close to 1; the q = 1 case is excluded");
  }
}

void require_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("eps must be positive and finite");
  }
}

// Points where x -> mu(B(x, eps)) changes character: atoms and density
// support edges shifted by +-eps. Returns true when every leaf is atomic,
// i.e. the map is piecewise constant between breakpoints.
bool ball_mass_breakpoints(const Measure& m, double eps,
                           std::vector<double>& out) {
  return std::visit(
      [&](const auto& part) -> bool {
        using T = std::decay_t<decltype(part)>;
        if constexpr (std::is_same_v<T, AtomicMeasure>) {
          for (double a : part.atoms) {
            out.push_back(a - eps);
            out.push_back(a + eps);
          }
          return true;
        } else if constexpr (std::is_same_v<T, DensityMeasure>) {
          out.push_back(part.support.lo - eps);
          out.push_back(part.support.lo + eps);
          out.push_back(part.support.hi - eps);
          out.push_back(part.support.hi + eps);
          return false;
        } else {
          bool atomic_only = true;
          for (const auto& [coef, sub] : part.components) {
            (void)coef;
            atomic_only = ball_mass_breakpoints(*sub, eps, out) && atomic_only;
          }
          return atomic_only;
        }
      },
      m.rep);
}

// integral of mu(B(x,eps))^q over [A, B] for smooth-interior panels. The
// integrand can have one-sided power behavior at the panel ends (density
// edge entering the ball), so cells shrink geometrically toward both ends.
double panel_integral(const Measure& m, double q, double eps, double A,
                      double B, int cell_order) {
  const auto& rule = GaussLegendre::unit(cell_order);
  const int halvings = 40;
  double sum = 0.0;
  auto cell = [&](double a, double b) {
    const double h = b - a;
    if (!(h > 0.0)) return;
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.node.size(); ++i) {
      const double x = a + h * rule.node[i];
      const double bm = ball_mass(m, x, eps);
      acc += rule.weight[i] * (bm > 0.0 ? std::pow(bm, q) : 0.0);
    }
    sum += h * acc;
  };
  const double mid = 0.5 * (A + B);
  double right = mid;
  for (int k = 1; k < halvings; ++k) {
    const double left = A + (mid - A) * std::ldexp(1.0, -k);
    cell(left, right);
    right = left;
  }
  cell(A, right);
  double left = mid;
  for (int k = 1; k < halvings; ++k) {
    const double r = B - (B - mid) * std::ldexp(1.0, -k);
    cell(left, r);
    left = r;
  }
  cell(left, B);
  return sum;
}

}  // namespace

std::string to_string(IntegralKind kind) {
  return kind == IntegralKind::correlation ? "correlation" : "mean";
}

IntegralKind parse_kind(const std::string& text) {
  if (text == "correlation") return IntegralKind::correlation;
  if (text == "mean") return IntegralKind::mean;
  throw std::invalid_argument("unknown integral kind: " + text);
}

double correlation_integral(const Measure& m, double q, double eps, int nodes,
                            int* underflow) {
  require_q(q);
  require_eps(eps);
  if (const AtomicMeasure* a = m.as_atomic()) {
    // exact two-cursor sum; both cursors are monotone since atoms are sorted
    const std::size_t M = a->size();
    std::size_t lo = 0, hi = 0;
    double sum = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
      while (lo < M && a->atoms[lo] < a->atoms[j] - eps) ++lo;
      while (hi < M && a->atoms[hi] <= a->atoms[j] + eps) ++hi;
      // isolated atom: take the weight itself, not a prefix difference, so the
      // sum is bit-identical to sum_j w_j^q whenever eps separates all atoms
      const double bm =
          hi - lo == 1 ? a->weights[lo] : a->prefix(hi) - a->prefix(lo);
      sum += a->weights[j] * std::pow(bm, q - 1.0);
    }
    return sum;
  }
  int floored = 0;
  const double value = integrate_mu(
      m,
      [&](double x) {
        double bm = ball_mass(m, x, eps);
        if (bm <= 0.0) {
          if (q > 1.0) return 0.0;
          ++floored;
          bm = kMassFloor;
        }
        return std::pow(bm, q - 1.0);
      },
      nodes);
  if (underflow != nullptr) *underflow += floored;
  return value;
}

double mean_integral(const Measure& m, double q, double eps, int nodes) {
  require_q(q);
  require_eps(eps);
  const Interval s = support_interval(m);
  const double dom_lo = s.lo - eps;
  const double dom_hi = s.hi + eps;
  std::vector<double> bp;
  const bool atomic_only = ball_mass_breakpoints(m, eps, bp);
  bp.push_back(dom_lo);
  bp.push_back(dom_hi);
  for (double& b : bp) b = std::clamp(b, dom_lo, dom_hi);
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

  double sum = 0.0;
  if (atomic_only) {
    // mass is constant on each open segment; midpoint lookup is exact
    for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
      const double len = bp[k + 1] - bp[k];
      if (!(len > 0.0)) continue;
      const double bm = ball_mass(m, 0.5 * (bp[k] + bp[k + 1]), eps);
      if (bm > 0.0) sum += len * std::pow(bm, q);
    }
  } else {
    const int cell_order = std::clamp(nodes / 128, 4, 64);
    for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
      if (!(bp[k + 1] > bp[k])) continue;
      sum += panel_integral(m, q, eps, bp[k], bp[k + 1], cell_order);
    }
  }
  return sum / eps;
}

DimensionEstimate estimate_dimensions(const Measure& m, double q,
                                      const EpsilonGrid& grid,
                                      IntegralKind kind, const Window& window,
                                      int nodes) {
  require_q(q);
  validate_window(window, grid.levels);
  const int n = grid.size();
  std::vector<double> integral(static_cast<std::size_t>(n), 0.0);
  std::vector<int> floored(static_cast<std::size_t>(n), 0);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    const double eps = grid.eps(static_cast<int>(i));
    integral[i] = kind == IntegralKind::correlation
                      ? correlation_integral(m, q, eps, nodes, &floored[i])
                      : mean_integral(m, q, eps, nodes);
  });

  DimensionEstimate est;
  est.q = q;
  est.kind = kind;
  est.window = window;
  for (int i = 0; i < n; ++i) {
    const double v = integral[static_cast<std::size_t>(i)];
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw NumericError("integral not positive and finite at level " +
                         std::to_string(i) + " (eps = " +
                         std::to_string(grid.eps(i)) + ", q = " +
                         std::to_string(q) + ")");
    }
    est.underflow_count += floored[static_cast<std::size_t>(i)];
  }

  std::vector<double> ln_eps(static_cast<std::size_t>(n));
  std::vector<double> ln_i(static_cast<std::size_t>(n));
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    ln_eps[static_cast<std::size_t>(i)] = std::log(grid.eps(i));
    ln_i[static_cast<std::size_t>(i)] =
        std::log(integral[static_cast<std::size_t>(i)]);
    x[static_cast<std::size_t>(i)] =
        (q - 1.0) * ln_eps[static_cast<std::size_t>(i)];
  }

  SlopeSeries& series = est.series;
  series.q = q;
  series.eps = grid.values();
  series.integral = integral;
  series.local_slope.resize(static_cast<std::size_t>(n - 1));
  series.endpoint_slope.resize(static_cast<std::size_t>(n));
  for (int i = 0; i + 1 < n; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    // + 0.0 folds -0.0 slopes (constant integrals) to plain zero
    series.local_slope[k] =
        (ln_i[k + 1] - ln_i[k]) / ((q - 1.0) * (ln_eps[k + 1] - ln_eps[k])) +
        0.0;
  }
  for (int i = 0; i < n; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    series.endpoint_slope[k] =
        ln_eps[k] == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                         : ln_i[k] / ((q - 1.0) * ln_eps[k]);
  }

  double lo_slope = std::numeric_limits<double>::infinity();
  double hi_slope = -std::numeric_limits<double>::infinity();
  for (int i = window.lo; i < window.hi; ++i) {
    const double v = series.local_slope[static_cast<std::size_t>(i)];
    lo_slope = std::min(lo_slope, v);
    hi_slope = std::max(hi_slope, v);
  }
  est.lower_est = lo_slope + 0.0;
  est.upper_est = hi_slope + 0.0;
  est.regression_est = regression_slope(x, ln_i, window.lo, window.hi) + 0.0;
  est.lower_clipped = std::clamp(est.lower_est, 0.0, 1.0);
  est.upper_clipped = std::clamp(est.upper_est, 0.0, 1.0);
  est.regression_clipped = std::clamp(est.regression_est, 0.0, 1.0);
  return est;
}

double pointwise_exponent(const Measure& m, double x, const EpsilonGrid& grid) {
  return pointwise_exponent(m, x, grid, default_window(grid));
}

double pointwise_exponent(const Measure& m, double x, const EpsilonGrid& grid,
                          const Window& window) {
  if (!std::isfinite(x)) {
    throw std::invalid_argument("x must be finite");
  }
  validate_window(window, grid.levels);
  const int count = window.hi - window.lo + 1;
  std::vector<double> lx(static_cast<std::size_t>(count));
  std::vector<double> ly(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double eps = grid.eps(window.lo + i);
    const double bm = ball_mass(m, x, eps);
    if (!(bm > 0.0)) {
      return std::numeric_limits<double>::infinity();
    }
    lx[static_cast<std::size_t>(i)] = std::log(eps);
    ly[static_cast<std::size_t>(i)] = std::log(bm);
  }
  return regression_slope(lx, ly, 0, count - 1) + 0.0;
}

double hausdorff_upper(const Measure& m, int n_samples, const EpsilonGrid& grid,
                       double quantile_level) {
  if (n_samples < 100) {
    throw std::invalid_argument("hausdorff_upper needs at least 100 samples");
  }
  if (!(quantile_level > 0.0 && quantile_level <= 1.0)) {
    throw std::invalid_argument("quantile_level must lie in (0, 1]");
  }
  const double total = m.total();
  const Window w = default_window(grid);
  std::vector<double> exps(static_cast<std::size_t>(n_samples));
  parallel_for(static_cast<std::size_t>(n_samples), [&](std::size_t i) {
    const double u = (static_cast<double>(i) + 0.5) / n_samples * total;
    exps[i] = pointwise_exponent(m, quantile(m, u), grid, w);
  });
  std::sort(exps.begin(), exps.end());
  int idx = static_cast<int>(std::ceil(quantile_level * n_samples)) - 1;
  idx = std::clamp(idx, 0, n_samples - 1);
  return exps[static_cast<std::size_t>(idx)];
}

std::string to_string(SpectralType type) {
  switch (type) {
    case SpectralType::point_component:
      return "point-component";
    case SpectralType::ac_component:
      return "ac-component";
    case SpectralType::singular_continuous_compatible:
      return "singular-continuous-compatible";
    default:
      return "inconclusive";
  }
}

SpectralType classify_spectral_type(const DimensionEstimate& lower_q,
                                    const DimensionEstimate& upper_s,
                                    double tau) {
  if (!(lower_q.q < 1.0) || !(upper_s.q > 1.0)) {
    throw std::invalid_argument(
        "classification needs one estimate at q < 1 and one at s > 1");
  }
  if (!(tau > 0.0 && tau < 0.5)) {
    throw std::invalid_argument("tau must lie in (0, 1/2)");
  }
  const double d_minus = lower_q.lower_est;
  const double d_plus = upper_s.upper_est;
  if (d_minus < 1.0 - tau && d_plus > tau) {
    return SpectralType::singular_continuous_compatible;
  }
  if (d_plus <= tau) {
    return SpectralType::point_component;
  }
  if (d_minus >= 1.0 - tau) {
    return SpectralType::ac_component;
  }
  return SpectralType::inconclusive;
}

std::vector<DimensionEstimate> mixture_sweep(const Measure& ac,
                                             const AtomicMeasure& pp,
                                             const std::vector<int>& k_values,
                                             double q,
                                             const EpsilonGrid& grid) {
  return mixture_sweep(ac, pp, k_values, q, grid, default_window(grid.levels));
}

std::vector<DimensionEstimate> mixture_sweep(
    const Measure& ac, const AtomicMeasure& pp,
    const std::vector<int>& k_values, double q, const EpsilonGrid& grid,
    const Window& window, IntegralKind kind) {
  if (k_values.empty()) {
    throw std::invalid_argument("k_values must be nonempty");
  }
  auto ac_shared = std::make_shared<const Measure>(ac);
  auto pp_shared = std::make_shared<const Measure>(Measure(pp));
  std::vector<DimensionEstimate> out;
  out.reserve(k_values.size());
  for (int k : k_values) {
    if (k < 1) {
      throw std::invalid_argument("k values must be positive integers");
    }
    const double coef = 1.0 / (static_cast<double>(k) * k);
    Measure mix(
        (MixtureMeasure({{1.0, ac_shared}, {coef, pp_shared}})));
    out.push_back(estimate_dimensions(mix, q, grid, kind, window));
  }
  return out;
}

}  // namespace specdim
