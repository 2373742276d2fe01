#include "specdim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "specdim/dimension.hpp"
#include "specdim/errors.hpp"
#include "specdim/parallel.hpp"

namespace specdim {

namespace {

void require_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("time must be positive and finite");
  }
}

void require_unit_norm(double norm2) {
  if (std::abs(std::sqrt(norm2) - 1.0) > 1e-9) {
    throw std::invalid_argument("state must be normalized to unit norm");
  }
}

struct SlopeSummary {
  double lo = 0.0;
  double hi = 0.0;
  double reg = 0.0;
};

SlopeSummary window_slopes(const std::vector<double>& ln_t,
                           const std::vector<double>& ln_v, const Window& w) {
  SlopeSummary s;
  s.lo = std::numeric_limits<double>::infinity();
  s.hi = -std::numeric_limits<double>::infinity();
  for (int i = w.lo; i < w.hi; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    const double slope = (ln_v[k + 1] - ln_v[k]) / (ln_t[k + 1] - ln_t[k]);
    s.lo = std::min(s.lo, slope);
    s.hi = std::max(s.hi, slope);
  }
  s.reg = regression_slope(ln_t, ln_v, w.lo, w.hi);
  return s;
}

}  // namespace

TimeGrid::TimeGrid() : TimeGrid(1.0, 100.0, 64) {}

TimeGrid::TimeGrid(double t_min_in, double t_max_in, int points_in)
    : t_min(t_min_in), t_max(t_max_in), points(points_in) {
  if (!(t_min > 0.0) || !std::isfinite(t_min) || !std::isfinite(t_max)) {
    throw std::invalid_argument("time bounds must be positive and finite");
  }
  if (!(t_min < t_max)) {
    throw std::invalid_argument("time grid needs t_min < t_max");
  }
  if (points < 8) {
    throw std::invalid_argument("time grid needs at least 8 points");
  }
}

double TimeGrid::t(int i) const {
  const double frac = static_cast<double>(i) / (points - 1);
  return t_min * std::pow(t_max / t_min, frac);
}

double sinc_kernel(double x) {
  if (std::abs(x) < 1e-8) {
    return 1.0 - x * x / 6.0;
  }
  return std::sin(x) / x;
}

double return_probability_avg(const SpectralMeasure& sm, double t) {
  require_time(t);
  const AtomicMeasure& mu = sm.measure;
  if (std::abs(mu.total - 1.0) > 1e-9) {
    throw std::invalid_argument("spectral measure must be normalized");
  }
  const std::size_t M = mu.size();
  std::vector<double> row(M, 0.0);
  parallel_for(M, [&](std::size_t j) {
    const double lj = mu.atoms[j];
    double acc = 0.0;
    for (std::size_t k = 0; k < M; ++k) {
      acc += mu.weights[k] * sinc_kernel(t * (lj - mu.atoms[k]));
    }
    row[j] = mu.weights[j] * acc;
  });
  double sum = 0.0;
  for (std::size_t j = 0; j < M; ++j) sum += row[j];
  return sum;
}

DynamicsResult return_exponents(const SpectralMeasure& sm, const TimeGrid& grid,
                                const Window& window) {
  validate_window(window, grid.points - 1);
  DynamicsResult res;
  res.window = window;
  const int n = grid.size();
  res.times.resize(static_cast<std::size_t>(n));
  res.values.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    res.times[static_cast<std::size_t>(i)] = grid.t(i);
    res.values[static_cast<std::size_t>(i)] =
        return_probability_avg(sm, grid.t(i));
  }
  std::vector<double> ln_t(static_cast<std::size_t>(n));
  std::vector<double> ln_v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    if (!(res.values[k] > 0.0)) {
      throw NumericError("return probability vanished at time index " +
                         std::to_string(i));
    }
    ln_t[k] = std::log(res.times[k]);
    ln_v[k] = std::log(res.values[k]);
  }
  const SlopeSummary s = window_slopes(ln_t, ln_v, window);
  // <gamma> decays ~ t^-D; negate so the pair reads as (lower, upper) dims
  res.lower_exponent = 0.0 - s.hi;
  res.upper_exponent = 0.0 - s.lo;
  res.regression_exponent = 0.0 - s.reg;
  return res;
}

MomentKernel::MomentKernel(const JacobiMatrix& J, const std::vector<double>& psi,
                           double p, std::size_t j0)
    : p_(p), j0_(j0) {
  if (psi.size() != J.size()) {
    throw std::invalid_argument("state vector length must match the matrix");
  }
  build(eigendecompose(J), psi);
}

MomentKernel::MomentKernel(const EigenDecomposition& eig,
                           const std::vector<double>& psi, double p,
                           std::size_t j0)
    : p_(p), j0_(j0) {
  build(eig, psi);
}

void MomentKernel::build(const EigenDecomposition& eig,
                         const std::vector<double>& psi) {
  if (!(p_ > 0.0) || p_ > 8.0) {
    throw std::invalid_argument("moment order p must lie in (0, 8]");
  }
  n_ = eig.n;
  if (psi.size() != n_) {
    throw std::invalid_argument("state vector length must match the matrix");
  }
  if (j0_ >= n_) {
    throw std::out_of_range("moment center index out of range");
  }
  double norm2 = 0.0;
  for (double v : psi) norm2 += v * v;
  require_unit_norm(norm2);

  lambda_ = eig.eigenvalues;
  vectors_ = eig.vectors;
  amp_.resize(n_);
  for (std::size_t m = 0; m < n_; ++m) {
    const double* col = vectors_.data() + m * n_;
    double a = 0.0;
    for (std::size_t i = 0; i < n_; ++i) a += col[i] * psi[i];
    amp_[m] = a;
  }

  std::vector<double> dist(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    const double d = j >= j0_ ? static_cast<double>(j - j0_)
                              : static_cast<double>(j0_ - j);
    dist[j] = d == 0.0 ? 0.0 : std::pow(d, p_);
  }
  S_.assign(n_ * n_, 0.0);
  parallel_for(n_, [&](std::size_t m) {
    const double* vm = vectors_.data() + m * n_;
    for (std::size_t mp = 0; mp < n_; ++mp) {
      const double* vmp = vectors_.data() + mp * n_;
      double acc = 0.0;
      for (std::size_t j = 0; j < n_; ++j) acc += dist[j] * vm[j] * vmp[j];
      S_[m * n_ + mp] = acc;
    }
  });
}

double MomentKernel::r_p(double t) const {
  require_time(t);
  std::vector<double> row(n_, 0.0);
  parallel_for(n_, [&](std::size_t m) {
    const double lm = lambda_[m];
    const double am = amp_[m];
    const double* srow = S_.data() + m * n_;
    double acc = 0.0;
    for (std::size_t mp = 0; mp < n_; ++mp) {
      acc += amp_[mp] * srow[mp] * sinc_kernel(t * (lm - lambda_[mp]));
    }
    row[m] = am * acc;
  });
  double sum = 0.0;
  for (std::size_t m = 0; m < n_; ++m) sum += row[m];
  // tiny negative values are pure roundoff (the true sum is >= 0)
  sum = std::max(sum, 0.0);
  return sum == 0.0 ? 0.0 : std::pow(sum, 1.0 / p_);
}

std::vector<double> MomentKernel::position_distribution(double t) const {
  require_time(t);
  std::vector<double> a(n_, 0.0);
  parallel_for(n_, [&](std::size_t j) {
    double acc = 0.0;
    for (std::size_t m = 0; m < n_; ++m) {
      const double vmj = vectors_[m * n_ + j];
      const double wm = amp_[m] * vmj;
      // split the pair sum: diagonal plus twice the upper triangle
      acc += wm * wm;
      for (std::size_t mp = m + 1; mp < n_; ++mp) {
        const double wmp = amp_[mp] * vectors_[mp * n_ + j];
        acc += 2.0 * wm * wmp * sinc_kernel(t * (lambda_[m] - lambda_[mp]));
      }
    }
    a[j] = acc;
  });
  return a;
}

namespace {

std::size_t default_center(const std::vector<double>& psi) {
  std::size_t best = 0;
  double best_abs = -1.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double a = std::abs(psi[i]);
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  return best;
}

}  // namespace

double moment_trajectory(const JacobiMatrix& J, const std::vector<double>& psi,
                         double p, double t) {
  return moment_trajectory(J, psi, p, t, default_center(psi));
}

double moment_trajectory(const JacobiMatrix& J, const std::vector<double>& psi,
                         double p, double t, std::size_t j0) {
  return MomentKernel(J, psi, p, j0).r_p(t);
}

DynamicsResult moment_exponents(const JacobiMatrix& J,
                                const std::vector<double>& psi, double p,
                                const TimeGrid& grid, const Window& window) {
  return moment_exponents(J, psi, p, grid, window, default_center(psi));
}

DynamicsResult moment_exponents(const JacobiMatrix& J,
                                const std::vector<double>& psi, double p,
                                const TimeGrid& grid, const Window& window,
                                std::size_t j0) {
  validate_window(window, grid.points - 1);
  const MomentKernel kernel(J, psi, p, j0);
  DynamicsResult res;
  res.window = window;
  const int n = grid.size();
  res.times.resize(static_cast<std::size_t>(n));
  res.values.resize(static_cast<std::size_t>(n));
  bool all_zero = true;
  for (int i = 0; i < n; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    res.times[k] = grid.t(i);
    res.values[k] = kernel.r_p(grid.t(i));
    all_zero = all_zero && res.values[k] == 0.0;
  }
  if (all_zero) {
    // no transport at all (single site, or psi pinned at j0 forever)
    res.lower_exponent = 0.0;
    res.upper_exponent = 0.0;
    res.regression_exponent = 0.0;
    return res;
  }
  std::vector<double> ln_t(static_cast<std::size_t>(n));
  std::vector<double> ln_v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    if (!(res.values[k] > 0.0)) {
      throw NumericError("moment trajectory vanished at time index " +
                         std::to_string(i));
    }
    ln_t[k] = std::log(res.times[k]);
    ln_v[k] = std::log(res.values[k]);
  }
  const SlopeSummary s = window_slopes(ln_t, ln_v, window);
  res.lower_exponent = s.lo + 0.0;
  res.upper_exponent = s.hi + 0.0;
  res.regression_exponent = s.reg + 0.0;
  return res;
}

GuarneriReport check_guarneri(const JacobiMatrix& J,
                              const std::vector<double>& psi,
                              const std::vector<double>& p_list,
                              const TimeGrid& tgrid, const Window& twindow,
                              const EpsilonGrid& egrid, const Window& ewindow,
                              std::size_t j0) {
  if (p_list.empty()) {
    throw std::invalid_argument("p_list must be nonempty");
  }
  validate_window(twindow, tgrid.points - 1);
  validate_window(ewindow, egrid.levels);

  const EigenDecomposition eig = eigendecompose(J);
  const SpectralMeasure sm = spectral_measure(J, eig, psi, "guarneri-state");
  const Measure mu((sm.measure));

  GuarneriReport report;
  report.eps_floor = egrid.eps(ewindow.hi);
  report.t_max = tgrid.t(twindow.hi);
  const double product = report.eps_floor * report.t_max;
  report.scale_matched = product >= 0.1 && product <= 10.0;

  for (double p : p_list) {
    const MomentKernel kernel(eig, psi, p, j0);
    std::vector<double> values(static_cast<std::size_t>(tgrid.points));
    bool all_zero = true;
    for (int i = 0; i < tgrid.points; ++i) {
      values[static_cast<std::size_t>(i)] = kernel.r_p(tgrid.t(i));
      all_zero = all_zero && values[static_cast<std::size_t>(i)] == 0.0;
    }
    SlopeSummary s;
    if (!all_zero) {
      std::vector<double> ln_t(static_cast<std::size_t>(tgrid.points));
      std::vector<double> ln_v(static_cast<std::size_t>(tgrid.points));
      for (int i = 0; i < tgrid.points; ++i) {
        const std::size_t k = static_cast<std::size_t>(i);
        if (!(values[k] > 0.0)) {
          throw NumericError("moment trajectory vanished at time index " +
                             std::to_string(i));
        }
        ln_t[k] = std::log(tgrid.t(i));
        ln_v[k] = std::log(values[k]);
      }
      s = window_slopes(ln_t, ln_v, twindow);
    }

    const double q = 1.0 / (1.0 + p);
    const DimensionEstimate est = estimate_dimensions(
        mu, q, egrid, IntegralKind::correlation, ewindow);

    GuarneriEntry entry;
    entry.p = p;
    entry.beta_minus = s.lo + 0.0;
    entry.beta_plus = s.hi + 0.0;
    entry.beta_regression = s.reg + 0.0;
    entry.dim_lower = est.lower_est;
    entry.dim_upper = est.upper_est;
    entry.dim_regression = est.regression_est;
    entry.slack_minus = entry.beta_minus - entry.dim_lower;
    entry.slack_plus = entry.beta_plus - entry.dim_upper;
    entry.violation = std::min(entry.slack_minus, entry.slack_plus) < -0.1;
    report.any_violation = report.any_violation || entry.violation;
    report.entries.push_back(entry);
  }
  return report;
}

}  // namespace specdim
