#pragma once

#include <cstddef>
#include <vector>

#include "specdim/jacobi.hpp"
#include "specdim/loglog.hpp"

namespace specdim {

// Log-spaced time grid: t(i) = t_min * (t_max/t_min)^(i/(points-1)).
struct TimeGrid {
  double t_min = 1.0;
  double t_max = 100.0;
  int points = 64;

  TimeGrid();
  TimeGrid(double t_min, double t_max, int points);

  int size() const { return points; }
  double t(int i) const;
};

struct DynamicsResult {
  std::vector<double> times;
  std::vector<double> values;
  double lower_exponent = 0.0;
  double upper_exponent = 0.0;
  double regression_exponent = 0.0;
  Window window;
};

// sin(x)/x, with the quadratic Taylor branch near 0. This is the exact time
// average of e^{-isx} over s in [0, t] evaluated at x = t * gap (real part).
double sinc_kernel(double x);

// Time-averaged return probability
//   <gamma>(t) = sum_{j,k} w_j w_k K(t (l_j - l_k)),
// closed form, O(M^2) with a fixed summation order (row partials combined in
// index order, so the value is independent of the thread count). Requires a
// normalized measure: |total - 1| <= 1e-9.
double return_probability_avg(const SpectralMeasure& sm, double t);

// Local slopes of ln<gamma> vs ln t over the window, negated, so the
// returned (lower_exponent, upper_exponent) pair approximates the (lower,
// upper) correlation dimensions of the spectral measure at scales ~ 1/t.
// regression_exponent is the negated least-squares slope.
DynamicsResult return_exponents(const SpectralMeasure& sm, const TimeGrid& grid,
                                const Window& window);

// Precomputed eigen-expansion kernel for time-averaged p-moments of one
// (operator, state, p, center) choice:
//   r_p(t) = [ sum_j |j - j0|^p A_j(t) ]^(1/p),
//   A_j(t) = time average of |<e_j, e^{-isJ} psi>|^2
//          = sum_{m,m'} v_m(j) v_m'(j) a_m a_m' K(t (l_m - l_m')).
// The j-sum is folded into S[m][m'] once (O(N^3)), then each r_p(t) costs
// O(N^2). Requires |psi| = 1 (1e-9) and p in (0, 8] (|j-j0|^p overflows
// beyond that on large lattices).
class MomentKernel {
 public:
  MomentKernel(const JacobiMatrix& J, const std::vector<double>& psi, double p,
               std::size_t j0);
  MomentKernel(const EigenDecomposition& eig, const std::vector<double>& psi,
               double p, std::size_t j0);

  double r_p(double t) const;
  // A_j(t) for all j; O(N^2) per j, test-scale use only.
  std::vector<double> position_distribution(double t) const;

  double p() const { return p_; }
  std::size_t j0() const { return j0_; }

 private:
  void build(const EigenDecomposition& eig, const std::vector<double>& psi);

  double p_;
  std::size_t j0_;
  std::size_t n_ = 0;
  std::vector<double> lambda_;
  std::vector<double> amp_;      // <v_m, psi>
  std::vector<double> S_;        // S[m*n + m'] = sum_j |j-j0|^p v_m(j) v_m'(j)
  std::vector<double> vectors_;  // column-major copy for A_j(t)
};

// j0 defaults to the index of the largest |psi| component.
double moment_trajectory(const JacobiMatrix& J, const std::vector<double>& psi,
                         double p, double t);
double moment_trajectory(const JacobiMatrix& J, const std::vector<double>& psi,
                         double p, double t, std::size_t j0);

// Slopes of ln r_p vs ln t over the window: (beta_minus, beta_plus) as
// min/max local slopes plus the regression slope. An identically vanishing
// trajectory (no transport) reports all exponents 0.
DynamicsResult moment_exponents(const JacobiMatrix& J,
                                const std::vector<double>& psi, double p,
                                const TimeGrid& grid, const Window& window);
DynamicsResult moment_exponents(const JacobiMatrix& J,
                                const std::vector<double>& psi, double p,
                                const TimeGrid& grid, const Window& window,
                                std::size_t j0);

// Transport-vs-dimension comparison for each p: beta(p) exponents against
// the dimension estimates at q = 1/(1+p) of the same spectral measure.
struct GuarneriEntry {
  double p = 0.0;
  double beta_minus = 0.0;
  double beta_plus = 0.0;
  double beta_regression = 0.0;
  double dim_lower = 0.0;
  double dim_upper = 0.0;
  double dim_regression = 0.0;
  double slack_minus = 0.0;  // beta_minus - dim_lower
  double slack_plus = 0.0;   // beta_plus - dim_upper
  bool violation = false;    // min slack < -0.1 (finite-scale tolerance)
};

struct GuarneriReport {
  std::vector<GuarneriEntry> entries;
  double eps_floor = 0.0;
  double t_max = 0.0;
  // eps_floor within a decade of 1/t_max; mismatches are flagged, not fatal.
  bool scale_matched = false;
  bool any_violation = false;
};

GuarneriReport check_guarneri(const JacobiMatrix& J,
                              const std::vector<double>& psi,
                              const std::vector<double>& p_list,
                              const TimeGrid& tgrid, const Window& twindow,
                              const EpsilonGrid& egrid, const Window& ewindow,
                              std::size_t j0);

}  // namespace specdim
