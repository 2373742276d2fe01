#pragma once

#include <string>
#include <vector>

#include "specdim/loglog.hpp"
#include "specdim/measure.hpp"

namespace specdim {

enum class IntegralKind { correlation, mean };

std::string to_string(IntegralKind kind);
IntegralKind parse_kind(const std::string& text);

// One scaling analysis: integrals over a scale grid plus slope diagnostics.
// local_slope[i] uses levels (i, i+1); endpoint_slope[i] is
// ln I(eps_i) / ((q-1) ln eps_i) (NaN where ln eps_i == 0).
struct SlopeSeries {
  double q = 0.0;
  std::vector<double> eps;
  std::vector<double> integral;
  std::vector<double> local_slope;
  std::vector<double> endpoint_slope;
};

struct DimensionEstimate {
  double q = 0.0;
  IntegralKind kind = IntegralKind::correlation;
  double lower_est = 0.0;       // min local slope over the window (~ lower dim)
  double upper_est = 0.0;       // max local slope over the window (~ upper dim)
  double regression_est = 0.0;  // least-squares slope over the window
  double lower_clipped = 0.0;   // same three, clamped to [0, 1]; reported
  double upper_clipped = 0.0;   // alongside, never silently substituted
  double regression_clipped = 0.0;
  Window window;
  int underflow_count = 0;      // floored ball masses (q < 1 density paths)
  SlopeSeries series;
};

// I(q, eps) = integral of mu(B(x, eps))^(q-1) dmu(x). Purely atomic input is
// an exact O(M) two-cursor sum; other measures go through integrate_mu. For
// q < 1 a vanishing ball mass is floored at 1e-300 and counted through
// `underflow` (never triggered by the measures shipped here).
double correlation_integral(const Measure& m, double q, double eps,
                            int nodes = 2048, int* underflow = nullptr);

// J(q, eps) = eps^-1 * integral of mu(B(x, eps))^q dx over the support
// interval enlarged by eps. Purely atomic input is an exact piecewise-
// constant sum over the 2M breakpoints x_j +- eps; densities use per-panel
// Gauss-Legendre with dyadic refinement toward the breakpoints.
double mean_integral(const Measure& m, double q, double eps, int nodes = 2048);

DimensionEstimate estimate_dimensions(const Measure& m, double q,
                                      const EpsilonGrid& grid,
                                      IntegralKind kind, const Window& window,
                                      int nodes = 2048);

// Least-squares slope of ln mu(B(x, eps)) vs ln eps over the window; +inf if
// any ball mass in the window vanishes (x effectively outside the support).
double pointwise_exponent(const Measure& m, double x, const EpsilonGrid& grid);
double pointwise_exponent(const Measure& m, double x, const EpsilonGrid& grid,
                          const Window& window);

// quantile_level-quantile (default 0.99) of pointwise exponents sampled at
// n_samples stratified quantile positions; approximates the mu-essential
// supremum of the pointwise exponent. n_samples >= 100.
double hausdorff_upper(const Measure& m, int n_samples, const EpsilonGrid& grid,
                       double quantile_level = 0.99);

enum class SpectralType {
  point_component,
  ac_component,
  singular_continuous_compatible,
  inconclusive,
};

std::string to_string(SpectralType type);

// Finite-scale reading of the two-sided dimension criterion: needs one
// estimate at q < 1 and one at s > 1, and a margin tau in (0, 1/2). This is
// a heuristic classification, not a proof.
SpectralType classify_spectral_type(const DimensionEstimate& lower_q,
                                    const DimensionEstimate& upper_s,
                                    double tau);

// Dimension estimates of mu_k = ac + (1/k^2) * pp for each k. With any atom
// present the upper estimate at s > 1 collapses toward 0 once the window's
// scale floor drops below the atom-weight scale, while the a.c. component
// keeps the lower estimate at q < 1 near 1.
std::vector<DimensionEstimate> mixture_sweep(const Measure& ac,
                                             const AtomicMeasure& pp,
                                             const std::vector<int>& k_values,
                                             double q, const EpsilonGrid& grid);
std::vector<DimensionEstimate> mixture_sweep(
    const Measure& ac, const AtomicMeasure& pp,
    const std::vector<int>& k_values, double q, const EpsilonGrid& grid,
    const Window& window, IntegralKind kind = IntegralKind::correlation);

}  // namespace specdim
