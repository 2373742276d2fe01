#include "specdim/loglog.hpp"

#include <cmath>
#include <stdexcept>

namespace specdim {

namespace {

void validate_grid(double eps_max, int levels, double ratio) {
  if (!(eps_max > 0.0) || !std::isfinite(eps_max)) {
    throw std::invalid_argument("eps_max must be positive and finite");
  }
  if (levels < 4) {
    throw std::invalid_argument("levels must be >= 4");
  }
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw std::invalid_argument("ratio must lie in (0, 1)");
  }
}

}  // namespace

EpsilonGrid::EpsilonGrid() : EpsilonGrid(0.25, 24, 0.5) {}

EpsilonGrid::EpsilonGrid(double eps_max_in, int levels_in, double ratio_in)
    : eps_max(eps_max_in), levels(levels_in), ratio(ratio_in) {
  validate_grid(eps_max, levels, ratio);
  values_.resize(static_cast<std::size_t>(levels) + 1);
  double v = eps_max;
  for (int i = 0; i <= levels; ++i) {
    values_[static_cast<std::size_t>(i)] = v;
    v *= ratio;
  }
}

Window default_window(int levels) {
  const int n_pts = levels + 1;
  Window w;
  w.lo = static_cast<int>(std::lround(0.25 * n_pts));
  w.hi = levels - static_cast<int>(std::lround(0.125 * n_pts));
  return w;
}

Window default_window(const EpsilonGrid& grid) {
  return default_window(grid.levels);
}

Window parse_window(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 >= text.size()) {
    throw std::invalid_argument("window must be 'lo:hi', got '" + text + "'");
  }
  Window w;
  try {
    std::size_t used = 0;
    w.lo = std::stoi(text.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument(text);
    w.hi = std::stoi(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw std::invalid_argument("window must be 'lo:hi', got '" + text + "'");
  }
  return w;
}

void validate_window(const Window& w, int max_index) {
  if (w.lo < 0 || w.hi > max_index) {
    throw std::invalid_argument("window [" + std::to_string(w.lo) + ", " +
                                std::to_string(w.hi) +
                                "] outside grid levels 0.." +
                                std::to_string(max_index));
  }
  if (w.hi - w.lo < 4) {
    throw std::invalid_argument(
        "window too narrow: need at least 4 slopes, got " +
        std::to_string(w.hi - w.lo));
  }
}

double regression_slope(const std::vector<double>& x,
                        const std::vector<double>& y, int lo, int hi) {
  if (lo < 0 || hi >= static_cast<int>(x.size()) || hi <= lo ||
      x.size() != y.size()) {
    throw std::invalid_argument("regression range invalid");
  }
  const int n = hi - lo + 1;
  double mx = 0.0, my = 0.0;
  for (int i = lo; i <= hi; ++i) {
    mx += x[static_cast<std::size_t>(i)];
    my += y[static_cast<std::size_t>(i)];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (int i = lo; i <= hi; ++i) {
    const double dx = x[static_cast<std::size_t>(i)] - mx;
    sxy += dx * (y[static_cast<std::size_t>(i)] - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) {
    throw std::invalid_argument("regression abscissae are constant");
  }
  return sxy / sxx;
}

}  // namespace specdim
