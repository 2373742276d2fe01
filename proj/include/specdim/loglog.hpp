#pragma once

#include <string>
#include <vector>

namespace specdim {

// Geometric scale grid eps(i) = eps_max * ratio^i for i = 0..levels.
// Levels are built by repeated multiplication so adjacent scales differ by
// exactly `ratio` in floating point.
struct EpsilonGrid {
  double eps_max = 0.25;
  int levels = 24;
  double ratio = 0.5;

  EpsilonGrid();
  EpsilonGrid(double eps_max, int levels, double ratio = 0.5);

  int size() const { return levels + 1; }
  double eps(int i) const { return values_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

// Inclusive level-index range [lo, hi]. Local (two-point) slopes use level
// pairs (i, i+1) for i in [lo, hi-1]; regressions and endpoint slopes use
// levels [lo, hi]. The same convention indexes time grids.
struct Window {
  int lo = 0;
  int hi = 0;
};

// Discards the 25% coarsest and 12.5% finest levels (rounded):
// lo = round(0.25 * (levels+1)), hi = levels - round(0.125 * (levels+1)).
Window default_window(int levels);
Window default_window(const EpsilonGrid& grid);

// Parses "lo:hi"; throws std::invalid_argument on malformed input.
Window parse_window(const std::string& text);

// Requires 0 <= lo, hi <= max_index and at least 4 slopes (hi - lo >= 4).
void validate_window(const Window& w, int max_index);

// Least-squares slope of y against x over indices [lo, hi].
double regression_slope(const std::vector<double>& x,
                        const std::vector<double>& y, int lo, int hi);

}  // namespace specdim
