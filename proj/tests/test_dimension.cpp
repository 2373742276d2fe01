#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "specdim/dimension.hpp"
#include "specdim/errors.hpp"
#include "specdim/loglog.hpp"
#include "specdim/measure.hpp"

using namespace specdim;

namespace {

const double kLn2Ln3 = std::log(2.0) / std::log(3.0);

double unit_double(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace

TEST_CASE("epsilon grid and window plumbing") {
  const EpsilonGrid g(0.25, 24, 0.5);
  CHECK(g.size() == 25);
  CHECK(g.eps(0) == 0.25);
  for (int i = 1; i <= 24; ++i) {
    CHECK(g.eps(i) == g.eps(i - 1) * 0.5);
  }
  CHECK_THROWS_AS(EpsilonGrid(0.0, 24, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(EpsilonGrid(0.25, 24, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(EpsilonGrid(0.25, 3, 0.5), std::invalid_argument);

  const Window w24 = default_window(24);
  CHECK(w24.lo == 6);
  CHECK(w24.hi == 21);
  const Window w36 = default_window(36);
  CHECK(w36.lo == 9);
  CHECK(w36.hi == 31);
  const Window w12 = default_window(12);
  CHECK(w12.lo == 3);
  CHECK(w12.hi == 10);

  const Window p = parse_window("5:18");
  CHECK(p.lo == 5);
  CHECK(p.hi == 18);
  CHECK_THROWS_AS(parse_window("5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_window("a:b"), std::invalid_argument);
  CHECK_THROWS_AS(parse_window("5:"), std::invalid_argument);
  CHECK_THROWS_AS(parse_window(""), std::invalid_argument);

  CHECK_NOTHROW(validate_window({0, 4}, 10));
  CHECK_THROWS_AS(validate_window({0, 3}, 10), std::invalid_argument);
  CHECK_THROWS_AS(validate_window({-1, 5}, 10), std::invalid_argument);
  CHECK_THROWS_AS(validate_window({0, 11}, 10), std::invalid_argument);

  // regression on an exact line recovers the slope
  std::vector<double> x, y;
  for (int i = 0; i < 10; ++i) {
    x.push_back(0.3 * i);
    y.push_back(2.0 - 1.7 * (0.3 * i));
  }
  CHECK(regression_slope(x, y, 0, 9) == doctest::Approx(-1.7).epsilon(1e-12));
}

TEST_CASE("argument guards") {
  const Measure u = make_uniform(0.0, 1.0);
  CHECK_THROWS_AS(correlation_integral(u, 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(correlation_integral(u, 1.0 + 1e-10, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(correlation_integral(u, 0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(correlation_integral(u, -2.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(correlation_integral(u, 2.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(mean_integral(u, 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(mean_integral(u, 2.0, -0.1), std::invalid_argument);
  CHECK_NOTHROW(correlation_integral(u, 1.0 + 1e-8, 0.1));
}

TEST_CASE("uniform correlation integral matches the closed form") {
  const Measure u = make_uniform(0.0, 1.0);
  for (double q : {0.5, 2.0, 3.0}) {
    for (double eps : {0.1, 0.01}) {
      const double got = correlation_integral(u, q, eps);
      const double want = oracle::uniform_correlation(q, eps);
      CHECK(got / want == doctest::Approx(1.0).epsilon(1e-4));
    }
  }
  // the q = 2 case in closed form: I = 2 eps - eps^2
  const double i2 = correlation_integral(u, 2.0, 0.01);
  CHECK(i2 / (2.0 * 0.01 - 0.01 * 0.01) ==
        doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("uniform mean integral matches the closed form") {
  const Measure u = make_uniform(0.0, 1.0);
  for (double q : {0.5, 2.0, 3.0}) {
    for (double eps : {0.1, 0.01, 0.001}) {
      const double got = mean_integral(u, q, eps);
      const double want = oracle::uniform_mean(q, eps);
      CHECK(got / want == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
  CHECK(mean_integral(u, 2.0, 0.001) / 0.004 ==
        doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("power-law mean integral agrees with a brute Riemann sum") {
  const Measure p = make_power_law(0.25);
  const double q = 2.0;
  const double eps = 0.01;
  const double got = mean_integral(p, q, eps);
  // midpoint rule over the enlarged support
  const int K = 200000;
  const double lo = -eps, hi = 1.0 + eps;
  const double h = (hi - lo) / K;
  double sum = 0.0;
  for (int i = 0; i < K; ++i) {
    const double x = lo + (i + 0.5) * h;
    sum += std::pow(ball_mass(p, x, eps), q) * h;
  }
  const double brute = sum / eps;
  CHECK(got / brute == doctest::Approx(1.0).epsilon(2e-3));
}

TEST_CASE("atomic correlation integral is exact and scale-free below the gap") {
  std::mt19937_64 gen(2024);
  std::vector<double> atoms, weights;
  for (int i = 0; i < 64; ++i) {
    atoms.push_back(static_cast<double>(i) * 0.1);
    weights.push_back(0.5 + unit_double(gen));
  }
  const Measure m = make_atomic(atoms, weights);
  for (double q : {0.5, 1.7, 2.0, 3.0}) {
    double expect = 0.0;
    for (double w : weights) expect += w * std::pow(w, q - 1.0);
    double loose = 0.0;
    for (double w : weights) loose += std::pow(w, q);
    const double at_base = correlation_integral(m, q, 0.049);
    CHECK(at_base == expect);  // bit-exact by construction
    CHECK(at_base == doctest::Approx(loose).epsilon(1e-12));
    for (double eps : {0.049, 0.01, 1e-4, 1e-9}) {
      CHECK(correlation_integral(m, q, eps) == at_base);
    }
  }
}

TEST_CASE("single-atom estimates have exactly zero slopes") {
  const Measure m = make_atomic({0.5}, {1.0});
  const EpsilonGrid grid(0.25, 24, 0.5);
  for (double q : {0.5, 2.0, 3.0}) {
    const DimensionEstimate est =
        estimate_dimensions(m, q, grid, IntegralKind::correlation,
                            default_window(grid));
    CHECK(est.lower_est == 0.0);
    CHECK(est.upper_est == 0.0);
    CHECK(!std::signbit(est.lower_est));
    CHECK(!std::signbit(est.upper_est));
    CHECK(est.lower_clipped == 0.0);
    CHECK(est.upper_clipped == 0.0);
    CHECK(est.underflow_count == 0);
  }
}

TEST_CASE("lebesgue dimension estimate is one") {
  const Measure u = make_uniform(0.0, 1.0);
  const EpsilonGrid grid(0.25, 16, 0.5);
  const Window w{9, 16};
  for (IntegralKind kind : {IntegralKind::correlation, IntegralKind::mean}) {
    const DimensionEstimate est = estimate_dimensions(u, 2.0, grid, kind, w);
    CHECK(est.regression_est == doctest::Approx(1.0).epsilon(0.02));
    CHECK(est.lower_est <= est.regression_est + 1e-12);
    CHECK(est.upper_est >= est.regression_est - 1e-12);
    CHECK(est.regression_clipped == doctest::Approx(1.0).epsilon(0.02));
    CHECK(est.series.integral.size() == static_cast<std::size_t>(grid.size()));
    CHECK(est.series.local_slope.size() ==
          static_cast<std::size_t>(grid.size() - 1));
  }
}

TEST_CASE("power-law estimates follow the q-dependent target") {
  const Measure p = make_power_law(0.25);  // a = 1/4
  const EpsilonGrid grid(0.25, 24, 0.5);
  const Window w = default_window(grid);
  const DimensionEstimate s2 =
      estimate_dimensions(p, 2.0, grid, IntegralKind::correlation, w);
  CHECK(s2.regression_est == doctest::Approx(0.5).epsilon(0.1));
  const DimensionEstimate s3 =
      estimate_dimensions(p, 3.0, grid, IntegralKind::correlation, w);
  CHECK(s3.regression_est == doctest::Approx(0.375).epsilon(0.15));
  // q < 1 sees the a.c. bulk, not the singularity
  const DimensionEstimate q05 =
      estimate_dimensions(p, 0.5, grid, IntegralKind::correlation, w);
  CHECK(q05.regression_est > 0.95);
}

TEST_CASE("cantor level-16 slopes equal ln2/ln3 on the triadic grid") {
  const Measure c = make_cantor(16);
  const EpsilonGrid grid(1.0 / 9.0, 14, 1.0 / 3.0);
  const Window w{2, 10};
  for (double q : {0.5, 2.0}) {
    const DimensionEstimate est =
        estimate_dimensions(c, q, grid, IntegralKind::correlation, w);
    // ball masses are exact powers of two here; the residue is pure summation
    // roundoff over 2^16 atoms (~3e-12 on the local slopes)
    CHECK(std::abs(est.regression_est - kLn2Ln3) <= 1e-10);
    CHECK(std::abs(est.lower_est - kLn2Ln3) <= 1e-10);
    CHECK(std::abs(est.upper_est - kLn2Ln3) <= 1e-10);
  }
}

TEST_CASE("q-monotonicity of correlation regressions") {
  const EpsilonGrid grid(0.25, 24, 0.5);
  const Window w = default_window(grid);
  const Measure p = make_power_law(0.25);
  double prev = std::numeric_limits<double>::infinity();
  for (double q : {0.25, 0.5, 2.0, 3.0, 5.0}) {
    const double est =
        estimate_dimensions(p, q, grid, IntegralKind::correlation, w)
            .regression_est;
    CHECK(est <= prev + 0.02);
    prev = est;
  }
}

TEST_CASE("pointwise exponents") {
  const EpsilonGrid grid(0.25, 24, 0.5);

  const Measure atom = make_atomic({0.3}, {1.0});
  const double e_atom = pointwise_exponent(atom, 0.3, grid);
  CHECK(e_atom == 0.0);
  CHECK(!std::signbit(e_atom));

  const Measure heavy = make_atomic({0.3}, {2.0});
  CHECK(std::abs(pointwise_exponent(heavy, 0.3, grid)) <= 1e-12);

  const Measure u = make_uniform(0.0, 1.0);
  CHECK(pointwise_exponent(u, 0.5, grid) ==
        doctest::Approx(1.0).epsilon(1e-9));
  // boundary point sees half-balls, still dimension one
  CHECK(pointwise_exponent(u, 0.0, grid) ==
        doctest::Approx(1.0).epsilon(1e-9));

  const Measure p = make_power_law(0.25);
  CHECK(pointwise_exponent(p, 0.0, grid) ==
        doctest::Approx(0.25).epsilon(1e-9));

  CHECK(pointwise_exponent(u, 5.0, grid) ==
        std::numeric_limits<double>::infinity());

  CHECK_THROWS_AS(pointwise_exponent(u, 0.5, grid, Window{0, 30}),
                  std::invalid_argument);
}

TEST_CASE("hausdorff upper estimates") {
  const EpsilonGrid grid(0.25, 24, 0.5);

  const Measure u = make_uniform(0.0, 1.0);
  CHECK(hausdorff_upper(u, 200, grid) == doctest::Approx(1.0).epsilon(0.02));

  std::vector<double> atoms, weights;
  for (int i = 0; i < 50; ++i) {
    atoms.push_back(static_cast<double>(i) / 49.0);
    weights.push_back(1.0);
  }
  const Measure pp = make_atomic(atoms, weights);
  CHECK(std::abs(hausdorff_upper(pp, 200, grid)) <= 1e-12);

  const Measure c = make_cantor(16);
  const EpsilonGrid triadic(1.0 / 9.0, 14, 1.0 / 3.0);
  CHECK(std::abs(hausdorff_upper(c, 500, triadic) - kLn2Ln3) <= 1e-9);

  CHECK_THROWS_AS(hausdorff_upper(u, 99, grid), std::invalid_argument);
  CHECK_THROWS_AS(hausdorff_upper(u, 200, grid, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(hausdorff_upper(u, 200, grid, 1.5), std::invalid_argument);
}

TEST_CASE("spectral type classification") {
  auto est = [](double q, double lo, double hi) {
    DimensionEstimate e;
    e.q = q;
    e.lower_est = lo;
    e.upper_est = hi;
    return e;
  };
  CHECK(classify_spectral_type(est(0.5, 0.3, 0.4), est(2.0, 0.3, 0.4), 0.1) ==
        SpectralType::singular_continuous_compatible);
  CHECK(classify_spectral_type(est(0.5, 0.0, 0.01), est(2.0, 0.0, 0.05), 0.1) ==
        SpectralType::point_component);
  CHECK(classify_spectral_type(est(0.5, 0.97, 1.0), est(2.0, 0.9, 0.99), 0.1) ==
        SpectralType::ac_component);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK(classify_spectral_type(est(0.5, nan, nan), est(2.0, nan, nan), 0.1) ==
        SpectralType::inconclusive);
  CHECK_THROWS_AS(
      classify_spectral_type(est(2.0, 0.5, 0.5), est(2.0, 0.5, 0.5), 0.1),
      std::invalid_argument);
  CHECK_THROWS_AS(
      classify_spectral_type(est(0.5, 0.5, 0.5), est(0.5, 0.5, 0.5), 0.1),
      std::invalid_argument);
  CHECK_THROWS_AS(
      classify_spectral_type(est(0.5, 0.5, 0.5), est(2.0, 0.5, 0.5), 0.5),
      std::invalid_argument);
  CHECK_THROWS_AS(
      classify_spectral_type(est(0.5, 0.5, 0.5), est(2.0, 0.5, 0.5), 0.0),
      std::invalid_argument);
  CHECK(to_string(SpectralType::point_component) == "point-component");
  CHECK(to_string(SpectralType::inconclusive) == "inconclusive");
}

TEST_CASE("mixture sweep: atom kills the upper estimate, a.c. keeps the lower") {
  const Measure ac = make_uniform(0.0, 1.0);
  const AtomicMeasure pp(std::vector<double>{0.6180339887},
                         std::vector<double>{1.0});
  const EpsilonGrid grid(0.25, 36, 0.5);
  const Window w{18, 31};

  const std::vector<int> ks = {1, 4};
  const auto lower = mixture_sweep(ac, pp, ks, 0.5, grid, w);
  REQUIRE(lower.size() == 2);
  for (const auto& est : lower) {
    CHECK(est.lower_est >= 0.95);
  }
  const auto upper = mixture_sweep(ac, pp, ks, 2.0, grid, w);
  for (const auto& est : upper) {
    CHECK(est.upper_est <= 0.05);
  }

  CHECK_THROWS_AS(mixture_sweep(ac, pp, {}, 0.5, grid, w),
                  std::invalid_argument);
  CHECK_THROWS_AS(mixture_sweep(ac, pp, {0}, 0.5, grid, w),
                  std::invalid_argument);

  // default-window overload wires through the derived window
  const EpsilonGrid small(0.25, 12, 0.5);
  const auto via_default = mixture_sweep(ac, pp, {1}, 0.5, small);
  REQUIRE(via_default.size() == 1);
  CHECK(via_default[0].window.lo == 3);
  CHECK(via_default[0].window.hi == 10);
}

TEST_CASE("kind round trip") {
  CHECK(to_string(IntegralKind::correlation) == "correlation");
  CHECK(to_string(IntegralKind::mean) == "mean");
  CHECK(parse_kind("correlation") == IntegralKind::correlation);
  CHECK(parse_kind("mean") == IntegralKind::mean);
  CHECK_THROWS_AS(parse_kind("median"), std::invalid_argument);
}
