#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "specdim/errors.hpp"
#include "specdim/jacobi.hpp"
#include "specdim/measure.hpp"

using namespace specdim;

namespace {

constexpr double kPi = 3.14159265358979323846;

double unit_double(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

JacobiMatrix random_jacobi(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<double> diag(n), off(n > 0 ? n - 1 : 0);
  for (auto& d : diag) d = -1.0 + 2.0 * unit_double(gen);
  for (auto& b : off) b = 0.5 + unit_double(gen);
  return JacobiMatrix(diag, off);
}

double residual_norm(const JacobiMatrix& J, const EigenDecomposition& eig,
                     std::size_t j) {
  const std::size_t n = J.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = J.diag[i] * eig.vec(j, i);
    if (i > 0) r += J.offdiag[i - 1] * eig.vec(j, i - 1);
    if (i + 1 < n) r += J.offdiag[i] * eig.vec(j, i + 1);
    r -= eig.eigenvalues[j] * eig.vec(j, i);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

}  // namespace

TEST_CASE("jacobi matrix validation") {
  CHECK_THROWS_AS(JacobiMatrix({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(JacobiMatrix({0.0, 0.0}, {}), std::invalid_argument);
  CHECK_THROWS_AS(JacobiMatrix({0.0, 0.0}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(JacobiMatrix({0.0, 0.0}, {-1.0}), std::invalid_argument);
  const JacobiMatrix j({1.0, -2.0}, {3.0});
  CHECK(j.norm_bound() == doctest::Approx(2.0 + 6.0));
}

TEST_CASE("one-by-one matrix") {
  const JacobiMatrix j({0.7}, {});
  const EigenDecomposition eig = eigendecompose(j);
  REQUIRE(eig.n == 1);
  CHECK(eig.eigenvalues[0] == 0.7);
  CHECK(std::abs(std::abs(eig.vec(0, 0)) - 1.0) <= 1e-15);
}

TEST_CASE("two-by-two free matrix has eigenpairs (-1, +1)") {
  const JacobiMatrix j({0.0, 0.0}, {1.0});
  const EigenDecomposition eig = eigendecompose(j);
  REQUIRE(eig.n == 2);
  CHECK(eig.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(eig.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-14));
  const double s = 1.0 / std::sqrt(2.0);
  const double o0 = std::abs(eig.vec(0, 0) * s - eig.vec(0, 1) * s);
  const double o1 = std::abs(eig.vec(1, 0) * s + eig.vec(1, 1) * s);
  CHECK(o0 == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(o1 == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("free matrix eigenvalues match the sine-basis closed form") {
  const std::size_t N = 200;
  const LatticeOperator op = free_jacobi(N);
  const EigenDecomposition eig = eigendecompose(op.J);
  for (std::size_t j = 0; j < N; ++j) {
    // ascending: lambda_j = 2 cos((N - j) pi / (N + 1))
    const double want =
        2.0 * std::cos(static_cast<double>(N - j) * kPi /
                       static_cast<double>(N + 1));
    CHECK(std::abs(eig.eigenvalues[j] - want) <= 1e-10);
  }
  for (std::size_t j = 0; j < N; j += 17) {
    CHECK(residual_norm(op.J, eig, j) <= 1e-10 * op.J.norm_bound());
  }
}

TEST_CASE("random matrices: orthonormality, trace, simplicity") {
  const JacobiMatrix j = random_jacobi(500, 11);
  const EigenDecomposition eig = eigendecompose(j);

  const double trace = std::accumulate(j.diag.begin(), j.diag.end(), 0.0);
  const double sum =
      std::accumulate(eig.eigenvalues.begin(), eig.eigenvalues.end(), 0.0);
  CHECK(std::abs(sum - trace) <= 1e-9 * j.norm_bound() * 500);

  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < eig.n; ++k) {
    min_gap = std::min(min_gap, eig.eigenvalues[k] - eig.eigenvalues[k - 1]);
  }
  CHECK(min_gap > 1e-13 * j.norm_bound());

  // spot-check Gram rows
  for (std::size_t a = 0; a < eig.n; a += 61) {
    for (std::size_t b = 0; b < eig.n; b += 61) {
      double dot = 0.0;
      for (std::size_t i = 0; i < eig.n; ++i) dot += eig.vec(a, i) * eig.vec(b, i);
      CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) <= 1e-10);
    }
  }
  for (std::size_t a = 0; a < eig.n; a += 37) {
    CHECK(residual_norm(j, eig, a) <= 1e-10 * j.norm_bound());
  }
}

TEST_CASE("spectral measure satisfies Parseval and catches eigenvectors") {
  const JacobiMatrix j = random_jacobi(120, 3);
  const EigenDecomposition eig = eigendecompose(j);

  std::vector<double> psi(120, 0.0);
  psi[5] = 1.0;
  const SpectralMeasure sm = spectral_measure(j, eig, psi, "delta-5");
  CHECK(std::abs(sm.measure.total - 1.0) <= 1e-10);
  CHECK(sm.psi_norm2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sm.vector_label == "delta-5");
  CHECK(sm.operator_hash == hash_operator(j));

  // an exact eigenvector keeps a single atom after the relative cutoff
  std::vector<double> v3(120);
  for (std::size_t i = 0; i < 120; ++i) v3[i] = eig.vec(3, i);
  const SpectralMeasure one = spectral_measure(j, eig, v3, "v3");
  CHECK(one.measure.size() == 1);
  CHECK(one.measure.atoms[0] == doctest::Approx(eig.eigenvalues[3]).epsilon(1e-12));
  CHECK(one.measure.weights[0] == doctest::Approx(1.0).epsilon(1e-10));

  CHECK_THROWS_AS(spectral_measure(j, eig, std::vector<double>(7, 1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(spectral_measure(j, eig, std::vector<double>(120, 0.0)),
                  std::invalid_argument);
}

TEST_CASE("free two-site delta state splits into half weights") {
  const LatticeOperator op = free_jacobi(2);
  std::vector<double> psi(2, 0.0);
  psi[op.index_of_site(1)] = 1.0;
  const SpectralMeasure sm = spectral_measure(op.J, psi, "delta-1");
  REQUIRE(sm.measure.size() == 2);
  CHECK(sm.measure.atoms[0] == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(sm.measure.atoms[1] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(sm.measure.weights[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sm.measure.weights[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("lattice window and site mapping") {
  const LatticeOperator f = free_jacobi(5);
  CHECK(f.site_origin == 1);
  CHECK(f.index_of_site(1) == 0);
  CHECK(f.index_of_site(5) == 4);
  CHECK_THROWS_AS(f.index_of_site(0), std::out_of_range);
  CHECK_THROWS_AS(f.index_of_site(6), std::out_of_range);

  const LatticeOperator am = almost_mathieu(7, 0.0, 0.5, 0.1, 1.0);
  CHECK(am.site_origin == -3);
  CHECK(am.index_of_site(-3) == 0);
  CHECK(am.index_of_site(3) == 6);
  CHECK(am.index_of_site(1) == 4);
}

TEST_CASE("almost-mathieu diagonal closed forms") {
  // kappa = 0 collapses to the free matrix
  const LatticeOperator z = almost_mathieu(6, 0.0, 0.7, 0.3, 0.0);
  for (double d : z.J.diag) CHECK(d == 0.0);
  for (double b : z.J.offdiag) CHECK(b == 1.0);

  // alpha = 0, theta = 0: constant diagonal kappa
  const LatticeOperator c = almost_mathieu(3, 0.0, 0.0, 0.0, 2.0);
  for (double d : c.J.diag) CHECK(d == 2.0);

  // the lambda bump lands exactly at site 1
  const LatticeOperator bumped = almost_mathieu(6, 0.25, 0.0, 0.0, 2.0);
  for (std::size_t i = 0; i < 6; ++i) {
    const double want = i == bumped.index_of_site(1) ? 2.25 : 2.0;
    CHECK(bumped.J.diag[i] == doctest::Approx(want).epsilon(1e-15));
  }

  CHECK_THROWS_AS(almost_mathieu(1, 0.0, 0.5, 0.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(almost_mathieu(2, 0.5, 0.5, 0.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("quasiperiodic builder matches almost-mathieu under reparametrization") {
  // v = 2 cos(2 pi x) sampled at theta + alpha n equals
  // kappa cos(pi alpha' n + theta') with kappa = 2 lambda, alpha' = 2 alpha,
  // theta' = 2 pi theta
  const std::size_t N = 9;
  const double lam = 1.3, alpha = 0.37, theta = 0.11;
  const LatticeOperator qp = quasiperiodic(
      N, lam, alpha, theta, [](double x) { return 2.0 * std::cos(2.0 * kPi * x); });
  const LatticeOperator am =
      almost_mathieu(N, 0.0, 2.0 * alpha, 2.0 * kPi * theta, 2.0 * lam);
  REQUIRE(qp.J.size() == am.J.size());
  for (std::size_t i = 0; i < N; ++i) {
    CHECK(qp.J.diag[i] == doctest::Approx(am.J.diag[i]).epsilon(1e-12));
  }
  CHECK(qp.site_origin == am.site_origin);

  CHECK_THROWS_AS(
      quasiperiodic(8, 1.0, 0.5, 0.0, [](double) { return 1.0; }),
      std::invalid_argument);
}

TEST_CASE("critical-coupling diagonal model keeps a spread-out delta measure") {
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  const LatticeOperator op = almost_mathieu(400, 0.0, golden, 0.0, 3.0);
  std::vector<double> psi(400, 0.0);
  psi[op.index_of_site(1)] = 1.0;
  const SpectralMeasure sm = spectral_measure(op.J, psi, "delta-1");
  CHECK(std::abs(sm.measure.total - 1.0) <= 1e-9);
  int heavy = 0;
  for (double w : sm.measure.weights) {
    if (w >= 1e-6) ++heavy;
  }
  CHECK(heavy >= 15);
  CHECK(heavy <= 40);
}

TEST_CASE("rank-one perturbation") {
  const JacobiMatrix j({0.4}, {});
  const JacobiMatrix shifted = rank_one_perturb(j, 0.6, 0);
  CHECK(eigendecompose(shifted).eigenvalues[0] == doctest::Approx(1.0));

  const JacobiMatrix j2({0.2, -0.3}, {0.7});
  const JacobiMatrix p2 = rank_one_perturb(j2, 0.5, 1);
  const EigenDecomposition eig = eigendecompose(p2);
  const double a = 0.2, b = -0.3 + 0.5, c = 0.7;
  const double mid = 0.5 * (a + b);
  const double rad = std::sqrt(0.25 * (a - b) * (a - b) + c * c);
  CHECK(eig.eigenvalues[0] == doctest::Approx(mid - rad).epsilon(1e-13));
  CHECK(eig.eigenvalues[1] == doctest::Approx(mid + rad).epsilon(1e-13));

  CHECK_THROWS_AS(rank_one_perturb(j2, 1.0, 2), std::out_of_range);
}

TEST_CASE("half-line free state family measures") {
  const Measure m = free_hamiltonian_measure(2);
  CHECK(m.total() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(ball_mass(m, 0.0, 0.01) ==
        doctest::Approx(2.0 * std::pow(0.01, 0.25)).epsilon(1e-12));
  CHECK_NOTHROW(free_hamiltonian_measure(1));
  CHECK_NOTHROW(free_hamiltonian_measure(50));
  CHECK_THROWS_AS(free_hamiltonian_measure(0), std::invalid_argument);
}

TEST_CASE("operator hashing separates different matrices") {
  const JacobiMatrix a({0.0, 0.0}, {1.0});
  const JacobiMatrix b({0.0, 1e-16}, {1.0});
  const JacobiMatrix c({0.0, 0.0}, {1.0});
  CHECK(hash_operator(a) == hash_operator(c));
  CHECK(hash_operator(a) != hash_operator(b));
}
