#include "specdim/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "specdim/errors.hpp"

namespace specdim {

JacobiMatrix::JacobiMatrix(std::vector<double> diag_in,
                           std::vector<double> offdiag_in)
    : diag(std::move(diag_in)), offdiag(std::move(offdiag_in)) {
  if (diag.empty()) {
    throw std::invalid_argument("Jacobi matrix needs dimension >= 1");
  }
  if (offdiag.size() + 1 != diag.size()) {
    throw std::invalid_argument("offdiag length must be N - 1");
  }
  for (double a : diag) {
    if (!std::isfinite(a)) {
      throw std::invalid_argument("diagonal entries must be finite");
    }
  }
  for (double b : offdiag) {
    if (!(b > 0.0) || !std::isfinite(b)) {
      throw std::invalid_argument("off-diagonal entries must be positive");
    }
  }
}

double JacobiMatrix::norm_bound() const {
  double a = 0.0, b = 0.0;
  for (double v : diag) a = std::max(a, std::abs(v));
  for (double v : offdiag) b = std::max(b, v);
  return a + 2.0 * b;
}

EigenDecomposition eigendecompose(const JacobiMatrix& J) {
  const std::size_t n = J.size();
  std::vector<double> d = J.diag;
  std::vector<double> e(n, 0.0);
  std::copy(J.offdiag.begin(), J.offdiag.end(), e.begin());
  std::vector<double> V(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) V[j * n + j] = 1.0;

  const double eps_mach = std::numeric_limits<double>::epsilon();
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    for (;;) {
      // deflation scan: first m with negligible e[m] relative to neighbors
      std::size_t m = l;
      while (m + 1 < n) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps_mach * dd) break;
        ++m;
      }
      if (m == l) break;
      if (++iter > 60) {
        throw NumericError("QL iteration cap hit at eigenvalue index " +
                           std::to_string(l));
      }
      // Wilkinson shift from the leading 2x2, guarded against e[l] ~ 0
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool underflow = false;
      for (std::size_t i = m; i-- > l;) {
        double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        // rotate eigenvector columns i and i+1 (contiguous in memory)
        double* vi = V.data() + i * n;
        double* vi1 = V.data() + (i + 1) * n;
        for (std::size_t k = 0; k < n; ++k) {
          f = vi1[k];
          vi1[k] = s * vi[k] + c * f;
          vi[k] = c * vi[k] - s * f;
        }
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }

  // sort eigenvalues ascending and permute the columns to match
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&d](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  EigenDecomposition out;
  out.n = n;
  out.eigenvalues.resize(n);
  out.vectors.resize(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    out.eigenvalues[j] = d[order[j]];
    std::copy(V.begin() + static_cast<std::ptrdiff_t>(order[j] * n),
              V.begin() + static_cast<std::ptrdiff_t>(order[j] * n + n),
              out.vectors.begin() + static_cast<std::ptrdiff_t>(j * n));
  }
  return out;
}

SpectralMeasure spectral_measure(const JacobiMatrix& J,
                                 const std::vector<double>& psi,
                                 std::string label) {
  return spectral_measure(J, eigendecompose(J), psi, std::move(label));
}

SpectralMeasure spectral_measure(const JacobiMatrix& J,
                                 const EigenDecomposition& eig,
                                 const std::vector<double>& psi,
                                 std::string label) {
  const std::size_t n = J.size();
  if (psi.size() != n) {
    throw std::invalid_argument("state vector length must match the matrix");
  }
  double norm2 = 0.0;
  for (double v : psi) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("state vector entries must be finite");
    }
    norm2 += v * v;
  }
  if (norm2 == 0.0) {
    throw std::invalid_argument("state vector must be nonzero");
  }

  std::vector<double> atoms;
  std::vector<double> weights;
  atoms.reserve(n);
  weights.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    double a = 0.0;
    const double* col = eig.vectors.data() + j * n;
    for (std::size_t i = 0; i < n; ++i) a += col[i] * psi[i];
    const double w = a * a;
    if (!atoms.empty() && atoms.back() == eig.eigenvalues[j]) {
      weights.back() += w;  // exactly coincident levels carry one atom
    } else {
      atoms.push_back(eig.eigenvalues[j]);
      weights.push_back(w);
    }
  }

  const double cutoff = 1e-14 * norm2;
  std::vector<double> kept_atoms;
  std::vector<double> kept_weights;
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    if (weights[j] >= cutoff) {
      kept_atoms.push_back(atoms[j]);
      kept_weights.push_back(weights[j]);
    }
  }
  if (kept_atoms.empty()) {
    throw NumericError("all spectral weights fell below the drop threshold");
  }

  SpectralMeasure sm{AtomicMeasure(std::move(kept_atoms),
                                   std::move(kept_weights)),
                     norm2, hash_operator(J), std::move(label)};
  return sm;
}

std::size_t LatticeOperator::index_of_site(long site) const {
  const long idx = site - site_origin;
  if (idx < 0 || static_cast<std::size_t>(idx) >= J.size()) {
    throw std::out_of_range("lattice site " + std::to_string(site) +
                            " is outside the truncation window");
  }
  return static_cast<std::size_t>(idx);
}

LatticeOperator free_jacobi(std::size_t N) {
  if (N < 1) {
    throw std::invalid_argument("free Jacobi matrix needs N >= 1");
  }
  return LatticeOperator{
      JacobiMatrix(std::vector<double>(N, 0.0),
                   std::vector<double>(N > 0 ? N - 1 : 0, 1.0)),
      1};
}

LatticeOperator almost_mathieu(std::size_t N, double lambda, double alpha,
                               double theta, double kappa) {
  if (N < 2) {
    throw std::invalid_argument("almost-Mathieu truncation needs N >= 2");
  }
  for (double v : {lambda, alpha, theta, kappa}) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("almost-Mathieu parameters must be finite");
    }
  }
  const long origin = -static_cast<long>(N / 2);
  std::vector<double> diag(N);
  const double pi = std::acos(-1.0);
  for (std::size_t i = 0; i < N; ++i) {
    const double site = static_cast<double>(origin + static_cast<long>(i));
    diag[i] = kappa * std::cos(pi * alpha * site + theta);
  }
  LatticeOperator op{JacobiMatrix(std::move(diag),
                                  std::vector<double>(N - 1, 1.0)),
                     origin};
  if (lambda != 0.0) {
    if (N < 3) {
      throw std::invalid_argument(
          "rank-one bump at site 1 needs N >= 3 (site 1 outside the window)");
    }
    op.J.diag[op.index_of_site(1)] += lambda;
  }
  return op;
}

LatticeOperator quasiperiodic(std::size_t N, double lambda_coupling,
                              double alpha, double theta,
                              const std::function<double(double)>& v) {
  if (N < 2) {
    throw std::invalid_argument("quasiperiodic truncation needs N >= 2");
  }
  if (!v) {
    throw std::invalid_argument("sampling function must be callable");
  }
  for (double x : {lambda_coupling, alpha, theta}) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument("quasiperiodic parameters must be finite");
    }
  }
  const long origin = -static_cast<long>(N / 2);
  std::vector<double> samples(N);
  double vmin = std::numeric_limits<double>::infinity();
  double vmax = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < N; ++i) {
    const double site = static_cast<double>(origin + static_cast<long>(i));
    const double val = v(theta + alpha * site);
    if (!std::isfinite(val)) {
      throw std::invalid_argument("sampling function produced a non-finite value");
    }
    samples[i] = val;
    vmin = std::min(vmin, val);
    vmax = std::max(vmax, val);
  }
  if (!(vmax > vmin)) {
    throw std::invalid_argument("sampling function is constant on the window");
  }
  std::vector<double> diag(N);
  for (std::size_t i = 0; i < N; ++i) diag[i] = lambda_coupling * samples[i];
  return LatticeOperator{JacobiMatrix(std::move(diag),
                                      std::vector<double>(N - 1, 1.0)),
                         origin};
}

JacobiMatrix rank_one_perturb(const JacobiMatrix& J, double lambda,
                              std::size_t site) {
  if (!std::isfinite(lambda)) {
    throw std::invalid_argument("perturbation strength must be finite");
  }
  if (site >= J.size()) {
    throw std::out_of_range("perturbation site " + std::to_string(site) +
                            " out of range for N = " + std::to_string(J.size()));
  }
  JacobiMatrix out = J;
  out.diag[site] += lambda;
  return out;
}

Measure free_hamiltonian_measure(int n) {
  if (n < 1) {
    throw std::invalid_argument("state index n must be >= 1");
  }
  const double theta_n = 0.5 - 1.0 / (n + 2.0);
  return make_power_law(theta_n);
}

std::uint64_t hash_operator(const JacobiMatrix& J) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* data, std::size_t len) {
    const unsigned char* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ull;
    }
  };
  const std::uint64_t n = J.diag.size();
  mix(&n, sizeof n);
  mix(J.diag.data(), J.diag.size() * sizeof(double));
  mix(J.offdiag.data(), J.offdiag.size() * sizeof(double));
  return h;
}

}  // namespace specdim
