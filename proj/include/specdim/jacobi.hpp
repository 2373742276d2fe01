#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "specdim/measure.hpp"

namespace specdim {

// Real symmetric tridiagonal matrix with positive off-diagonal entries
// (irreducible, hence simple spectrum).
struct JacobiMatrix {
  std::vector<double> diag;
  std::vector<double> offdiag;  // size N-1; all > 0

  JacobiMatrix(std::vector<double> diag_in, std::vector<double> offdiag_in);

  std::size_t size() const { return diag.size(); }
  // max |a_i| + 2 max b_i: a crude but safe operator-norm bound used to
  // scale residual tolerances.
  double norm_bound() const;
};

// Full spectral data. Eigenvectors are column-major: column j holds the unit
// eigenvector of eigenvalues[j] at vectors[j*n + i], i = 0..n-1. Column-major
// storage keeps the QL plane rotations on contiguous memory.
struct EigenDecomposition {
  std::vector<double> eigenvalues;  // ascending
  std::vector<double> vectors;
  std::size_t n = 0;

  double vec(std::size_t j, std::size_t i) const { return vectors[j * n + i]; }
};

// Implicit-shift QL with Wilkinson shifts, 60-iteration cap per eigenvalue
// (NumericError on failure). Eigenvalues are returned sorted ascending with
// the eigenvector columns permuted to match.
EigenDecomposition eigendecompose(const JacobiMatrix& J);

// Atomic spectral measure of a state: atoms at the eigenvalues, weights
// <v_j, psi>^2. Weights below 1e-14 * |psi|^2 are dropped; eigenvalues that
// round to the same double (exponentially close pairs do) are merged.
struct SpectralMeasure {
  AtomicMeasure measure;
  double psi_norm2 = 0.0;  // = measure.total up to roundoff (Parseval)
  std::uint64_t operator_hash = 0;
  std::string vector_label;
};

SpectralMeasure spectral_measure(const JacobiMatrix& J,
                                 const std::vector<double>& psi,
                                 std::string label = "");
SpectralMeasure spectral_measure(const JacobiMatrix& J,
                                 const EigenDecomposition& eig,
                                 const std::vector<double>& psi,
                                 std::string label = "");

// Finite lattice window with Dirichlet ends. site_origin maps lattice labels
// to vector indices: index = site - site_origin.
struct LatticeOperator {
  JacobiMatrix J;
  long site_origin = 1;

  std::size_t index_of_site(long site) const;  // throws if outside the window
};

// Free Jacobi matrix (diag 0, offdiag 1) on sites 1..N.
LatticeOperator free_jacobi(std::size_t N);

// diag kappa*cos(pi*alpha*n + theta) on the centered window
// n = -floor(N/2) .. ceil(N/2)-1, offdiag 1, plus `lambda` added at the site
// of delta_1 (rank-one perturbation as a diagonal bump). lambda != 0 needs
// N >= 3 so that site 1 is inside the window.
LatticeOperator almost_mathieu(std::size_t N, double lambda, double alpha,
                               double theta, double kappa);

// diag lambda_coupling * v(theta + alpha*n) on the centered window; v must be
// nonconstant on the sampled sites.
LatticeOperator quasiperiodic(std::size_t N, double lambda_coupling,
                              double alpha, double theta,
                              const std::function<double(double)>& v);

// Adds lambda to diag[site] (vector index, not lattice label).
JacobiMatrix rank_one_perturb(const JacobiMatrix& J, double lambda,
                              std::size_t site);

// Power-law density measure with theta_n = 1/2 - 1/(n+2): the spectral
// measure of the half-line free Hamiltonian state family; n >= 1.
Measure free_hamiltonian_measure(int n);

// FNV-1a over the raw diag/offdiag bytes; identifies an operator in output
// metadata.
std::uint64_t hash_operator(const JacobiMatrix& J);

}  // namespace specdim
