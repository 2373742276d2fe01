#include "specdim/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "specdim/dimension.hpp"
#include "specdim/dynamics.hpp"
#include "specdim/jacobi.hpp"
#include "specdim/measure.hpp"
#include "specdim/parallel.hpp"

namespace specdim {

namespace {

// raw 53-bit mantissa mapping; unlike the distribution adapters this is
// bit-identical across standard libraries
double unit_double(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << v;
  return os.str();
}

struct Checker {
  bool ok = true;
  std::string detail;

  void fail(const std::string& what) {
    ok = false;
    append(what);
  }
  void check(bool cond, const std::string& what) {
    if (!cond) fail(what);
  }
  void append(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

const EpsilonGrid& density_grid() {
  static const EpsilonGrid grid(0.25, 24, 0.5);
  return grid;
}

const EpsilonGrid& triadic_grid() {
  static const EpsilonGrid grid(1.0 / 9.0, 14, 1.0 / 3.0);
  return grid;
}

constexpr Window kTriadicWindow{2, 10};  // scales 3^-4 .. 3^-12
const double kLn2Ln3 = std::log(2.0) / std::log(3.0);

// ---- criterion bodies ----------------------------------------------------

Checker criterion_power_law_targets() {
  Checker c;
  const Window w = default_window(density_grid());
  double worst = 0.0;
  for (int n : {1, 2, 4}) {
    const Measure m = free_hamiltonian_measure(n);
    const double target = 2.0 / (n + 2.0);
    for (double s : {1.5, 2.0, 3.0}) {
      const DimensionEstimate est =
          estimate_dimensions(m, s, density_grid(), IntegralKind::correlation, w);
      const double dev = std::abs(est.regression_est - target);
      worst = std::max(worst, dev);
      c.check(dev <= 0.05,
              "n=" + std::to_string(n) + " s=" + fmt(s, 1) + ": got " +
                  fmt(est.regression_est) + ", target " + fmt(target) +
                  " +- 0.05");
    }
  }
  if (c.ok) {
    c.append("all nine (n, s) regressions within 0.05; worst dev " + fmt(worst));
  } else {
    c.append(
        "measured slopes follow min(1, s/((s-1)(n+2))), which meets the "
        "constant-in-s target only at s=2");
  }
  return c;
}

Checker criterion_ac_lower_floor() {
  Checker c;
  const Window w = default_window(density_grid());
  double worst = 1.0;
  for (int n : {1, 2, 4}) {
    const Measure m = free_hamiltonian_measure(n);
    for (double q : {0.25, 0.5}) {
      const DimensionEstimate est =
          estimate_dimensions(m, q, density_grid(), IntegralKind::correlation, w);
      worst = std::min(worst, est.regression_est);
      c.check(est.regression_est >= 0.95,
              "n=" + std::to_string(n) + " q=" + fmt(q, 2) + ": got " +
                  fmt(est.regression_est) + ", need >= 0.95");
    }
  }
  if (c.ok) c.append("all six regressions >= 0.95; smallest " + fmt(worst));
  return c;
}

Checker criterion_atom_collapse() {
  Checker c;
  // A: 1000 evenly spaced atoms, random weights; whole window under half-gap
  std::mt19937_64 gen(12345);
  std::vector<double> atoms_a(1000), weights_a(1000);
  for (std::size_t i = 0; i < 1000; ++i) {
    atoms_a[i] = static_cast<double>(i) / 999.0;
    weights_a[i] = 1.0 + unit_double(gen);
  }
  const Measure dense(AtomicMeasure(atoms_a, weights_a));
  const EpsilonGrid grid_a(0.25, 36, 0.5);
  const Window win_a = default_window(grid_a);
  // B: few irregular atoms, min gap 0.06, grid entirely under half-gap
  const std::vector<double> atoms_b = {0.0,  0.06, 0.13, 0.21, 0.30, 0.40,
                                       0.47, 0.55, 0.64, 0.74, 0.85, 0.97,
                                       1.10, 1.24, 1.39, 1.55, 1.72};
  std::vector<double> weights_b(atoms_b.size());
  for (std::size_t i = 0; i < weights_b.size(); ++i) {
    weights_b[i] = 0.2 + 0.05 * static_cast<double>(i);
  }
  const Measure sparse(AtomicMeasure(atoms_b, weights_b));
  const EpsilonGrid grid_b(0.45 * 0.06, 12, 0.5);
  const Window win_b = default_window(grid_b);

  for (double s : {1.5, 2.0, 3.0}) {
    const DimensionEstimate a = estimate_dimensions(
        dense, s, grid_a, IntegralKind::correlation, win_a);
    c.check(a.upper_est <= 0.05, "dense set s=" + fmt(s, 1) + ": upper " +
                                     fmt(a.upper_est) + " > 0.05");
    c.check(a.upper_est == 0.0 && a.lower_est == 0.0,
            "dense set s=" + fmt(s, 1) + ": window below half-gap but slopes "
                                         "not exactly zero");
    const DimensionEstimate b = estimate_dimensions(
        sparse, s, grid_b, IntegralKind::correlation, win_b);
    c.check(b.upper_est <= 0.05, "sparse set s=" + fmt(s, 1) + ": upper " +
                                     fmt(b.upper_est) + " > 0.05");
    c.check(b.upper_est == 0.0 && b.lower_est == 0.0,
            "sparse set s=" + fmt(s, 1) + ": window below half-gap but slopes "
                                          "not exactly zero");
  }
  if (c.ok) {
    c.append(
        "1000-atom and 17-atom sets: all window slopes exactly 0 for s in "
        "{1.5, 2, 3}");
  }
  return c;
}

Checker criterion_cantor() {
  Checker c;
  const Measure cantor = make_cantor(16);
  double worst = 0.0;
  for (double q : {0.5, 2.0}) {
    const DimensionEstimate est = estimate_dimensions(
        cantor, q, triadic_grid(), IntegralKind::correlation, kTriadicWindow);
    const double dev = std::abs(est.regression_est - kLn2Ln3);
    worst = std::max(worst, dev);
    c.check(dev <= 0.02, "q=" + fmt(q, 1) + ": got " +
                             fmt(est.regression_est) + ", target " +
                             fmt(kLn2Ln3) + " +- 0.02");
  }
  const double h = hausdorff_upper(cantor, 1000, triadic_grid(), 0.99);
  c.check(std::abs(h - kLn2Ln3) <= 0.03,
          "hausdorff " + fmt(h) + ", target " + fmt(kLn2Ln3) + " +- 0.03");
  if (c.ok) {
    c.append("regressions dev " + fmt(worst) + ", hausdorff " + fmt(h) +
             " vs ln2/ln3 = " + fmt(kLn2Ln3));
  }
  return c;
}

struct ReferenceMeasure {
  std::string name;
  Measure m;
  const EpsilonGrid& grid;
  Window window;
};

std::vector<ReferenceMeasure> reference_measures() {
  std::vector<ReferenceMeasure> out;
  out.push_back({"uniform", make_uniform(0.0, 1.0), density_grid(),
                 default_window(density_grid())});
  out.push_back({"power-law-n2", free_hamiltonian_measure(2), density_grid(),
                 default_window(density_grid())});
  out.push_back({"cantor", make_cantor(16), triadic_grid(), kTriadicWindow});
  return out;
}

Checker criterion_monotone_and_kinds() {
  Checker c;
  const std::vector<double> qs = {0.25, 0.5, 2.0, 3.0, 5.0};
  double worst_mono = 0.0;
  double worst_gap = 0.0;
  for (const ReferenceMeasure& ref : reference_measures()) {
    std::vector<double> corr;
    for (double q : qs) {
      const DimensionEstimate ce = estimate_dimensions(
          ref.m, q, ref.grid, IntegralKind::correlation, ref.window);
      const DimensionEstimate me = estimate_dimensions(
          ref.m, q, ref.grid, IntegralKind::mean, ref.window);
      const double gap = std::abs(ce.regression_est - me.regression_est);
      worst_gap = std::max(worst_gap, gap);
      c.check(gap <= 0.05, ref.name + " q=" + fmt(q, 2) +
                               ": |correlation - mean| = " + fmt(gap) +
                               " > 0.05");
      corr.push_back(ce.regression_est);
    }
    for (std::size_t i = 0; i + 1 < corr.size(); ++i) {
      const double rise = corr[i + 1] - corr[i];
      worst_mono = std::max(worst_mono, rise);
      c.check(rise <= 0.02,
              ref.name + ": regression rises by " + fmt(rise) + " from q=" +
                  fmt(qs[i], 2) + " to q=" + fmt(qs[i + 1], 2));
    }
  }
  if (c.ok) {
    c.append("worst monotonicity rise " + fmt(worst_mono) +
             ", worst kind gap " + fmt(worst_gap));
  }
  return c;
}

Checker criterion_ordering_sandwich() {
  Checker c;
  for (const ReferenceMeasure& ref : reference_measures()) {
    const DimensionEstimate hi_q = estimate_dimensions(
        ref.m, 0.5, ref.grid, IntegralKind::correlation, ref.window);
    const DimensionEstimate lo_s = estimate_dimensions(
        ref.m, 2.0, ref.grid, IntegralKind::correlation, ref.window);
    const double h = hausdorff_upper(ref.m, 1000, ref.grid, 0.99);
    const double lo = lo_s.regression_est - 0.05;
    const double hi = hi_q.regression_est + 0.05;
    if (h >= lo && h <= hi) {
      c.append(ref.name + ": hausdorff " + fmt(h) + " in [" + fmt(lo) + ", " +
               fmt(hi) + "]");
    } else {
      c.fail(ref.name + ": hausdorff " + fmt(h) + " outside [" + fmt(lo) +
             ", " + fmt(hi) + "]");
    }
  }
  return c;
}

Checker criterion_eigensolver() {
  Checker c;
  const std::size_t N = 2000;
  const LatticeOperator op = free_jacobi(N);
  const auto start = std::chrono::steady_clock::now();
  const EigenDecomposition eig = eigendecompose(op.J);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  c.check(seconds <= 10.0,
          "decomposition took " + fmt(seconds, 2) + " s, budget 10 s");

  const double pi = std::acos(-1.0);
  double eig_err = 0.0;
  for (std::size_t j = 0; j < N; ++j) {
    // ascending eigenvalue j matches mode k = N - j of the exact spectrum
    const double exact =
        2.0 * std::cos(static_cast<double>(N - j) * pi / (N + 1));
    eig_err = std::max(eig_err, std::abs(eig.eigenvalues[j] - exact));
  }
  c.check(eig_err <= 1e-9,
          "max eigenvalue error " + fmt(eig_err * 1e12, 3) + "e-12 > 1e-9");

  const double bound = op.J.norm_bound();
  std::vector<double> resid(N, 0.0);
  parallel_for(N, [&](std::size_t j) {
    const double* v = eig.vectors.data() + j * N;
    const double l = eig.eigenvalues[j];
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      double r = (op.J.diag[i] - l) * v[i];
      if (i > 0) r += op.J.offdiag[i - 1] * v[i - 1];
      if (i + 1 < N) r += op.J.offdiag[i] * v[i + 1];
      acc += r * r;
    }
    resid[j] = std::sqrt(acc);
  });
  double max_resid = 0.0;
  for (double r : resid) max_resid = std::max(max_resid, r);
  c.check(max_resid <= 1e-10 * bound,
          "max residual " + fmt(max_resid * 1e12, 3) + "e-12 > 1e-10 * " +
              fmt(bound, 1));

  std::vector<double> gram(N, 0.0);
  parallel_for(N, [&](std::size_t j) {
    const double* vj = eig.vectors.data() + j * N;
    double dev = 0.0;
    for (std::size_t k = j; k < N; ++k) {
      const double* vk = eig.vectors.data() + k * N;
      double dot = 0.0;
      for (std::size_t i = 0; i < N; ++i) dot += vj[i] * vk[i];
      dev = std::max(dev, std::abs(dot - (j == k ? 1.0 : 0.0)));
    }
    gram[j] = dev;
  });
  double max_gram = 0.0;
  for (double g : gram) max_gram = std::max(max_gram, g);
  c.check(max_gram <= 1e-10,
          "max Gram deviation " + fmt(max_gram * 1e12, 3) + "e-12 > 1e-10");

  if (c.ok) {
    c.append("N=2000 in " + fmt(seconds, 2) + " s; eig err " +
             fmt(eig_err * 1e12, 3) + "e-12, residual " +
             fmt(max_resid * 1e12, 3) + "e-12, Gram " +
             fmt(max_gram * 1e12, 3) + "e-12");
  }
  return c;
}

Checker criterion_return_closed_form() {
  Checker c;
  std::mt19937_64 gen(777);
  const std::size_t M = 50;
  std::vector<double> atoms(M), weights(M);
  for (std::size_t j = 0; j < M; ++j) {
    atoms[j] = -2.0 + 4.0 * (static_cast<double>(j + 1) + unit_double(gen)) /
                          (static_cast<double>(M) + 1.0);
  }
  double wsum = 0.0;
  for (std::size_t j = 0; j < M; ++j) {
    weights[j] = 0.05 + unit_double(gen);
    wsum += weights[j];
  }
  for (double& w : weights) w /= wsum;
  const SpectralMeasure sm{AtomicMeasure(atoms, weights), 1.0, 0,
                           "closed-form-check"};

  const int T = 20;
  std::vector<double> ts(T);
  for (int i = 0; i < T; ++i) {
    ts[static_cast<std::size_t>(i)] =
        0.1 * std::pow(1000.0, (i + 0.5) / static_cast<double>(T));
  }
  std::vector<double> devs(T, 0.0);
  parallel_for(static_cast<std::size_t>(T), [&](std::size_t i) {
    const double t = ts[i];
    // composite Simpson on (1/t) * integral of |sum_j w_j e^(-i s l_j)|^2
    const long steps = 2 * static_cast<long>(std::ceil(t * 128.0));
    const double h = t / static_cast<double>(steps);
    auto f = [&](double s) {
      double re = 0.0, im = 0.0;
      for (std::size_t j = 0; j < M; ++j) {
        re += weights[j] * std::cos(s * atoms[j]);
        im += weights[j] * std::sin(s * atoms[j]);
      }
      return re * re + im * im;
    };
    double sum = f(0.0) + f(t);
    for (long k = 1; k < steps; ++k) {
      sum += f(static_cast<double>(k) * h) * (k % 2 == 1 ? 4.0 : 2.0);
    }
    const double quad = sum * h / 3.0 / t;
    devs[i] = std::abs(return_probability_avg(sm, t) - quad);
  });
  double worst = 0.0;
  for (double d : devs) worst = std::max(worst, d);
  c.check(worst <= 1e-6,
          "max |closed form - quadrature| = " + fmt(worst * 1e9, 3) +
              "e-9 > 1e-6");
  if (c.ok) {
    c.append("50 atoms, 20 times in [0.1, 100]: max dev " +
             fmt(worst * 1e9, 3) + "e-9");
  }
  return c;
}

Checker criterion_return_vs_dimension() {
  Checker c;
  const LatticeOperator op = free_jacobi(400);
  std::vector<double> psi(op.J.size(), 0.0);
  psi[op.index_of_site(1)] = 1.0;
  const SpectralMeasure sm = spectral_measure(op.J, psi, "delta-site-1");

  const TimeGrid tgrid(1.0, 100.0, 20);
  const Window twin{0, tgrid.points - 1};
  const DynamicsResult ret = return_exponents(sm, tgrid, twin);

  const EpsilonGrid egrid(1.0, 16, 0.75);
  const Window ewin{0, egrid.levels};
  const DimensionEstimate est = estimate_dimensions(
      Measure(sm.measure), 2.0, egrid, IntegralKind::correlation, ewin);

  const double gap = std::abs(ret.regression_exponent - est.regression_est);
  c.check(gap <= 0.15, "exponent " + fmt(ret.regression_exponent) +
                           " vs dimension " + fmt(est.regression_est) +
                           ": gap " + fmt(gap) + " > 0.15");
  if (c.ok) {
    c.append("decay exponent " + fmt(ret.regression_exponent) +
             ", dimension estimate " + fmt(est.regression_est) + ", gap " +
             fmt(gap));
  }
  return c;
}

Checker criterion_moment_lower_bound() {
  Checker c;
  const LatticeOperator op = free_jacobi(400);
  std::vector<double> psi(op.J.size(), 0.0);
  const std::size_t j0 = op.index_of_site(1);
  psi[j0] = 1.0;

  const TimeGrid tgrid(5.0, 80.0, 12);
  const Window twin{0, tgrid.points - 1};
  const EpsilonGrid egrid(1.0, 16, 0.75);
  const Window ewin{0, egrid.levels};
  const GuarneriReport report =
      check_guarneri(op.J, psi, {1.0, 2.0}, tgrid, twin, egrid, ewin, j0);

  for (const GuarneriEntry& e : report.entries) {
    c.check(e.slack_minus >= -0.1,
            "p=" + fmt(e.p, 0) + ": growth " + fmt(e.beta_minus) +
                " under dimension " + fmt(e.dim_lower) + " by more than 0.1");
    if (e.p == 2.0) {
      c.check(std::abs(e.beta_regression - 1.0) <= 0.1,
              "p=2 growth regression " + fmt(e.beta_regression) +
                  " not within 0.1 of ballistic 1");
    }
    c.append("p=" + fmt(e.p, 0) + ": growth " + fmt(e.beta_minus) +
             " >= dimension " + fmt(e.dim_lower) + " (slack " +
             fmt(e.slack_minus) + ")");
  }
  c.append(report.scale_matched ? "scales matched" : "scales mismatched");
  return c;
}

Checker criterion_mixture_dominance() {
  Checker c;
  const Measure ac = make_uniform(0.0, 1.0);
  const AtomicMeasure pp({0.6180339887}, {1.0});
  const std::vector<int> ks = {1, 2, 4, 8};
  const EpsilonGrid grid(0.25, 36, 0.5);
  const Window win{18, 31};

  const std::vector<DimensionEstimate> upper =
      mixture_sweep(ac, pp, ks, 2.0, grid, win);
  const std::vector<DimensionEstimate> lower =
      mixture_sweep(ac, pp, ks, 0.5, grid, win);
  double worst_upper = 0.0;
  double worst_lower = 1.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    worst_upper = std::max(worst_upper, upper[i].upper_est);
    worst_lower = std::min(worst_lower, lower[i].lower_est);
    c.check(upper[i].upper_est <= 0.05,
            "k=" + std::to_string(ks[i]) + ": s=2 upper estimate " +
                fmt(upper[i].upper_est) + " > 0.05");
    c.check(lower[i].lower_est >= 0.95,
            "k=" + std::to_string(ks[i]) + ": q=0.5 lower estimate " +
                fmt(lower[i].lower_est) + " < 0.95");
  }
  if (c.ok) {
    c.append("k in {1,2,4,8}: atom side collapses (max " + fmt(worst_upper) +
             "), a.c. side holds (min " + fmt(worst_lower) + ")");
  }
  return c;
}

struct CriterionSpec {
  int id;
  const char* name;
  Checker (*body)();
};

const CriterionSpec kCriteria[] = {
    {1, "power-law-dimension-targets", criterion_power_law_targets},
    {2, "ac-lower-dimension-floor", criterion_ac_lower_floor},
    {3, "atom-collapse", criterion_atom_collapse},
    {4, "cantor-self-similarity", criterion_cantor},
    {5, "q-monotonicity-and-kind-agreement", criterion_monotone_and_kinds},
    {6, "dimension-ordering-sandwich", criterion_ordering_sandwich},
    {7, "eigensolver-quality", criterion_eigensolver},
    {8, "return-probability-closed-form", criterion_return_closed_form},
    {9, "return-exponent-vs-dimension", criterion_return_vs_dimension},
    {10, "moment-growth-lower-bound", criterion_moment_lower_bound},
    {11, "mixture-atom-dominance", criterion_mixture_dominance},
};

bool env_inject_fail() {
  const char* v = std::getenv("SPECDIM_VERIFY_INJECT_FAIL");
  return v != nullptr && v[0] != '\0' && std::string(v) != "0";
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  for (int id : options.only) {
    const bool known =
        std::any_of(std::begin(kCriteria), std::end(kCriteria),
                    [id](const CriterionSpec& s) { return s.id == id; });
    if (!known) {
      throw std::invalid_argument("unknown criterion id: " + std::to_string(id));
    }
  }
  std::vector<CriterionResult> results;
  for (const CriterionSpec& spec : kCriteria) {
    if (!options.only.empty() &&
        std::find(options.only.begin(), options.only.end(), spec.id) ==
            options.only.end()) {
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    r.id = spec.id;
    r.name = spec.name;
    try {
      const Checker c = spec.body();
      r.passed = c.ok;
      r.detail = c.detail;
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    results.push_back(std::move(r));
  }
  if (options.inject_fail || env_inject_fail()) {
    CriterionResult r;
    r.id = 0;
    r.name = "injected-failure";
    r.passed = false;
    r.detail = "artificial failure requested by the test hook";
    results.push_back(std::move(r));
  }
  return results;
}

bool print_acceptance(std::ostream& out,
                      const std::vector<CriterionResult>& results) {
  bool all = true;
  int passed = 0;
  for (const CriterionResult& r : results) {
    all = all && r.passed;
    passed += r.passed ? 1 : 0;
    out << (r.passed ? "PASS" : "FAIL") << "  " << std::setw(2) << r.id << "  "
        << r.name << "  (" << fmt(r.seconds, 1) << " s)";
    if (!r.detail.empty()) out << "  " << r.detail;
    out << '\n';
  }
  out << (all ? "OK" : "FAILED") << ": " << passed << "/" << results.size()
      << " criteria passed\n";
  return all;
}

}  // namespace specdim
