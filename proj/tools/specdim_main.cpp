#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "specdim/acceptance.hpp"
#include "specdim/dimension.hpp"
#include "specdim/dynamics.hpp"
#include "specdim/errors.hpp"
#include "specdim/jacobi.hpp"
#include "specdim/measure.hpp"
#include "specdim/spec_json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using specdim::default_window;
using specdim::parse_window;
using specdim::validate_window;
using specdim::Window;

namespace {

struct Config {
  std::string spec_path;
  std::vector<double> q{0.5, 2.0};
  double eps_max = 0.25;
  int levels = 24;
  double ratio = 0.5;
  std::string window_text;  // "lo:hi"; empty selects the default window
  std::string kind_text = "correlation";
  int nodes = 2048;
  int samples = 1000;
  double t_min = 1.0;
  double t_max = 100.0;
  int t_points = 64;
  std::string t_window_text;
  std::vector<double> p{2.0};
  std::string out_dir = "specdim_out";
  long seed = 0;
  std::string format = "csv";
  bool print_config = false;
};

void add_grid_options(CLI::App* cmd, Config& cfg) {
  cmd->add_option("--spec", cfg.spec_path, "input spec file (JSON)");
  cmd->add_option("--eps-max", cfg.eps_max, "coarsest scale of the eps grid");
  cmd->add_option("--levels", cfg.levels, "number of eps refinements");
  cmd->add_option("--ratio", cfg.ratio, "scale ratio between eps levels");
  cmd->add_option("--window", cfg.window_text,
                  "eps-level window lo:hi (default drops coarse/fine ends)");
  cmd->add_option("--nodes", cfg.nodes, "quadrature nodes for density parts");
  cmd->add_option("--out", cfg.out_dir, "output directory");
  cmd->add_option("--seed", cfg.seed, "seed echoed into the config record");
  cmd->add_option("--format", cfg.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_flag("--print-config", cfg.print_config,
                "print the resolved configuration and exit");
}

Window resolve_window(const std::string& text, int levels) {
  const Window w = text.empty() ? default_window(levels) : parse_window(text);
  validate_window(w, levels);
  return w;
}

std::string window_string(const Window& w) {
  return std::to_string(w.lo) + ":" + std::to_string(w.hi);
}

json config_json(const std::string& command, const Config& cfg,
                 const Window& window, const Window* t_window) {
  json j{{"command", command},
         {"spec", cfg.spec_path},
         {"q", cfg.q},
         {"eps_max", cfg.eps_max},
         {"levels", cfg.levels},
         {"ratio", cfg.ratio},
         {"window", window_string(window)},
         {"kind", cfg.kind_text},
         {"nodes", cfg.nodes},
         {"samples", cfg.samples},
         {"seed", cfg.seed},
         {"format", cfg.format},
         {"threads_env", "SPECDIM_THREADS"}};
  if (t_window != nullptr) {
    j["t_min"] = cfg.t_min;
    j["t_max"] = cfg.t_max;
    j["t_points"] = cfg.t_points;
    j["t_window"] = window_string(*t_window);
    j["p"] = cfg.p;
  }
  return j;
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write output file: " + path.string());
  }
  out << content;
}

void write_json_file(const fs::path& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

json estimate_entry(const specdim::DimensionEstimate& est,
                    const std::string& file, bool embed_series) {
  json e = specdim::summary_json(est);
  if (!file.empty()) e["file"] = file;
  if (embed_series) {
    e["series"] = {{"eps", est.series.eps},
                   {"integral", est.series.integral},
                   {"local_slope", est.series.local_slope},
                   {"endpoint_slope", est.series.endpoint_slope}};
  }
  return e;
}

std::string series_csv(const specdim::DimensionEstimate& est) {
  std::ostringstream os;
  specdim::write_series_csv(os, est);
  return os.str();
}

int run_analyze_measure(const Config& cfg) {
  const Window window = resolve_window(cfg.window_text, cfg.levels);
  const json cj = config_json("analyze-measure", cfg, window, nullptr);
  if (cfg.print_config) {
    std::cout << cj.dump(2) << '\n';
    return 0;
  }
  const specdim::Measure m =
      specdim::parse_measure(specdim::load_json_file(cfg.spec_path));
  const specdim::EpsilonGrid grid(cfg.eps_max, cfg.levels, cfg.ratio);
  const specdim::IntegralKind kind = specdim::parse_kind(cfg.kind_text);

  fs::create_directories(cfg.out_dir);
  json summary{{"config", cj}, {"total_mass", m.total()}};
  json entries = json::array();
  const bool embed = cfg.format == "json";
  for (std::size_t i = 0; i < cfg.q.size(); ++i) {
    const specdim::DimensionEstimate est =
        specdim::estimate_dimensions(m, cfg.q[i], grid, kind, window,
                                     cfg.nodes);
    std::string file;
    if (!embed) {
      file = "dims_" + std::to_string(i) + ".csv";
      write_text_file(fs::path(cfg.out_dir) / file, series_csv(est));
    }
    entries.push_back(estimate_entry(est, file, embed));
    std::cout << "q=" << est.q << " " << specdim::to_string(est.kind)
              << ": lower " << est.lower_est << ", upper " << est.upper_est
              << ", regression " << est.regression_est << '\n';
  }
  summary["estimates"] = entries;
  summary["hausdorff_upper"] =
      specdim::hausdorff_upper(m, cfg.samples, grid, 0.99);
  write_json_file(fs::path(cfg.out_dir) / "summary.json", summary);
  std::cout << "hausdorff upper estimate: " << summary["hausdorff_upper"]
            << "\nwrote " << (fs::path(cfg.out_dir) / "summary.json").string()
            << '\n';
  return 0;
}

int run_analyze_operator(const Config& cfg) {
  const Window window = resolve_window(cfg.window_text, cfg.levels);
  const json cj = config_json("analyze-operator", cfg, window, nullptr);
  if (cfg.print_config) {
    std::cout << cj.dump(2) << '\n';
    return 0;
  }
  const json spec = specdim::load_json_file(cfg.spec_path);
  const json op_spec = spec.contains("operator") ? spec.at("operator") : spec;
  const specdim::LatticeOperator op = specdim::parse_operator(op_spec);
  const json vec_spec = spec.contains("vector")
                            ? spec.at("vector")
                            : json{{"vector", "delta"}, {"site", 1}};
  const std::vector<double> psi = specdim::parse_vector(vec_spec, op);

  const specdim::EigenDecomposition eig = specdim::eigendecompose(op.J);
  const specdim::SpectralMeasure sm =
      specdim::spectral_measure(op.J, eig, psi, vec_spec.dump());
  const specdim::Measure mu((sm.measure));

  const specdim::EpsilonGrid grid(cfg.eps_max, cfg.levels, cfg.ratio);
  const specdim::IntegralKind kind = specdim::parse_kind(cfg.kind_text);

  // estimates below the level spacing only see isolated atoms
  const std::size_t M = sm.measure.size();
  const double spacing =
      M > 1 ? (sm.measure.atoms.back() - sm.measure.atoms.front()) /
                  static_cast<double>(M - 1)
            : 0.0;
  const double eps_floor = grid.eps(window.hi);
  const bool scale_warning = M > 1 && eps_floor < 10.0 * spacing;
  if (scale_warning) {
    std::cerr << "warning: eps floor " << eps_floor
              << " is below 10x the mean level spacing " << spacing
              << "; fine-scale slopes reflect the truncation, not the "
                 "operator\n";
  }

  fs::create_directories(cfg.out_dir);
  json summary{{"config", cj},
               {"operator_size", op.J.size()},
               {"site_origin", op.site_origin},
               {"operator_hash", sm.operator_hash},
               {"state_norm2", sm.psi_norm2},
               {"atom_count", M},
               {"mean_level_spacing", spacing},
               {"eps_floor", eps_floor},
               {"scale_warning", scale_warning}};

  const bool embed = cfg.format == "json";
  if (embed) {
    summary["spectral_measure"] = {{"atoms", sm.measure.atoms},
                                   {"weights", sm.measure.weights}};
  } else {
    std::ostringstream os;
    specdim::write_atoms_csv(os, sm.measure);
    write_text_file(fs::path(cfg.out_dir) / "spectral_measure.csv", os.str());
  }

  json entries = json::array();
  for (std::size_t i = 0; i < cfg.q.size(); ++i) {
    const specdim::DimensionEstimate est = specdim::estimate_dimensions(
        mu, cfg.q[i], grid, kind, window, cfg.nodes);
    std::string file;
    if (!embed) {
      file = "dims_" + std::to_string(i) + ".csv";
      write_text_file(fs::path(cfg.out_dir) / file, series_csv(est));
    }
    entries.push_back(estimate_entry(est, file, embed));
    std::cout << "q=" << est.q << ": lower " << est.lower_est << ", upper "
              << est.upper_est << ", regression " << est.regression_est
              << '\n';
  }
  summary["estimates"] = entries;
  write_json_file(fs::path(cfg.out_dir) / "summary.json", summary);
  std::cout << "spectral measure: " << M << " atoms; wrote "
            << (fs::path(cfg.out_dir) / "summary.json").string() << '\n';
  return 0;
}

int run_dynamics(const Config& cfg) {
  const Window ewindow = resolve_window(cfg.window_text, cfg.levels);
  const Window twindow = resolve_window(cfg.t_window_text, cfg.t_points - 1);
  const json cj = config_json("dynamics", cfg, ewindow, &twindow);
  if (cfg.print_config) {
    std::cout << cj.dump(2) << '\n';
    return 0;
  }
  const json spec = specdim::load_json_file(cfg.spec_path);
  const specdim::TimeGrid tgrid(cfg.t_min, cfg.t_max, cfg.t_points);

  fs::create_directories(cfg.out_dir);
  json summary{{"config", cj}};
  const bool embed = cfg.format == "json";

  if (spec.contains("measure")) {
    // measure-only mode: return probability of a given atomic measure
    const specdim::Measure m = specdim::parse_measure(spec.at("measure"));
    const specdim::AtomicMeasure* atoms = m.as_atomic();
    if (atoms == nullptr) {
      throw std::invalid_argument(
          "dynamics on a measure file needs a purely atomic measure");
    }
    const specdim::SpectralMeasure sm{*atoms, atoms->total, 0, "measure-file"};
    const specdim::DynamicsResult ret =
        specdim::return_exponents(sm, tgrid, twindow);
    summary["return"] = specdim::summary_json(ret);
    if (embed) {
      summary["return"]["times"] = ret.times;
      summary["return"]["values"] = ret.values;
    } else {
      std::ostringstream os;
      specdim::write_dynamics_csv(os, ret, "gamma_avg");
      write_text_file(fs::path(cfg.out_dir) / "gamma.csv", os.str());
    }
    write_json_file(fs::path(cfg.out_dir) / "summary.json", summary);
    std::cout << "decay exponents: lower " << ret.lower_exponent << ", upper "
              << ret.upper_exponent << ", regression "
              << ret.regression_exponent << '\n';
    return 0;
  }

  const json op_spec = spec.contains("operator") ? spec.at("operator") : spec;
  const specdim::LatticeOperator op = specdim::parse_operator(op_spec);
  const json vec_spec = spec.contains("vector")
                            ? spec.at("vector")
                            : json{{"vector", "delta"}, {"site", 1}};
  const std::vector<double> psi = specdim::parse_vector(vec_spec, op);

  const specdim::EigenDecomposition eig = specdim::eigendecompose(op.J);
  const specdim::SpectralMeasure sm =
      specdim::spectral_measure(op.J, eig, psi, vec_spec.dump());

  const specdim::DynamicsResult ret =
      specdim::return_exponents(sm, tgrid, twindow);
  summary["return"] = specdim::summary_json(ret);
  if (embed) {
    summary["return"]["times"] = ret.times;
    summary["return"]["values"] = ret.values;
  } else {
    std::ostringstream os;
    specdim::write_dynamics_csv(os, ret, "gamma_avg");
    write_text_file(fs::path(cfg.out_dir) / "gamma.csv", os.str());
  }
  std::cout << "decay exponents: lower " << ret.lower_exponent << ", upper "
            << ret.upper_exponent << ", regression " << ret.regression_exponent
            << '\n';

  // localization center: the delta site if given, else the largest component
  std::size_t j0 = 0;
  if (vec_spec.is_object() && vec_spec.contains("site")) {
    j0 = op.index_of_site(vec_spec.at("site").get<long>());
  } else {
    double best = -1.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
      if (std::abs(psi[i]) > best) {
        best = std::abs(psi[i]);
        j0 = i;
      }
    }
  }

  json moments = json::array();
  for (std::size_t i = 0; i < cfg.p.size(); ++i) {
    const specdim::MomentKernel kernel(eig, psi, cfg.p[i], j0);
    specdim::DynamicsResult traj;
    traj.window = twindow;
    traj.times.resize(static_cast<std::size_t>(tgrid.points));
    traj.values.resize(static_cast<std::size_t>(tgrid.points));
    for (int k = 0; k < tgrid.points; ++k) {
      traj.times[static_cast<std::size_t>(k)] = tgrid.t(k);
      traj.values[static_cast<std::size_t>(k)] = kernel.r_p(tgrid.t(k));
    }
    json entry{{"p", cfg.p[i]}, {"j0", j0}};
    if (embed) {
      entry["times"] = traj.times;
      entry["values"] = traj.values;
    } else {
      const std::string file = "moment_" + std::to_string(i) + ".csv";
      std::ostringstream os;
      specdim::write_dynamics_csv(os, traj, "r_p");
      write_text_file(fs::path(cfg.out_dir) / file, os.str());
      entry["file"] = file;
    }
    moments.push_back(entry);
  }
  summary["moments"] = moments;

  const specdim::EpsilonGrid egrid(cfg.eps_max, cfg.levels, cfg.ratio);
  const specdim::GuarneriReport report = specdim::check_guarneri(
      op.J, psi, cfg.p, tgrid, twindow, egrid, ewindow, j0);
  summary["guarneri"] = specdim::summary_json(report);
  if (!report.scale_matched) {
    std::cerr << "warning: eps floor " << report.eps_floor
              << " and t max " << report.t_max
              << " are not within a decade of eps ~ 1/t\n";
  }
  for (const specdim::GuarneriEntry& e : report.entries) {
    std::cout << "p=" << e.p << ": growth " << e.beta_minus << ".."
              << e.beta_plus << ", dimension " << e.dim_lower << ".."
              << e.dim_upper << ", slack " << e.slack_minus << "/"
              << e.slack_plus << (e.violation ? " (violation)" : "") << '\n';
  }

  write_json_file(fs::path(cfg.out_dir) / "summary.json", summary);
  std::cout << "wrote " << (fs::path(cfg.out_dir) / "summary.json").string()
            << '\n';
  return 0;
}

int run_verify(const std::vector<int>& only, bool inject_fail) {
  specdim::AcceptanceOptions options;
  options.only = only;
  options.inject_fail = inject_fail;
  const std::vector<specdim::CriterionResult> results =
      specdim::run_acceptance(options);
  return specdim::print_acceptance(std::cout, results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "specdim: fractal dimensions of spectral measures and quantum "
      "transport exponents"};
  app.require_subcommand(1);

  Config cfg;
  std::vector<int> verify_only;
  bool inject_fail = false;

  CLI::App* cmd_measure = app.add_subcommand(
      "analyze-measure", "dimension estimates of a measure spec");
  add_grid_options(cmd_measure, cfg);
  cmd_measure->add_option("--q", cfg.q, "q values (comma separated)")
      ->delimiter(',');
  cmd_measure->add_option("--kind", cfg.kind_text,
                          "integral kind: correlation or mean")
      ->check(CLI::IsMember({"correlation", "mean"}));
  cmd_measure->add_option("--samples", cfg.samples,
                          "sample count for the pointwise-exponent quantile");

  CLI::App* cmd_operator = app.add_subcommand(
      "analyze-operator",
      "spectral measure of an operator state plus dimension estimates");
  add_grid_options(cmd_operator, cfg);
  cmd_operator->add_option("--q", cfg.q, "q values (comma separated)")
      ->delimiter(',');
  cmd_operator->add_option("--kind", cfg.kind_text,
                           "integral kind: correlation or mean")
      ->check(CLI::IsMember({"correlation", "mean"}));

  CLI::App* cmd_dynamics = app.add_subcommand(
      "dynamics", "time-averaged return probability and moment growth");
  add_grid_options(cmd_dynamics, cfg);
  cmd_dynamics->add_option("--t-min", cfg.t_min, "smallest time");
  cmd_dynamics->add_option("--t-max", cfg.t_max, "largest time");
  cmd_dynamics->add_option("--t-points", cfg.t_points, "time grid size");
  cmd_dynamics->add_option("--t-window", cfg.t_window_text,
                           "time-index window lo:hi");
  cmd_dynamics->add_option("--p", cfg.p, "moment orders (comma separated)")
      ->delimiter(',');

  CLI::App* cmd_verify =
      app.add_subcommand("verify", "run the acceptance checks");
  cmd_verify->add_option("--only", verify_only,
                         "criterion ids to run (comma separated)")
      ->delimiter(',');
  cmd_verify->add_flag("--inject-fail", inject_fail,
                       "append an artificial failure (exit-path hook)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmd_measure->parsed()) return run_analyze_measure(cfg);
    if (cmd_operator->parsed()) return run_analyze_operator(cfg);
    if (cmd_dynamics->parsed()) return run_dynamics(cfg);
    if (cmd_verify->parsed()) return run_verify(verify_only, inject_fail);
  } catch (const specdim::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
