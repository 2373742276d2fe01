#include "specdim/spec_json.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace specdim {

namespace {

double get_number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw std::invalid_argument(std::string("missing or non-numeric field \"") +
                                key + "\"");
  }
  return j.at(key).get<double>();
}

double get_number_or(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) {
    throw std::invalid_argument(std::string("non-numeric field \"") + key +
                                "\"");
  }
  return j.at(key).get<double>();
}

long get_integer(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer()) {
    throw std::invalid_argument(std::string("missing or non-integer field \"") +
                                key + "\"");
  }
  return j.at(key).get<long>();
}

std::vector<double> get_array(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw std::invalid_argument(std::string("missing or non-array field \"") +
                                key + "\"");
  }
  std::vector<double> out;
  out.reserve(j.at(key).size());
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) {
      throw std::invalid_argument(std::string("non-numeric entry in \"") + key +
                                  "\"");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

std::string get_string(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw std::invalid_argument(std::string("missing or non-string field \"") +
                                key + "\"");
  }
  return j.at(key).get<std::string>();
}

}  // namespace

Measure parse_measure(const nlohmann::json& spec) {
  if (!spec.is_object()) {
    throw std::invalid_argument("measure spec must be a JSON object");
  }
  const std::string type = get_string(spec, "type");
  if (type == "atomic") {
    return make_atomic(get_array(spec, "atoms"), get_array(spec, "weights"));
  }
  if (type == "power_law") {
    return make_power_law(get_number(spec, "theta"));
  }
  if (type == "uniform") {
    return make_uniform(get_number_or(spec, "a", 0.0),
                        get_number_or(spec, "b", 1.0));
  }
  if (type == "cantor") {
    const long level = spec.contains("level") ? get_integer(spec, "level") : 16;
    if (level < 1 || level > 20) {
      throw std::invalid_argument("cantor level must lie in [1, 20]");
    }
    return make_cantor(static_cast<int>(level));
  }
  if (type == "mixture") {
    if (!spec.contains("components") || !spec.at("components").is_array() ||
        spec.at("components").empty()) {
      throw std::invalid_argument("mixture needs a nonempty components array");
    }
    std::vector<std::pair<double, Measure>> parts;
    for (const auto& comp : spec.at("components")) {
      if (!comp.is_object() || !comp.contains("measure")) {
        throw std::invalid_argument(
            "each mixture component needs coef and measure");
      }
      parts.emplace_back(get_number(comp, "coef"),
                         parse_measure(comp.at("measure")));
    }
    return make_mixture(std::move(parts));
  }
  throw std::invalid_argument("unknown measure type: " + type);
}

LatticeOperator parse_operator(const nlohmann::json& spec) {
  if (!spec.is_object()) {
    throw std::invalid_argument("operator spec must be a JSON object");
  }
  const std::string builder = get_string(spec, "builder");
  if (builder == "explicit") {
    LatticeOperator op{JacobiMatrix(get_array(spec, "diag"),
                                    get_array(spec, "offdiag")),
                       1};
    if (spec.contains("site_origin")) {
      op.site_origin = get_integer(spec, "site_origin");
    }
    return op;
  }
  const long n = get_integer(spec, "N");
  if (n < 1) {
    throw std::invalid_argument("operator size N must be >= 1");
  }
  const std::size_t N = static_cast<std::size_t>(n);
  if (builder == "free_jacobi") {
    return free_jacobi(N);
  }
  if (builder == "almost_mathieu") {
    return almost_mathieu(N, get_number_or(spec, "lambda", 0.0),
                          get_number(spec, "alpha"),
                          get_number_or(spec, "theta", 0.0),
                          get_number(spec, "kappa"));
  }
  throw std::invalid_argument("unknown operator builder: " + builder);
}

std::vector<double> parse_vector(const nlohmann::json& spec,
                                 const LatticeOperator& op) {
  const std::size_t N = op.J.size();
  if (spec.is_array()) {
    std::vector<double> psi;
    psi.reserve(spec.size());
    for (const auto& v : spec) {
      if (!v.is_number()) {
        throw std::invalid_argument("vector entries must be numbers");
      }
      psi.push_back(v.get<double>());
    }
    if (psi.size() != N) {
      throw std::invalid_argument("vector length must equal operator size");
    }
    return psi;
  }
  if (spec.is_object() && spec.contains("vector")) {
    const std::string kind = get_string(spec, "vector");
    if (kind != "delta") {
      throw std::invalid_argument("unknown vector kind: " + kind);
    }
    const long site = get_integer(spec, "site");
    std::vector<double> psi(N, 0.0);
    psi[op.index_of_site(site)] = 1.0;
    return psi;
  }
  throw std::invalid_argument(
      "vector spec must be an array or {\"vector\":\"delta\",\"site\":s}");
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open input file: " + path);
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("JSON parse error in " + path + ": " +
                                e.what());
  }
  return j;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_series_csv(std::ostream& out, const DimensionEstimate& est) {
  out << "q,kind,eps,I,local_slope,endpoint_slope\n";
  const SlopeSeries& s = est.series;
  const std::string kind = to_string(est.kind);
  for (std::size_t i = 0; i < s.eps.size(); ++i) {
    out << format_double(s.q) << ',' << kind << ','
        << format_double(s.eps[i]) << ',' << format_double(s.integral[i])
        << ',';
    if (i < s.local_slope.size()) {
      out << format_double(s.local_slope[i]);
    }
    out << ',' << format_double(s.endpoint_slope[i]) << '\n';
  }
}

void write_dynamics_csv(std::ostream& out, const DynamicsResult& result,
                        const std::string& value_column) {
  out << "t," << value_column << '\n';
  for (std::size_t i = 0; i < result.times.size(); ++i) {
    out << format_double(result.times[i]) << ','
        << format_double(result.values[i]) << '\n';
  }
}

void write_atoms_csv(std::ostream& out, const AtomicMeasure& m) {
  out << "atom,weight\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out << format_double(m.atoms[i]) << ',' << format_double(m.weights[i])
        << '\n';
  }
}

nlohmann::json summary_json(const DimensionEstimate& est) {
  return nlohmann::json{
      {"q", est.q},
      {"kind", to_string(est.kind)},
      {"lower_est", est.lower_est},
      {"upper_est", est.upper_est},
      {"regression_est", est.regression_est},
      {"lower_clipped", est.lower_clipped},
      {"upper_clipped", est.upper_clipped},
      {"regression_clipped", est.regression_clipped},
      {"window", {est.window.lo, est.window.hi}},
      {"underflow_count", est.underflow_count},
  };
}

nlohmann::json summary_json(const DynamicsResult& result) {
  return nlohmann::json{
      {"lower_exponent", result.lower_exponent},
      {"upper_exponent", result.upper_exponent},
      {"regression_exponent", result.regression_exponent},
      {"window", {result.window.lo, result.window.hi}},
      {"points", result.times.size()},
  };
}

nlohmann::json summary_json(const GuarneriReport& report) {
  nlohmann::json entries = nlohmann::json::array();
  for (const GuarneriEntry& e : report.entries) {
    entries.push_back({
        {"p", e.p},
        {"beta_minus", e.beta_minus},
        {"beta_plus", e.beta_plus},
        {"beta_regression", e.beta_regression},
        {"dim_lower", e.dim_lower},
        {"dim_upper", e.dim_upper},
        {"dim_regression", e.dim_regression},
        {"slack_minus", e.slack_minus},
        {"slack_plus", e.slack_plus},
        {"violation", e.violation},
    });
  }
  return nlohmann::json{
      {"entries", entries},
      {"eps_floor", report.eps_floor},
      {"t_max", report.t_max},
      {"scale_matched", report.scale_matched},
      {"any_violation", report.any_violation},
  };
}

}  // namespace specdim
