#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "specdim/dimension.hpp"
#include "specdim/dynamics.hpp"
#include "specdim/jacobi.hpp"
#include "specdim/measure.hpp"

namespace specdim {

// Measure spec:
//   {"type":"atomic","atoms":[...],"weights":[...]}
//   {"type":"power_law","theta":0.25}
//   {"type":"uniform","a":0,"b":1}
//   {"type":"cantor","level":16}
//   {"type":"mixture","components":[{"coef":c,"measure":{...}},...]}
// Unknown types and missing/ill-typed keys throw std::invalid_argument.
Measure parse_measure(const nlohmann::json& spec);

// Operator spec:
//   {"builder":"free_jacobi","N":400}
//   {"builder":"almost_mathieu","N":400,"lambda":0.5,"alpha":0.618034,
//    "theta":0.0,"kappa":3.0}
//   {"builder":"explicit","diag":[...],"offdiag":[...]}
LatticeOperator parse_operator(const nlohmann::json& spec);

// Vector spec: {"vector":"delta","site":1} (lattice label, resolved through
// the operator's site origin) or an explicit array of length N.
std::vector<double> parse_vector(const nlohmann::json& spec,
                                 const LatticeOperator& op);

nlohmann::json load_json_file(const std::string& path);

// CSV series: columns q, kind, eps, I, local_slope, endpoint_slope; the last
// level has no local slope and leaves that field empty. Numbers use %.17g so
// reruns are byte-identical.
void write_series_csv(std::ostream& out, const DimensionEstimate& est);
void write_dynamics_csv(std::ostream& out, const DynamicsResult& result,
                        const std::string& value_column);
void write_atoms_csv(std::ostream& out, const AtomicMeasure& m);

nlohmann::json summary_json(const DimensionEstimate& est);
nlohmann::json summary_json(const DynamicsResult& result);
nlohmann::json summary_json(const GuarneriReport& report);

std::string format_double(double v);  // %.17g

}  // namespace specdim
