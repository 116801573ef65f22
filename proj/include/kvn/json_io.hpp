#ifndef KVN_JSON_IO_HPP
#define KVN_JSON_IO_HPP

#include "kvn/diagonal.hpp"
#include "kvn/gns.hpp"

#include <json.hpp>

#include <string>

namespace kvn::io {

using nlohmann::json;

struct SchemaError : Error {
  using Error::Error;
};

/// Strict object check: every required key present, nothing else allowed.
void expect_keys(const json& j, std::initializer_list<const char*> required,
                 std::initializer_list<const char*> optional,
                 const std::string& where);

json complex_json(const Cplx& z);
json vector_json(const Vector& v);
json matrix_json(const Matrix& m);  // array of rows
json real_vector_json(const RealVector& v);
json interval_json(const Interval& iv);

Cplx parse_complex(const json& j, const std::string& where);
Vector parse_vector(const json& j, const std::string& where);
Matrix parse_matrix(const json& j, const std::string& where);
RealVector parse_real_vector(const json& j, const std::string& where);

NormedSpace parse_space(const json& j);
json space_json(const NormedSpace& s);

PartialPositiveOperator parse_operator_problem(const json& j);
DiagonalOperator parse_diagonal_problem(const json& j);

/// Algebra descriptor object, or a shorthand string: "matrix:N",
/// "blocks:[a,b,...]", "group:Z<n>", "group:S3", "functions:N".
StarAlgebra parse_algebra(const json& j);

/// {"algebra":..., "ideal_generators": rows x k, "values": [...]}. The
/// generators must span a left-closed subspace (values on generators do not
/// determine f on a strictly larger generated ideal).
IdealFunctional parse_functional_problem(const json& j);

struct ScenarioProblem {
  RealVector mu;
  std::vector<int> K;
  RealVector eK;
};
ScenarioProblem parse_scenario_problem(const json& j);

struct Options {
  double tol{kTol};
  double rtol{kRankRtol};
  std::uint64_t seed{20240901};
  int grid_density{2000};
  std::string format{"json"};
};
Options parse_options(const json& problem_file, std::uint64_t default_seed);

/// Canonical serialization: sorted keys, floats at 17 significant digits.
std::string canonical_dump(const json& j, int indent = 2);

/// Human-readable rendering of a report.
std::string to_text(const json& j);

}  // namespace kvn::io

#endif  // KVN_JSON_IO_HPP
