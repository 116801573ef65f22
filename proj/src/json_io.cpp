#include "kvn/json_io.hpp"

#include <cstdio>
#include <set>
#include <sstream>

namespace kvn::io {

void expect_keys(const json& j, std::initializer_list<const char*> required,
                 std::initializer_list<const char*> optional,
                 const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + ": expected an object");
  std::set<std::string> allowed;
  for (const char* k : required) {
    if (!j.contains(k)) {
      throw SchemaError(where + ": missing required key '" + k + "'");
    }
    allowed.insert(k);
  }
  for (const char* k : optional) allowed.insert(k);
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw SchemaError(where + ": unknown key '" + it.key() + "'");
    }
  }
}

json complex_json(const Cplx& z) { return json::array({z.real(), z.imag()}); }

json vector_json(const Vector& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(complex_json(v[i]));
  return out;
}

json matrix_json(const Matrix& m) {
  json out = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
    out.push_back(row);
  }
  return out;
}

json real_vector_json(const RealVector& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json interval_json(const Interval& iv) {
  return json{{"lo", iv.lo}, {"hi", iv.hi}};
}

Cplx parse_complex(const json& j, const std::string& where) {
  if (j.is_number()) return Cplx(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return Cplx(j[0].get<double>(), j[1].get<double>());
  }
  throw SchemaError(where + ": complex scalars are [re, im]");
}

Vector parse_vector(const json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + ": expected an array");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<int>(i)] = parse_complex(j[i], where);
  }
  return v;
}

Matrix parse_matrix(const json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + ": expected an array of rows");
  const int rows = static_cast<int>(j.size());
  int cols = -1;
  Matrix m;
  for (int i = 0; i < rows; ++i) {
    if (!j[i].is_array()) throw SchemaError(where + ": expected row arrays");
    if (cols < 0) {
      cols = static_cast<int>(j[i].size());
      m.resize(rows, cols);
    }
    if (static_cast<int>(j[i].size()) != cols) {
      throw SchemaError(where + ": ragged matrix rows");
    }
    for (int c = 0; c < cols; ++c) m(i, c) = parse_complex(j[i][c], where);
  }
  if (rows == 0) m.resize(0, 0);
  return m;
}

RealVector parse_real_vector(const json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + ": expected an array");
  RealVector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw SchemaError(where + ": expected numbers");
    v[static_cast<int>(i)] = j[i].get<double>();
  }
  return v;
}

NormedSpace parse_space(const json& j) {
  expect_keys(j, {"dim", "norm"}, {"weights"}, "space");
  if (!j["dim"].is_number_integer()) throw SchemaError("space: dim must be an integer");
  const int dim = j["dim"].get<int>();
  if (dim < 1) throw SchemaError("space: dim must be >= 1");
  const std::string tag = j["norm"].get<std::string>();
  NormTag t;
  if (tag == "l1") {
    t = NormTag::L1;
  } else if (tag == "l2") {
    t = NormTag::L2;
  } else if (tag == "linf") {
    t = NormTag::LInf;
  } else {
    throw SchemaError("space: norm must be one of l1, l2, linf");
  }
  RealVector w = RealVector::Ones(dim);
  if (j.contains("weights")) {
    w = parse_real_vector(j["weights"], "space.weights");
    if (w.size() != dim) throw SchemaError("space: weights length must equal dim");
  }
  return NormedSpace::with_weights(t, std::move(w));
}

json space_json(const NormedSpace& s) {
  const char* tag = s.tag == NormTag::L1 ? "l1" : s.tag == NormTag::L2 ? "l2" : "linf";
  json out{{"dim", s.dim}, {"norm", tag}};
  if ((s.weights.array() != 1.0).any()) out["weights"] = real_vector_json(s.weights);
  return out;
}

PartialPositiveOperator parse_operator_problem(const json& j) {
  expect_keys(j, {"space", "domain_basis", "values"}, {}, "operator problem");
  PartialPositiveOperator op;
  op.space = parse_space(j["space"]);
  op.domain_basis = parse_matrix(j["domain_basis"], "domain_basis");
  op.values = parse_matrix(j["values"], "values");
  if (op.domain_basis.rows() == 0 && op.domain_basis.cols() == 0) {
    op.domain_basis.resize(op.space.dim, 0);
    op.values.resize(op.space.dim, 0);
  }
  validate_operator(op);
  return op;
}

DiagonalOperator parse_diagonal_problem(const json& j) {
  expect_keys(j, {"prefix_indices", "prefix_values", "tail"}, {}, "diagonal problem");
  DiagonalOperator d;
  for (const auto& idx : j["prefix_indices"]) {
    if (!idx.is_number_integer()) throw SchemaError("prefix_indices must be integers");
    d.prefix_indices.push_back(idx.get<int>());
  }
  for (const auto& v : j["prefix_values"]) {
    if (!v.is_number()) throw SchemaError("prefix_values must be numbers");
    d.prefix_values.push_back(v.get<double>());
  }
  const json& tail = j["tail"];
  expect_keys(tail, {"kind"}, {"value", "scale"}, "tail");
  const std::string kind = tail["kind"].get<std::string>();
  if (kind == "empty") {
    d.tail = TailKind::Empty;
  } else if (kind == "zero") {
    d.tail = TailKind::Zero;
  } else if (kind == "constant") {
    d.tail = TailKind::Constant;
    if (!tail.contains("value")) throw SchemaError("constant tail needs 'value'");
    d.tail_param = tail["value"].get<double>();
  } else if (kind == "decay") {
    d.tail = TailKind::Decay;
    if (!tail.contains("scale")) throw SchemaError("decay tail needs 'scale'");
    d.tail_param = tail["scale"].get<double>();
  } else {
    throw SchemaError("tail.kind must be empty, zero, constant or decay");
  }
  d.validate();
  return d;
}

namespace {

StarAlgebra algebra_from_shorthand(const std::string& s) {
  auto starts = [&](const char* p) { return s.rfind(p, 0) == 0; };
  if (starts("matrix:")) {
    return StarAlgebra::matrix_algebra(std::stoi(s.substr(7)));
  }
  if (starts("functions:")) {
    return StarAlgebra::functions_on_points(std::stoi(s.substr(10)));
  }
  if (starts("blocks:")) {
    std::string body = s.substr(7);
    if (body.size() < 2 || body.front() != '[' || body.back() != ']') {
      throw SchemaError("blocks shorthand is blocks:[a,b,...]");
    }
    std::vector<int> sizes;
    std::stringstream ss(body.substr(1, body.size() - 2));
    std::string tok;
    while (std::getline(ss, tok, ',')) sizes.push_back(std::stoi(tok));
    return StarAlgebra::block_algebra(sizes);
  }
  if (starts("group:")) {
    std::string g = s.substr(6);
    if (g == "S3") return StarAlgebra::group_algebra_s3();
    if (g.size() > 1 && g[0] == 'Z') {
      return StarAlgebra::group_algebra_cyclic(std::stoi(g.substr(1)));
    }
    throw SchemaError("supported groups: Z<n>, S3");
  }
  throw SchemaError("unknown algebra shorthand '" + s + "'");
}

bool isometric_involution(const StarAlgebra& a) {
  for (int i = 0; i < a.dim; ++i) {
    Vector e = Vector::Unit(a.dim, i);
    if (std::abs(a.norm(a.involute(e)) - a.norm(e)) > 1e-9) return false;
  }
  std::mt19937_64 rng = seeded_rng(99);
  for (int t = 0; t < 64; ++t) {
    Vector x = random_vector(rng, a.dim);
    if (std::abs(a.norm(a.involute(x)) - a.norm(x)) >
        1e-9 * std::max(1.0, a.norm(x))) {
      return false;
    }
  }
  return true;
}

}  // namespace

StarAlgebra parse_algebra(const json& j) {
  if (j.is_string()) {
    StarAlgebra a = algebra_from_shorthand(j.get<std::string>());
    a.validate();
    return a;
  }
  expect_keys(j, {"dim", "structure", "involution", "norm"}, {"unit"}, "algebra");
  StarAlgebra a;
  a.dim = j["dim"].get<int>();
  if (a.dim < 1) throw SchemaError("algebra: dim must be >= 1");
  const json& st = j["structure"];
  if (!st.is_array() || static_cast<int>(st.size()) != a.dim) {
    throw SchemaError("algebra: structure must be a dim x dim x dim tensor");
  }
  a.lmul.assign(a.dim, Matrix::Zero(a.dim, a.dim));
  for (int i = 0; i < a.dim; ++i) {
    if (!st[i].is_array() || static_cast<int>(st[i].size()) != a.dim) {
      throw SchemaError("algebra: structure must be a dim x dim x dim tensor");
    }
    for (int jj = 0; jj < a.dim; ++jj) {
      Vector c = parse_vector(st[i][jj], "structure");
      if (c.size() != a.dim) {
        throw SchemaError("algebra: structure entries must have dim coefficients");
      }
      for (int k = 0; k < a.dim; ++k) a.lmul[i](k, jj) = c[k];
    }
  }
  a.invol = parse_matrix(j["involution"], "involution");
  if (a.invol.rows() != a.dim || a.invol.cols() != a.dim) {
    throw SchemaError("algebra: involution must be dim x dim");
  }
  const json& nd = j["norm"];
  expect_keys(nd, {"kind"}, {"weights", "rep"}, "algebra.norm");
  const std::string kind = nd["kind"].get<std::string>();
  if (kind == "l1") {
    if (!nd.contains("weights")) throw SchemaError("l1 norm needs weights");
    a.norm_desc.kind = AlgebraNorm::Kind::L1Weighted;
    a.norm_desc.weights = parse_real_vector(nd["weights"], "norm.weights");
  } else if (kind == "opnorm") {
    if (!nd.contains("rep")) throw SchemaError("opnorm needs rep matrices");
    a.norm_desc.kind = AlgebraNorm::Kind::OperatorRep;
    for (const auto& rm : nd["rep"]) {
      a.norm_desc.rep.push_back(parse_matrix(rm, "norm.rep"));
    }
  } else {
    throw SchemaError("norm.kind must be l1 or opnorm");
  }
  if (j.contains("unit")) a.unit = parse_vector(j["unit"], "unit");
  a.involution_isometric = false;
  a.validate();
  a.involution_isometric = isometric_involution(a);
  return a;
}

IdealFunctional parse_functional_problem(const json& j) {
  expect_keys(j, {"algebra", "ideal_generators", "values"}, {}, "functional problem");
  IdealFunctional f;
  f.algebra = parse_algebra(j["algebra"]);
  Matrix gens = parse_matrix(j["ideal_generators"], "ideal_generators");
  if (gens.rows() == 0) {
    gens.resize(f.algebra.dim, 0);
  }
  if (gens.rows() != f.algebra.dim) {
    throw SchemaError("ideal_generators rows must equal the algebra dimension");
  }
  f.ideal_basis = gens;
  f.values = parse_vector(j["values"], "values");
  if (f.values.size() != gens.cols()) {
    throw SchemaError("one value per ideal generator");
  }
  // The generator span must already be left-closed: otherwise the generated
  // ideal is strictly larger and generator values do not determine f on it.
  std::vector<Vector> gvecs;
  for (int c = 0; c < gens.cols(); ++c) gvecs.push_back(gens.col(c));
  if (!gvecs.empty()) {
    Matrix closed = left_ideal_basis(f.algebra, gvecs);
    if (closed.cols() > numerical_rank(gens)) {
      throw SchemaError(
          "ideal_generators span is not closed under left multiplication; "
          "provide a basis of the full left ideal with its values");
    }
  }
  validate_ideal_functional(f);
  return f;
}

ScenarioProblem parse_scenario_problem(const json& j) {
  expect_keys(j, {"mu", "K", "eK"}, {}, "scenario problem");
  ScenarioProblem p;
  p.mu = parse_real_vector(j["mu"], "mu");
  for (const auto& idx : j["K"]) {
    if (!idx.is_number_integer()) throw SchemaError("K must hold integers");
    p.K.push_back(idx.get<int>());
  }
  p.eK = parse_real_vector(j["eK"], "eK");
  return p;
}

Options parse_options(const json& problem_file, std::uint64_t default_seed) {
  Options o;
  o.seed = default_seed;
  if (!problem_file.contains("options")) return o;
  const json& j = problem_file["options"];
  expect_keys(j, {}, {"tol", "rtol", "seed", "grid_density", "format"}, "options");
  if (j.contains("tol")) o.tol = j["tol"].get<double>();
  if (j.contains("rtol")) o.rtol = j["rtol"].get<double>();
  if (j.contains("seed")) o.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("grid_density")) o.grid_density = j["grid_density"].get<int>();
  if (j.contains("format")) o.format = j["format"].get<std::string>();
  return o;
}

namespace {

std::string format_double(double v) {
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void dump_rec(const json& j, std::string& out, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent) * (depth + 1), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in + json(it.key()).dump() + ": ";
        dump_rec(it.value(), out, indent, depth + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& el : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in;
        dump_rec(el, out, indent, depth + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

void text_rec(const json& j, std::string& out, const std::string& prefix) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
      text_rec(it.value(), out, key);
    }
    return;
  }
  out += prefix + ": ";
  if (j.is_number_float()) {
    out += format_double(j.get<double>());
  } else {
    out += j.dump();
  }
  out += "\n";
}

}  // namespace

std::string canonical_dump(const json& j, int indent) {
  std::string out;
  dump_rec(j, out, indent, 0);
  out += "\n";
  return out;
}

std::string to_text(const json& j) {
  std::string out;
  text_rec(j, out, "");
  return out;
}

}  // namespace kvn::io
