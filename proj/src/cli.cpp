#include "kvn/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

namespace kvn::cli {

using io::json;

namespace {

json error_report(const std::string& kind, const std::string& message) {
  return json{{"error", kind}, {"message", message}};
}

json operator_extension_report(const PartialPositiveOperator& op,
                               const io::Options& opt) {
  ExtensionResult res = krein_von_neumann(op, opt.rtol);
  NormReport norm = extension_norm(op, res);
  RangeChainReport chain = range_chain_check(op, res);
  CompactnessReport compact = compactness_check(op, opt.rtol);
  const double ext_residual =
      op.domain_dim() == 0
          ? 0.0
          : max_abs((res.A_N * op.domain_basis - op.values));
  double variational = 0.0;
  std::mt19937_64 rng = seeded_rng(opt.seed);
  for (int t = 0; t < 8; ++t) {
    Vector x = random_vector(rng, op.dim());
    const double direct = std::real(x.dot(res.A_N * x));
    const double oracle =
        quadratic_form_oracle(op, x, opt.grid_density, opt.seed + t);
    variational = std::max(variational,
                           std::abs(direct - oracle) / std::max(1.0, direct));
  }
  json diag{{"extension_residual", ext_residual},
            {"variational_check", variational},
            {"operator_norm", io::interval_json(norm.norm)},
            {"t_norm_sq", io::interval_json(norm.t_norm_sq)},
            {"norm_matches_schwarz", norm.matches_schwarz},
            {"cstar_identity", norm.cstar_identity},
            {"range_chain_ok", chain.ok()},
            {"rank_A_N", chain.rank_A_N},
            {"compact", compact.compact},
            {"compact_radius", io::interval_json(compact.radius)}};
  return json{{"kind", "operator-extension"},
              {"space", io::space_json(op.space)},
              {"A_N", io::matrix_json(res.A_N)},
              {"G", io::matrix_json(res.G)},
              {"rank_G", res.rank_G},
              {"T_coeff", io::matrix_json(res.T_coeff)},
              {"M_min", io::interval_json(res.M_min)},
              {"Mprime_min", io::interval_json(res.Mprime_min)},
              {"mprime_empty", res.mprime_empty},
              {"diagnostics", diag}};
}

json operator_check_report(const PartialPositiveOperator& op,
                           const io::Options& opt) {
  json out{{"kind", "operator-check"}};
  bool positive = true;
  std::string reason;
  try {
    gram(op, opt.tol);
  } catch (const NotSymmetric& e) {
    positive = false;
    reason = e.what();
  } catch (const NotPositive& e) {
    positive = false;
    reason = e.what();
  }
  out["positive"] = positive;
  if (!positive) {
    out["reason"] = reason;
    out["extendable"] = false;
    return out;
  }
  WellDefinedCheck wd = check_well_defined(op, opt.rtol);
  out["well_defined"] = wd.ok;
  CompactnessReport compact = compactness_check(op, opt.rtol);
  out["compact"] = compact.compact;
  if (!wd.ok) {
    out["extendable"] = false;
    out["witness"] = io::vector_json(wd.witness);
    return out;
  }
  out["extendable"] = true;
  out["schwarz_bound"] = io::interval_json(schwarz_bound(op, opt.rtol));
  ClosedRangeConstants crc = closed_range_constants(op, opt.rtol);
  out["M"] = io::interval_json(crc.M);
  out["Mprime"] = io::interval_json(crc.Mprime);
  out["mprime_empty"] = crc.empty_supremum;
  out["compact_radius"] = io::interval_json(compact.radius);
  return out;
}

json diagonal_report(const DiagonalOperator& d, const io::Options& opt) {
  Extendability ext = is_extendable(d);
  json out{{"kind", "diagonal-report"},
           {"extendable", ext.extendable},
           {"m_min", ext.m_min},
           {"compact", is_compact_extension(d)},
           {"closed_range", has_closed_range_extension(d)}};
  json truncations = json::array();
  for (int n : {2, 4, 8, 16}) {
    PartialPositiveOperator op = truncate(d, n);
    json row{{"n", n}};
    if (op.domain_dim() > 0) {
      ClosedRangeConstants crc = closed_range_constants(op, opt.rtol);
      row["schwarz"] = io::interval_json(crc.M);
      row["mprime"] = io::interval_json(crc.Mprime);
      row["mprime_empty"] = crc.empty_supremum;
    } else {
      row["schwarz"] = io::interval_json(Interval::point(0.0));
      row["mprime_empty"] = true;
    }
    row["net_log2_cardinality_eps_0.5"] = epsilon_net_log2_cardinality(d, n, 0.5);
    row["net_log2_cardinality_eps_0.25"] = epsilon_net_log2_cardinality(d, n, 0.25);
    truncations.push_back(row);
  }
  out["truncations"] = truncations;
  return out;
}

json functional_extension_report(const IdealFunctional& f,
                                 const io::Options& opt) {
  const double c_min = representability_check(f, opt.rtol);
  MinimalExtension me = minimal_extension(f, 32, opt.seed);
  Interval m = schwarz_functional_bound(f, opt.rtol);
  json cert{{"extension_error", me.extension_error},
            {"representable", me.representable},
            {"representable_C", me.representable_C},
            {"supformula_error", me.supformula_error},
            {"cyclic_identity_error", me.cyclic_identity_error}};
  return json{{"kind", "functional-extension"},
              {"C_min", c_min},
              {"M", io::interval_json(m)},
              {"fN", io::vector_json(me.fN)},
              {"certificates", cert}};
}

json gns_report(const IdealFunctional& f, const io::Options& opt) {
  GnsData data = gns(f, opt.rtol);
  json pis = json::array();
  for (const Matrix& p : data.pi) pis.push_back(io::matrix_json(p));
  return json{{"kind", "gns"},
              {"H_dim", data.H_dim},
              {"C_min", data.C_min},
              {"pi", pis},
              {"zeta", io::vector_json(data.zeta)},
              {"fN", io::vector_json(data.fN)},
              {"star_residual", data.star_residual},
              {"mult_residual", data.mult_residual},
              {"reconstruction_residual", data.reconstruction_residual},
              {"cyclic", data.cyclic}};
}

json scenario_report_json(const io::ScenarioProblem& p) {
  ScenarioReport rep = discrete_measure_scenario(p.mu, p.K, p.eK);
  return json{{"kind", "scenario-report"},
              {"mu_K_norm", rep.mu_K_norm},
              {"muKN_norm", rep.muKN_norm},
              {"A_norm", rep.A_norm},
              {"A_N_norm", io::interval_json(rep.A_N_norm)},
              {"chain_ok", rep.chain_ok},
              {"avals_check", rep.avals_check},
              {"eK_mu", io::vector_json(rep.eK_mu)},
              {"eK_mu_extends", rep.eK_mu_extends},
              {"eK_mu_norm", rep.eK_mu_norm},
              {"sup_side", rep.sup_side},
              {"strict", rep.strict},
              {"fN", io::vector_json(rep.fN)}};
}

void require_kind(const json& file, const std::string& want) {
  io::expect_keys(file, {"kind", "payload"}, {"options"}, "problem file");
  const std::string kind = file["kind"].get<std::string>();
  if (kind != want) {
    throw io::SchemaError("subcommand expects kind '" + want + "', file has '" +
                          kind + "'");
  }
}

}  // namespace

Outcome execute(const std::string& subcommand, const json& problem_file,
                std::uint64_t default_seed) {
  Outcome out;
  try {
    io::Options opt = io::parse_options(problem_file, default_seed);
    if (subcommand == "extend-op" || subcommand == "check-op") {
      require_kind(problem_file, "operator");
      PartialPositiveOperator op = io::parse_operator_problem(problem_file["payload"]);
      out.report = subcommand == "extend-op" ? operator_extension_report(op, opt)
                                             : operator_check_report(op, opt);
    } else if (subcommand == "diag") {
      require_kind(problem_file, "diagonal");
      out.report = diagonal_report(io::parse_diagonal_problem(problem_file["payload"]), opt);
    } else if (subcommand == "extend-fn" || subcommand == "gns") {
      require_kind(problem_file, "functional");
      IdealFunctional f = io::parse_functional_problem(problem_file["payload"]);
      out.report = subcommand == "extend-fn" ? functional_extension_report(f, opt)
                                             : gns_report(f, opt);
    } else if (subcommand == "scenario") {
      require_kind(problem_file, "scenario");
      out.report = scenario_report_json(io::parse_scenario_problem(problem_file["payload"]));
    } else {
      out.exit_code = kExitError;
      out.report = error_report("usage", "unknown subcommand " + subcommand);
    }
  } catch (const NotExtendable& e) {
    out.exit_code = kExitRefused;
    out.report = error_report("not-extendable", e.what());
    out.report["witness"] = io::vector_json(e.witness);
  } catch (const NotRepresentable& e) {
    out.exit_code = kExitRefused;
    out.report = error_report("not-representable", e.what());
    out.report["witness"] = io::vector_json(e.witness);
  } catch (const io::SchemaError& e) {
    out.exit_code = kExitError;
    out.report = error_report("schema", e.what());
  } catch (const Error& e) {
    out.exit_code = kExitError;
    out.report = error_report("error", e.what());
  }
  return out;
}

namespace {

bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// Compare a produced report against the fixture expectation block.
bool check_expectation(const json& expect, const Outcome& outcome,
                       std::string& why) {
  if (expect.contains("exit")) {
    if (outcome.exit_code != expect["exit"].get<int>()) {
      why = "exit code " + std::to_string(outcome.exit_code) + " != " +
            std::to_string(expect["exit"].get<int>());
      return false;
    }
  } else if (outcome.exit_code != kExitOk) {
    why = "unexpected exit code " + std::to_string(outcome.exit_code);
    return false;
  }
  const json& rep = outcome.report;
  const double tol = expect.value("tol", 1e-6);
  for (auto it = expect.begin(); it != expect.end(); ++it) {
    const std::string& key = it.key();
    if (key == "exit" || key == "tol") continue;
    if (key == "witness_present") {
      if (rep.contains("witness") != it.value().get<bool>()) {
        why = "witness presence mismatch";
        return false;
      }
      continue;
    }
    if (!rep.contains(key)) {
      why = "report lacks key '" + key + "'";
      return false;
    }
    const json& got = rep[key];
    const json& want = it.value();
    if (want.is_number() && got.is_number()) {
      if (!close(got.get<double>(), want.get<double>(), tol)) {
        why = key + " = " + got.dump() + ", expected " + want.dump();
        return false;
      }
    } else if (want.is_number() && got.is_object() && got.contains("lo")) {
      // interval expectation: must contain the value within tol
      const double lo = got["lo"].get<double>();
      const double hi = got["hi"].get<double>();
      const double v = want.get<double>();
      const double slack = tol * std::max(1.0, std::abs(v));
      if (v < lo - slack || v > hi + slack) {
        why = key + " interval [" + std::to_string(lo) + ", " + std::to_string(hi) +
              "] misses " + want.dump();
        return false;
      }
    } else if (want.is_array() && got.is_array()) {
      // complex vector/matrix comparison
      Matrix gm, wm;
      try {
        gm = io::parse_matrix(got, "got");
        wm = io::parse_matrix(want, "want");
      } catch (const Error&) {
        gm = io::parse_vector(got, "got");
        wm = io::parse_vector(want, "want");
      }
      if (gm.rows() != wm.rows() || gm.cols() != wm.cols() ||
          max_abs((gm - wm)) > tol) {
        why = key + " differs from the stored expectation";
        return false;
      }
    } else if (got != want) {
      why = key + " = " + got.dump() + ", expected " + want.dump();
      return false;
    }
  }
  return true;
}

}  // namespace

int run_corpus(const std::string& dir, std::ostream& os) {
  std::ifstream manifest_in(dir + "/corpus.json");
  if (!manifest_in) {
    os << "cannot open " << dir << "/corpus.json\n";
    return kExitError;
  }
  json manifest = json::parse(manifest_in);
  io::expect_keys(manifest, {"fixtures"}, {}, "corpus manifest");
  int passed = 0;
  int failed = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (const json& entry : manifest["fixtures"]) {
    io::expect_keys(entry, {"name", "file", "subcommand", "expect"}, {},
                    "corpus entry");
    const std::string name = entry["name"].get<std::string>();
    std::string why;
    bool ok = false;
    try {
      std::ifstream in(dir + "/" + entry["file"].get<std::string>());
      if (!in) throw Error("cannot open fixture file");
      json file = json::parse(in);
      Outcome outcome =
          execute(entry["subcommand"].get<std::string>(), file, 20240901);
      ok = check_expectation(entry["expect"], outcome, why);
    } catch (const std::exception& e) {
      why = e.what();
    }
    os << (ok ? "PASS" : "FAIL") << "  " << name;
    if (!ok) os << "  (" << why << ")";
    os << "\n";
    ++(ok ? passed : failed);
  }
  const auto dt = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - t0);
  os << passed << " passed, " << failed << " failed in " << dt.count()
     << " ms\n";
  return failed == 0 ? kExitOk : kExitError;
}

int main_entry(int argc, char** argv) {
  CLI::App app{"constructive Krein-von Neumann extensions of positive "
               "operators and representable extensions of positive "
               "functionals"};
  app.require_subcommand(1);

  std::string input, output, format, corpus_dir = "fixtures";
  double tol = -1.0, rtol = -1.0;
  int grid_density = -1;
  std::uint64_t seed = 20240901;
  if (const char* env = std::getenv("KVN_SEED")) {
    seed = std::strtoull(env, nullptr, 10);
  }

  const std::vector<std::pair<std::string, std::string>> names = {
      {"extend-op", "smallest positive extension of a partial operator"},
      {"check-op", "positivity / extendability diagnostics with witnesses"},
      {"diag", "diagonal-model predicates and truncation table"},
      {"extend-fn", "minimal representable extension of an ideal functional"},
      {"gns", "GNS representation data for an ideal functional"},
      {"scenario", "discrete-measure restriction report"}};
  for (const auto& [name, blurb] : names) {
    CLI::App* sub = app.add_subcommand(name, blurb);
    sub->add_option("--input", input, "problem file (JSON)")->required();
    sub->add_option("--output", output, "output path (default stdout)");
    sub->add_option("--format", format, "json or text");
    sub->add_option("--seed", seed, "sampling seed");
    sub->add_option("--tol", tol, "equality tolerance");
    sub->add_option("--rtol", rtol, "rank cutoff, relative");
    sub->add_option("--grid-density", grid_density, "oracle sample count");
  }
  CLI::App* corpus = app.add_subcommand("corpus", "run the bundled fixtures");
  corpus->add_option("--dir", corpus_dir, "fixture directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  if (corpus->parsed()) return run_corpus(corpus_dir, std::cout);

  const std::string sub = app.get_subcommands().front()->get_name();
  json file;
  try {
    std::ifstream in(input);
    if (!in) {
      std::cerr << "cannot open " << input << "\n";
      return kExitError;
    }
    file = json::parse(in);
  } catch (const std::exception& e) {
    std::cerr << "invalid JSON: " << e.what() << "\n";
    return kExitError;
  }
  // command-line options override the problem file's options block
  if (!file.is_object()) {
    std::cerr << "problem file must be a JSON object\n";
    return kExitError;
  }
  if (tol > 0 || rtol > 0 || grid_density > 0) {
    json& opts = file["options"];
    if (opts.is_null()) opts = json::object();
    if (tol > 0) opts["tol"] = tol;
    if (rtol > 0) opts["rtol"] = rtol;
    if (grid_density > 0) opts["grid_density"] = grid_density;
  }
  if (format.empty()) {
    format = "json";
    if (file.contains("options") && file["options"].is_object() &&
        file["options"].contains("format")) {
      format = file["options"]["format"].get<std::string>();
    }
  }
  Outcome outcome = execute(sub, file, seed);
  std::string rendered = format == "text" ? io::to_text(outcome.report)
                                          : io::canonical_dump(outcome.report);
  if (output.empty()) {
    std::cout << rendered;
  } else {
    std::ofstream out_file(output);
    if (!out_file) {
      std::cerr << "cannot write " << output << "\n";
      return kExitError;
    }
    out_file << rendered;
  }
  return outcome.exit_code;
}

}  // namespace kvn::cli
