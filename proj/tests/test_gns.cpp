#include "kvn/gns.hpp"

#include <doctest.h>

#include "test_util.hpp"

using namespace kvn;
using namespace kvn::testutil;

TEST_CASE("functional validation") {
  CHECK_NOTHROW(validate_ideal_functional(z2_total()));
  CHECK_NOTHROW(validate_ideal_functional(z2_ideal()));
  CHECK_NOTHROW(validate_ideal_functional(m2_column_state()));
  CHECK_NOTHROW(validate_ideal_functional(block_trace()));
  CHECK_NOTHROW(validate_ideal_functional(s3_sign_ideal()));

  // a subspace that is not a left ideal is rejected
  IdealFunctional bad;
  bad.algebra = StarAlgebra::matrix_algebra(2);
  bad.ideal_basis = Matrix::Zero(4, 1);
  bad.ideal_basis(0, 0) = 1;  // span{E00} alone is not left-closed
  bad.values = cvec({1.0});
  CHECK_THROWS_AS(validate_ideal_functional(bad), Error);

  // positivity failures are typed
  IdealFunctional neg = z2_total();
  neg.values = cvec({-1.0, 0.0});
  CHECK_THROWS_AS(validate_ideal_functional(neg), NotPositive);
}

TEST_CASE("Gram matrix of the z2 fixture") {
  Matrix g = functional_gram(z2_total());
  CHECK((g - cmat(2, 2, {1.0, 0.5, 0.5, 1.0})).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("representability constants") {
  CHECK(representability_check(z2_total()) == doctest::Approx(1.0));
  CHECK(representability_check(z2_ideal()) == doctest::Approx(1.0));
  CHECK(representability_check(m2_column_state()) == doctest::Approx(1.0));
  CHECK(representability_check(block_trace()) == doctest::Approx(2.0));
  CHECK(representability_check(block_state()) == doctest::Approx(1.0));
  CHECK(representability_check(s3_sign_ideal()) == doctest::Approx(1.0));

  IdealFunctional zero = z2_total();
  zero.values = cvec({0.0, 0.0});
  CHECK(representability_check(zero) == 0.0);
}

TEST_CASE("the 2x2 counterexample is refused with a kernel witness") {
  IdealFunctional f = m2_column_counterexample();
  bool refused = false;
  try {
    representability_check(f);
  } catch (const NotRepresentable& e) {
    refused = true;
    REQUIRE(e.witness.size() == 4);
    // witness a satisfies f(a^*a) = 0 and f(a) != 0
    StarAlgebra& alg = f.algebra;
    Vector sq = alg.multiply(alg.involute(e.witness), e.witness);
    CHECK(std::abs(functional_value(f, sq)) < 1e-9);
    CHECK(std::abs(functional_value(f, e.witness)) > 0.1);
  }
  CHECK(refused);
  // determinism
  Vector w1, w2;
  try {
    representability_check(f);
  } catch (const NotRepresentable& e) {
    w1 = e.witness;
  }
  try {
    representability_check(f);
  } catch (const NotRepresentable& e) {
    w2 = e.witness;
  }
  CHECK((w1 - w2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("schwarz functional bound") {
  IdealFunctional zero = z2_total();
  zero.values = cvec({0.0, 0.0});
  CHECK(schwarz_functional_bound(zero).hi == 0.0);

  // isometric involution: M <= C_min, here with equality
  Interval m = schwarz_functional_bound(z2_total());
  CHECK(m.lo == doctest::Approx(1.0));
  CHECK(m.hi == doctest::Approx(1.0));

  Interval mb = schwarz_functional_bound(block_trace());
  CHECK(mb.lo == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(mb.hi >= 2.0 - 1e-9);
}

TEST_CASE("GNS construction on the fixtures") {
  GnsData z2 = gns(z2_total());
  CHECK(z2.H_dim == 2);
  CHECK(z2.reconstruction_residual <= 1e-9);
  CHECK(z2.star_residual <= 1e-9);
  CHECK(z2.mult_residual <= 1e-9);
  CHECK(z2.cyclic);

  GnsData state = gns(m2_column_state());
  CHECK(state.H_dim == 2);

  // f(x) = x_00 on the whole matrix algebra has a 2-dim GNS space
  IdealFunctional whole;
  whole.algebra = StarAlgebra::matrix_algebra(2);
  whole.ideal_basis = Matrix::Identity(4, 4);
  whole.values = cvec({1.0, 0.0, 0.0, 0.0});
  GnsData gw = gns(whole);
  CHECK(gw.H_dim == 2);
  CHECK(gw.reconstruction_residual <= 1e-9);

  GnsData sign = gns(s3_sign_ideal());
  CHECK(sign.H_dim == 1);

  GnsData regular = gns(s3_regular_state(42));
  CHECK(regular.reconstruction_residual <= 1e-8);
  CHECK(regular.cyclic);

  IdealFunctional zero = z2_total();
  zero.values = cvec({0.0, 0.0});
  CHECK(gns(zero).H_dim == 0);
}

TEST_CASE("minimal extension values and certificates") {
  // a total functional extends to itself
  MinimalExtension z2 = minimal_extension(z2_total(), 20, 1);
  CHECK((z2.fN - cvec({1.0, 0.5})).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(z2.representable);
  CHECK(z2.supformula_error <= 1e-6);
  CHECK(z2.cyclic_identity_error <= 1e-9);

  // the minimal extension of the ideal functional is the sign character
  MinimalExtension zi = minimal_extension(z2_ideal(), 20, 2);
  CHECK((zi.fN - cvec({1.0, -1.0})).cwiseAbs().maxCoeff() < 1e-9);

  // the column-state extends to the (0,0) vector state
  MinimalExtension ms = minimal_extension(m2_column_state(), 20, 3);
  CHECK((ms.fN - cvec({1.0, 0.0, 0.0, 0.0})).cwiseAbs().maxCoeff() < 1e-9);

  // trace on the first block extends by zero on the complement
  MinimalExtension bt = minimal_extension(block_trace(), 20, 4);
  CHECK((bt.fN - cvec({1.0, 0.0, 0.0, 1.0, 0.0})).cwiseAbs().maxCoeff() < 1e-9);

  // sign functional on the sign ideal extends to the sign character
  MinimalExtension sg = minimal_extension(s3_sign_ideal(), 20, 5);
  CHECK((sg.fN - cvec({1, -1, -1, -1, 1, 1})).cwiseAbs().maxCoeff() < 1e-9);

  IdealFunctional zero = z2_total();
  zero.values = cvec({0.0, 0.0});
  CHECK(minimal_extension(zero, 5, 6).fN.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("minimality against representable candidate extensions") {
  // block fixture: add any density functional on the complementary block
  IdealFunctional bt = block_trace();
  Vector fn = minimal_extension(bt, 10, 7).fN;
  std::mt19937_64 rng = seeded_rng(17);
  std::uniform_real_distribution<double> pos(0.0, 3.0);
  for (int t = 0; t < 25; ++t) {
    Vector cand = fn;
    cand[4] += pos(rng);  // t * (value on the M1 block)
    CHECK(verify_functional_minimality(bt, fn, cand, 25, 1000 + t));
  }

  // z2 ideal: any multiple of the trivial character vanishes on the ideal
  IdealFunctional zi = z2_ideal();
  Vector fzi = minimal_extension(zi, 10, 8).fN;
  for (int t = 0; t < 25; ++t) {
    Vector cand = fzi + pos(rng) * cvec({1.0, 1.0});
    CHECK(verify_functional_minimality(zi, fzi, cand, 25, 2000 + t));
  }

  // s3 sign ideal: trivial character and 2-dim positive-definite functions
  IdealFunctional si = s3_sign_ideal();
  Vector fsi = minimal_extension(si, 10, 9).fN;
  for (int t = 0; t < 25; ++t) {
    Vector cand = fsi + pos(rng) * Vector::Ones(6) + s3_twodim_state(300 + t);
    CHECK(verify_functional_minimality(si, fsi, cand, 25, 3000 + t));
  }

  // column state: densities supported on the (1,1) entry vanish on the ideal
  IdealFunctional ms = m2_column_state();
  Vector fms = minimal_extension(ms, 10, 10).fN;
  for (int t = 0; t < 25; ++t) {
    Vector cand = fms;
    cand[3] += pos(rng);
    CHECK(verify_functional_minimality(ms, fms, cand, 25, 4000 + t));
  }

  // candidates that fail to extend f or fail representability are typed out
  Vector not_ext = fms;
  not_ext[0] += 1.0;
  CHECK_THROWS_AS(verify_functional_minimality(ms, fms, not_ext, 5, 1),
                  BadCandidate);
  Vector not_rep = fms;
  not_rep[1] += 5.0;  // breaks positivity of the total Gram
  CHECK_THROWS_AS(verify_functional_minimality(ms, fms, not_rep, 5, 1),
                  BadCandidate);
}

TEST_CASE("unital minimal extension") {
  // total functional on a unital algebra: e = delta_e, f_N = f
  IdealFunctional z2 = z2_total();
  Vector fz = unital_minimal_extension(z2, *z2.algebra.unit);
  CHECK((fz - cvec({1.0, 0.5})).cwiseAbs().maxCoeff() < 1e-9);

  // column ideal with the matrix unit: agrees with the general construction
  IdealFunctional ms = m2_column_state();
  Vector fm = unital_minimal_extension(ms, *ms.algebra.unit);
  CHECK((fm - cvec({1.0, 0.0, 0.0, 0.0})).cwiseAbs().maxCoeff() < 1e-9);

  // E00 is not a left unit for the column ideal (E00 E10 = 0)
  CHECK_THROWS_AS(unital_minimal_extension(ms, Vector::Unit(4, 0)), NotLeftUnit);

  // the counterexample is refused before any unit is considered
  CHECK_THROWS_AS(
      unital_minimal_extension(m2_column_counterexample(), *ms.algebra.unit),
      NotRepresentable);
}

TEST_CASE("approximate unit limit") {
  // constant net at a left unit: zero deviation everywhere
  IdealFunctional z2 = z2_total();
  ApproxUnitReport constant =
      approximate_unit_limit(z2, {*z2.algebra.unit, *z2.algebra.unit}, 1.0);
  CHECK(constant.monotone);
  CHECK(constant.final_deviation <= 1e-12);

  // discrete-measure fixture: indicators growing to 1_K
  RealVector mu(3);
  mu << 1, 2, 4;
  IdealFunctional dm = discrete_measure_functional(mu, {0, 1});
  Vector e_half = cvec({1.0, 0.0, 0.0});
  Vector e_full = cvec({1.0, 1.0, 0.0});
  ApproxUnitReport grow = approximate_unit_limit(dm, {e_half, e_full}, 1.0);
  CHECK(grow.monotone);
  CHECK(grow.deviations[0] > 0.1);
  CHECK(grow.final_deviation <= 1e-9);

  CHECK_THROWS_AS(approximate_unit_limit(dm, {2.0 * e_full}, 1.0), UnboundedNet);

  // degenerate empty ideal: f_N = 0 and every deviation is ||conj(A_N e_i)||
  IdealFunctional empty;
  empty.algebra = StarAlgebra::group_algebra_cyclic(2);
  empty.ideal_basis = Matrix(2, 0);
  empty.values = Vector(0);
  ApproxUnitReport degen =
      approximate_unit_limit(empty, {*empty.algebra.unit}, 1.0);
  CHECK(degen.final_deviation == 0.0);  // A_N = 0 here
  CHECK(minimal_extension(empty, 5, 1).fN.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("unitization extension") {
  StarAlgebra z2 = StarAlgebra::group_algebra_cyclic(2);
  UnitizationResult res = unitization_extension(z2, cvec({1.0, 0.5}), 20, 5);
  CHECK(res.unitization.dim == 3);
  // f_N((1,0)^*(1,0)) = C_min = 1, and the unital consistency gives
  // f_N(lambda, b) = f(lambda delta_e + b)
  CHECK((res.fN - cvec({1.0, 1.0, 0.5})).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(res.supformula_error <= 1e-6);

  UnitizationResult zero = unitization_extension(z2, cvec({0.0, 0.0}), 5, 6);
  CHECK(zero.fN.cwiseAbs().maxCoeff() < 1e-12);

  // extension property through the embedded ideal
  IdealFunctional lifted{res.unitization, Matrix::Zero(3, 2), cvec({1.0, 0.5})};
  lifted.ideal_basis(1, 0) = 1;
  lifted.ideal_basis(2, 1) = 1;
  CHECK((lifted.ideal_basis.transpose() * res.fN - lifted.values)
            .cwiseAbs()
            .maxCoeff() < 1e-9);

  // the adjoined unit is a left unit on the embedded ideal, so the unital
  // shortcut must reproduce the same extension
  Vector via_unit = unital_minimal_extension(lifted, *res.unitization.unit);
  CHECK((via_unit - res.fN).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("C*-ideal norm chain") {
  CstarNormChain trace = cstar_ideal_norm_check(block_trace());
  CHECK(trace.f_norm == doctest::Approx(2.0));
  CHECK(trace.zeta_sq == doctest::Approx(2.0));
  CHECK(trace.fN_norm == doctest::Approx(2.0));
  CHECK(trace.A_N_norm.lo == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(trace.chain_ok);

  CstarNormChain state = cstar_ideal_norm_check(block_state());
  CHECK(state.f_norm == doctest::Approx(1.0));
  CHECK(state.chain_ok);

  IdealFunctional zero = block_trace();
  zero.values = Vector::Zero(4);
  CstarNormChain zchain = cstar_ideal_norm_check(zero);
  CHECK(zchain.f_norm == 0.0);
  CHECK(zchain.chain_ok);

  // weighted-l1 algebras and non-block ideals are typed out
  CHECK_THROWS_AS(cstar_ideal_norm_check(z2_total()), NotCStarInstance);
  CHECK_THROWS_AS(cstar_ideal_norm_check(m2_column_state()), NotCStarInstance);
}

TEST_CASE("completeness bound") {
  StarAlgebra z2 = StarAlgebra::group_algebra_cyclic(2);
  CompletenessBound zero = completeness_bound(z2, cvec({0.0, 0.0}));
  CHECK(zero.empty_supremum);

  CompletenessBound zb = completeness_bound(z2, cvec({1.0, 0.5}));
  CHECK_FALSE(zb.empty_supremum);
  CHECK(zb.L.lo > 0.0);
  CHECK(zb.L.hi >= zb.L.lo);
  // certified: sampled ratios stay below the upper bound
  IdealFunctional tz{z2, Matrix::Identity(2, 2), cvec({1.0, 0.5})};
  Matrix avals = value_matrix(tz);
  std::mt19937_64 rng = seeded_rng(12);
  for (int t = 0; t < 50; ++t) {
    Vector a = random_vector(rng, 2);
    const double faa =
        std::real(functional_value(tz, z2.multiply(z2.involute(a), a)));
    const double dn = z2.dual_norm(avals * a);
    if (dn < 1e-9) continue;
    CHECK(faa <= zb.L.hi * dn * dn * (1 + 1e-9) + 1e-12);
  }

  // M2 state x -> x_00: the bound is exactly 1
  StarAlgebra m2 = StarAlgebra::matrix_algebra(2);
  CompletenessBound mb = completeness_bound(m2, cvec({1.0, 0.0, 0.0, 0.0}));
  CHECK(mb.L.lo == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(mb.L.hi == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("spectral radius inequality for positive functionals on ideals") {
  std::mt19937_64 rng = seeded_rng(33);
  for (const IdealFunctional& f :
       {z2_total(), z2_ideal(), m2_column_state(), block_trace(),
        s3_sign_ideal(), s3_regular_state(7)}) {
    const int k = static_cast<int>(f.ideal_basis.cols());
    for (int t = 0; t < 40; ++t) {
      Vector a = f.ideal_basis * random_vector(rng, k);
      Vector x = random_vector(rng, f.algebra.dim);
      Vector xa = f.algebra.multiply(x, a);
      const double lhs = std::real(
          functional_value(f, f.algebra.multiply(f.algebra.involute(xa), xa)));
      const double faa = std::real(
          functional_value(f, f.algebra.multiply(f.algebra.involute(a), a)));
      const double rxx =
          spectral_radius(f.algebra, f.algebra.multiply(f.algebra.involute(x), x));
      CHECK(lhs <= rxx * faa + 1e-9 * std::max(1.0, rxx * faa));
    }
  }
}

TEST_CASE("discrete measure scenario") {
  RealVector mu(3);
  mu << 1, 2, 4;

  ScenarioReport flat = discrete_measure_scenario(mu, {0, 1}, (RealVector(3) << 1, 1, 0).finished());
  CHECK(flat.mu_K_norm == doctest::Approx(3.0));
  CHECK(flat.muKN_norm == doctest::Approx(3.0));
  CHECK(flat.A_N_norm.lo == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(flat.chain_ok);
  CHECK(flat.eK_mu_extends);
  CHECK(flat.eK_mu_norm == doctest::Approx(3.0));
  CHECK_FALSE(flat.strict);
  // with no mass outside K the competitor equals mu_{K,N}
  CHECK((flat.eK_mu - flat.fN).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(flat.avals_check <= 1e-9);

  ScenarioReport strict = discrete_measure_scenario(
      mu, {0, 1}, (RealVector(3) << 1, 1, 0.5).finished());
  CHECK(strict.eK_mu_norm == doctest::Approx(5.0));
  CHECK(strict.sup_side == doctest::Approx(3.0));
  CHECK(strict.strict);

  RealVector zero = RealVector::Zero(3);
  ScenarioReport z = discrete_measure_scenario(zero, {0, 1},
                                               (RealVector(3) << 1, 1, 0).finished());
  CHECK(z.mu_K_norm == 0.0);
  CHECK(z.chain_ok);

  CHECK_THROWS_AS(discrete_measure_scenario(
                      mu, {0, 1}, (RealVector(3) << 1, 0.5, 0).finished()),
                  BadIndicator);
  CHECK_THROWS_AS(discrete_measure_scenario(
                      mu, {0, 1}, (RealVector(3) << 1, 1, 1.5).finished()),
                  BadIndicator);
}

TEST_CASE("everywhere-defined positive functionals satisfy the norm bound") {
  // M = A: the induced operator is everywhere defined, so the Schwarz
  // constant is capped by its operator norm
  for (const IdealFunctional& f : {z2_total(), s3_regular_state(5)}) {
    Interval m = schwarz_functional_bound(f);
    PartialPositiveOperator op = induced_operator(f);
    OperatorNormResult a_norm = operator_norm(op.values, op.space);
    CHECK(m.lo <= a_norm.value.hi * (1 + 1e-9) + 1e-12);
  }
}

TEST_CASE("isometric involution caps M at C_min") {
  for (const IdealFunctional& f :
       {z2_total(), z2_ideal(), s3_sign_ideal(), block_trace()}) {
    const double c = representability_check(f);
    Interval m = schwarz_functional_bound(f);
    CHECK(m.lo <= c * (1 + 1e-6) + 1e-9);
  }
}
