#include "kvn/diagonal.hpp"

#include <doctest.h>

#include "test_util.hpp"

using namespace kvn;

namespace {

DiagonalOperator decay_all() {
  DiagonalOperator d;
  d.tail = TailKind::Decay;
  d.tail_param = 1.0;  // s(n) = 1/(n+1)
  return d;
}

DiagonalOperator prefix_53() {
  DiagonalOperator d;
  d.prefix_indices = {0, 1};
  d.prefix_values = {5.0, 3.0};
  d.tail = TailKind::Zero;
  return d;
}

DiagonalOperator const_one() {
  DiagonalOperator d;
  d.tail = TailKind::Constant;
  d.tail_param = 1.0;
  return d;
}

DiagonalOperator all_zero() {
  DiagonalOperator d;
  d.tail = TailKind::Zero;
  return d;
}

}  // namespace

TEST_CASE("extendability and the supremum constant") {
  CHECK(is_extendable(all_zero()).m_min == 0.0);
  CHECK(is_extendable(decay_all()).m_min == doctest::Approx(1.0));
  CHECK(is_extendable(prefix_53()).m_min == doctest::Approx(5.0));
  CHECK(is_extendable(const_one()).m_min == doctest::Approx(1.0));
}

TEST_CASE("compactness predicate") {
  CHECK(is_compact_extension(decay_all()));
  CHECK_FALSE(is_compact_extension(const_one()));
  DiagonalOperator fin = prefix_53();
  fin.tail = TailKind::Empty;
  CHECK(is_compact_extension(fin));
  CHECK(is_compact_extension(prefix_53()));
}

TEST_CASE("closed range predicate") {
  CHECK(has_closed_range_extension(prefix_53()));
  CHECK_FALSE(has_closed_range_extension(const_one()));
  CHECK(has_closed_range_extension(all_zero()));
  CHECK_FALSE(has_closed_range_extension(decay_all()));
}

TEST_CASE("truncation produces the expected l1 instances") {
  DiagonalOperator d = prefix_53();
  PartialPositiveOperator op1 = truncate(d, 1);
  ExtensionResult r1 = krein_von_neumann(op1);
  CHECK(std::abs(r1.A_N(0, 0) - Cplx(5, 0)) < 1e-12);

  PartialPositiveOperator op4 = truncate(d, 4);
  ExtensionResult r4 = krein_von_neumann(op4);
  Matrix expected = Matrix::Zero(4, 4);
  expected(0, 0) = 5;
  expected(1, 1) = 3;
  CHECK((r4.A_N - expected).cwiseAbs().maxCoeff() < 1e-12);

  PartialPositiveOperator opz = truncate(all_zero(), 3);
  CHECK(krein_von_neumann(opz).A_N.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("truncated Schwarz bounds are monotone with limit sup s") {
  for (const DiagonalOperator& d : {decay_all(), prefix_53(), const_one()}) {
    const double sup = is_extendable(d).m_min;
    double prev = 0.0;
    for (int n : {1, 2, 4, 8, 16}) {
      PartialPositiveOperator op = truncate(d, n);
      double m = op.domain_dim() ? schwarz_bound(op).hi : 0.0;
      double expect = 0.0;
      for (int j = 0; j < n; ++j) {
        if (d.in_support(j)) expect = std::max(expect, d.value_at(j));
      }
      CHECK(m == doctest::Approx(expect).epsilon(1e-9));
      CHECK(m >= prev - 1e-12);
      prev = m;
    }
    CHECK(prev == doctest::Approx(sup).epsilon(1e-9));
  }
}

TEST_CASE("epsilon-net cardinality stabilizes exactly for compact extensions") {
  for (const DiagonalOperator& d : {decay_all(), prefix_53(), const_one()}) {
    const bool compact = is_compact_extension(d);
    for (double eps : {0.5, 0.25}) {
      const double n16 = epsilon_net_log2_cardinality(d, 16, eps);
      const double n32 = epsilon_net_log2_cardinality(d, 32, eps);
      CHECK((n16 == n32) == compact);
    }
  }
}

TEST_CASE("Mprime of truncations grows exactly for non-closed-range operators") {
  // s == 1: equal-mass vectors give <Ax|x>/||Ax||_inf^2 = m
  DiagonalOperator d = const_one();
  ClosedRangeConstants c4 = closed_range_constants(truncate(d, 4));
  ClosedRangeConstants c8 = closed_range_constants(truncate(d, 8));
  CHECK(c4.Mprime.lo == doctest::Approx(4.0));
  CHECK(c8.Mprime.lo == doctest::Approx(8.0));
  CHECK(c8.Mprime.hi <= 8.0 * (1 + 1e-9));

  // finite support: Mprime stabilizes
  DiagonalOperator p = prefix_53();
  ClosedRangeConstants p4 = closed_range_constants(truncate(p, 4));
  ClosedRangeConstants p8 = closed_range_constants(truncate(p, 8));
  CHECK(p4.Mprime.hi == doctest::Approx(p8.Mprime.hi).epsilon(1e-9));
  // 5a^2 + 3b^2 against max(5a, 3b)^2 peaks at 8/15
  CHECK(p8.Mprime.lo == doctest::Approx(8.0 / 15.0).epsilon(1e-6));
}

TEST_CASE("non-compact constraint set contains a separated family") {
  // s == 1: the functionals A e_n are 1-separated in the linf norm while
  // <A e_n | e_n> = 1 stays inside the constraint set
  DiagonalOperator d = const_one();
  PartialPositiveOperator op = truncate(d, 6);
  for (int i = 0; i < 6; ++i) {
    Vector ei = Vector::Unit(6, i);
    CHECK(std::real(pair(op.values * ei, op.domain_basis * ei)) ==
          doctest::Approx(1.0));
    for (int j = 0; j < i; ++j) {
      Vector diff = op.values * (Vector::Unit(6, i) - Vector::Unit(6, j));
      CHECK(op.space.dual_norm(diff) >= 1.0 - 1e-12);
    }
  }
}

TEST_CASE("validation rejects malformed data") {
  DiagonalOperator bad;
  bad.prefix_indices = {0, 0};
  bad.prefix_values = {1.0, 2.0};
  CHECK_THROWS_AS(bad.validate(), Error);
  DiagonalOperator neg;
  neg.prefix_indices = {0};
  neg.prefix_values = {-1.0};
  CHECK_THROWS_AS(neg.validate(), Error);
  CHECK_THROWS_AS(truncate(all_zero(), 0), Error);
}
