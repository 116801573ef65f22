#include "kvn/gns.hpp"

#include <Eigen/QR>

#include <optional>

namespace kvn {

namespace {

struct IdealOps {
  Matrix m;  // d x k ideal basis
  std::optional<Eigen::CompleteOrthogonalDecomposition<Matrix>> solver;
  Vector v;

  explicit IdealOps(const IdealFunctional& f) : m(f.ideal_basis), v(f.values) {
    if (m.cols() > 0) solver.emplace(m);
  }

  // expansion of an algebra element in the ideal basis
  Vector expand(const Vector& coords, double tol, const char* what) const {
    if (m.cols() == 0) {
      if (max_abs(coords) > tol * std::max(1.0, coords.norm())) {
        throw Error(std::string(what) + ": element lies outside the ideal");
      }
      return Vector(0);
    }
    Vector gamma = solver->solve(coords);
    const double res = (m * gamma - coords).norm();
    if (res > tol * std::max(1.0, coords.norm())) {
      throw Error(std::string(what) + ": element lies outside the ideal");
    }
    return gamma;
  }

  Cplx apply(const Vector& coords, double tol, const char* what) const {
    Vector gamma = expand(coords, tol, what);
    return v.size() ? (v.array() * gamma.array()).sum() : Cplx(0, 0);
  }
};

struct GramQuotient {
  Matrix g;        // k x k Hermitian PSD
  Matrix pinv;     // k x k
  Matrix q;        // r x k, [c] -> orthonormal coordinates
  Matrix p;        // k x r, right inverse of q
  int rank{0};
};

GramQuotient quotient_of(const Matrix& gram, double rtol) {
  GramQuotient out;
  out.g = 0.5 * (gram + gram.adjoint());
  const int k = static_cast<int>(gram.rows());
  if (k == 0) {
    out.pinv = Matrix(0, 0);
    out.q = Matrix(0, 0);
    out.p = Matrix(0, 0);
    return out;
  }
  HermitianEig eig = hermitian_eig(out.g);
  const double lmax = max_abs(eig.values);
  const double cut = rtol * std::max(lmax, 1e-300);
  std::vector<int> pos;
  for (int i = 0; i < k; ++i) {
    if (eig.values[i] > cut) pos.push_back(i);
  }
  out.rank = static_cast<int>(pos.size());
  Matrix u(k, out.rank);
  RealVector lam(out.rank);
  for (int j = 0; j < out.rank; ++j) {
    u.col(j) = eig.vectors.col(pos[j]);
    lam[j] = eig.values[pos[j]];
  }
  out.q = lam.cwiseSqrt().asDiagonal() * u.adjoint();
  out.p = u * lam.cwiseSqrt().cwiseInverse().asDiagonal();
  out.pinv = u * lam.cwiseInverse().asDiagonal() * u.adjoint();
  return out;
}

Vector basis_vec(int d, int i) { return Vector::Unit(d, i); }

// f_N evaluated at an algebra element.
Cplx functional_at(const Vector& fn, const Vector& coords) {
  return fn.size() ? (fn.array() * coords.array()).sum() : Cplx(0, 0);
}

// Gram of an everywhere-defined functional: (i, j) -> phi(e_i^* e_j).
Matrix total_gram(const StarAlgebra& a, const Vector& phi) {
  Matrix g(a.dim, a.dim);
  for (int i = 0; i < a.dim; ++i) {
    Vector star_i = a.involute(basis_vec(a.dim, i));
    for (int j = 0; j < a.dim; ++j) {
      g(i, j) = functional_at(phi, a.multiply(star_i, basis_vec(a.dim, j)));
    }
  }
  return g;
}

}  // namespace

void validate_ideal_functional(const IdealFunctional& f, double tol) {
  const int d = f.algebra.dim;
  const int k = static_cast<int>(f.ideal_basis.cols());
  if (f.ideal_basis.rows() != d) {
    throw DimensionMismatch("ideal basis rows must match the algebra dimension");
  }
  if (f.values.size() != k) {
    throw DimensionMismatch("one functional value per ideal basis element");
  }
  if (k > 0 && numerical_rank(f.ideal_basis) != k) {
    throw Error("ideal basis columns are linearly dependent");
  }
  IdealOps ops(f);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < k; ++j) {
      ops.expand(f.algebra.lmul[i] * f.ideal_basis.col(j), 1e-7,
                 "left-multiplication closure");
    }
  }
  Matrix g = functional_gram(f);
  if (g.size() > 0) {
    const double scale = std::max(1.0, max_abs(g));
    if (hermitian_deviation(g) > tol * scale) {
      throw NotSymmetric("functional Gram matrix is not Hermitian");
    }
    if (min_eigenvalue(g) < -tol * scale) {
      throw NotPositive("functional is not positive on the ideal");
    }
  }
}

Cplx functional_value(const IdealFunctional& f, const Vector& algebra_coords,
                      double tol) {
  IdealOps ops(f);
  return ops.apply(algebra_coords, tol, "functional_value");
}

Matrix value_matrix(const IdealFunctional& f) {
  const int d = f.algebra.dim;
  const int k = static_cast<int>(f.ideal_basis.cols());
  IdealOps ops(f);
  Matrix a_vals(d, k);
  for (int i = 0; i < d; ++i) {
    Vector star_i = f.algebra.involute(basis_vec(d, i));
    for (int j = 0; j < k; ++j) {
      a_vals(i, j) = ops.apply(f.algebra.multiply(star_i, f.ideal_basis.col(j)),
                               1e-7, "value matrix");
    }
  }
  return a_vals;
}

Matrix functional_gram(const IdealFunctional& f) {
  Matrix g = f.ideal_basis.adjoint() * value_matrix(f);
  return g.size() ? Matrix(0.5 * (g + g.adjoint())) : g;
}

PartialPositiveOperator induced_operator(const IdealFunctional& f) {
  if (f.algebra.norm_desc.kind != AlgebraNorm::Kind::L1Weighted) {
    throw Error("induced_operator maps only weighted-l1 algebras onto a NormedSpace");
  }
  PartialPositiveOperator op;
  op.space = NormedSpace::with_weights(NormTag::L1, f.algebra.norm_desc.weights);
  op.domain_basis = f.ideal_basis;
  op.values = value_matrix(f);
  return op;
}

double representability_check(const IdealFunctional& f, double rtol) {
  validate_ideal_functional(f);
  Matrix g = functional_gram(f);
  const int k = static_cast<int>(g.rows());
  if (k == 0) return 0.0;
  Matrix kernel;
  Matrix pinv = psd_pseudo_inverse(g, rtol, nullptr, &kernel);
  const double vscale = std::max(1.0, max_abs(f.values));
  for (int j = 0; j < kernel.cols(); ++j) {
    const Cplx fa = (f.values.array() * kernel.col(j).array()).sum();
    if (std::abs(fa) > 1e-8 * vscale) {
      throw NotRepresentable(
          "f(a^*a) = 0 but f(a) != 0 on a kernel direction",
          f.ideal_basis * kernel.col(j));
    }
  }
  Vector w = f.values.conjugate();
  const double c_min = std::real(w.dot(pinv * w));
  const double oracle = psd_ratio_sup(g, w);
  if (std::abs(c_min - oracle) > 1e-6 * std::max(1.0, c_min)) {
    throw InternalCheck("C_min closed form disagrees with the ellipsoid oracle");
  }
  return c_min;
}

Interval schwarz_functional_bound(const IdealFunctional& f, double rtol) {
  const double c_min = representability_check(f, rtol);
  const int k = static_cast<int>(f.ideal_basis.cols());
  Matrix a_vals = value_matrix(f);
  if (k == 0 || max_abs(a_vals) == 0.0) return Interval::point(0.0);

  Interval m;
  if (f.algebra.norm_desc.kind == AlgebraNorm::Kind::L1Weighted) {
    m = schwarz_bound(induced_operator(f), rtol);
  } else if (f.algebra.cstar_instance()) {
    Matrix g = functional_gram(f);
    GramQuotient quo = quotient_of(g, rtol);
    IdealOps ops(f);
    auto ratio = [&](const Vector& gamma) {
      const double den = std::real(gamma.dot(quo.g * gamma));
      if (den <= 1e-13 * std::max(1.0, max_abs(quo.g)) *
                     gamma.squaredNorm()) {
        return 0.0;
      }
      const double num = f.algebra.dual_norm(a_vals * gamma);
      return num * num / den;
    };
    auto ascend = [&](Vector gamma) {
      double val = ratio(gamma);
      for (int it = 0; it < 60; ++it) {
        Vector phi = a_vals * gamma;
        if (max_abs(phi) == 0.0) break;
        Vector x = f.algebra.dual_maximizer(phi);
        // t_j = f(x^* a_j); the next gamma maximizes |t gamma|^2 / gamma^*G gamma
        Vector tvec(k);
        Vector star_x = f.algebra.involute(x);
        for (int j = 0; j < k; ++j) {
          tvec[j] = ops.apply(f.algebra.multiply(star_x, f.ideal_basis.col(j)),
                              1e-7, "schwarz ascent");
        }
        gamma = quo.pinv * tvec.conjugate();
        const double next = ratio(gamma);
        if (next <= val + 1e-13 * std::max(1.0, val)) break;
        val = next;
      }
      return val;
    };
    double lo = 0.0;
    for (int j = 0; j < k; ++j) lo = std::max(lo, ascend(basis_vec(k, j)));
    lo = std::max(lo, ascend(f.values.conjugate()));
    std::mt19937_64 rng = seeded_rng(0x9d5a11ULL);
    for (int t = 0; t < 12; ++t) lo = std::max(lo, ascend(random_vector(rng, k)));
    // nuclear(Phi)^2 <= (sum of block dims) * frobenius(Phi)^2
    RealVector pencil = pencil_eigenvalues_on_range(a_vals.adjoint() * a_vals, g, rtol);
    const double lmax = pencil.size() ? std::max(0.0, pencil.maxCoeff()) : 0.0;
    const double hi = f.algebra.blocks->total_dim() * lmax;
    m = Interval::bounds(lo, std::max(lo, hi));
  } else {
    throw Error("schwarz_functional_bound needs a weighted-l1 or C*-instance norm");
  }

  if (f.algebra.involution_isometric && m.lo > c_min * (1 + 1e-6) + 1e-9) {
    throw InternalCheck("isometric involution must give M <= C_min");
  }
  if (f.algebra.cstar_instance()) {
    const double mod = modulus_of_continuity_lower_bound(f.algebra, 20, 11);
    if (m.lo > c_min * mod * mod * (1 + 1e-6) + 1e-9) {
      throw InternalCheck("M exceeds C_min times the modulus bound");
    }
  }
  return m;
}

GnsData gns(const IdealFunctional& f, double rtol) {
  GnsData out;
  out.C_min = representability_check(f, rtol);
  const int d = f.algebra.dim;
  const int k = static_cast<int>(f.ideal_basis.cols());
  Matrix a_vals = value_matrix(f);
  Matrix g = functional_gram(f);
  GramQuotient quo = quotient_of(g, rtol);
  out.H_dim = quo.rank;
  out.quotient = quo.q;
  out.lift = quo.p;

  // left multiplication on ideal coefficients, descended to the quotient
  IdealOps ops(f);
  std::vector<Matrix> lm_ideal(d);
  for (int i = 0; i < d; ++i) {
    Matrix x(k, k);
    for (int j = 0; j < k; ++j) {
      x.col(j) = ops.expand(f.algebra.lmul[i] * f.ideal_basis.col(j), 1e-7,
                            "pi_A well-definedness");
    }
    lm_ideal[i] = x;
    out.pi.push_back(quo.q * x * quo.p);
  }
  out.zeta = quo.p.adjoint() * f.values.conjugate();
  out.fN = (a_vals * (quo.pinv * f.values.conjugate())).conjugate();

  // postconditions
  auto pi_of = [&](const Vector& coords) {
    Matrix m = Matrix::Zero(out.H_dim, out.H_dim);
    for (int i = 0; i < d; ++i) {
      if (coords[i] != Cplx(0, 0)) m += coords[i] * out.pi[i];
    }
    return m;
  };
  for (int i = 0; i < d; ++i) {
    Vector star_i = f.algebra.involute(basis_vec(d, i));
    out.star_residual = std::max(
        out.star_residual, max_abs(pi_of(star_i) - out.pi[i].adjoint()));
    for (int j = 0; j < d; ++j) {
      Vector prod = f.algebra.multiply(basis_vec(d, i), basis_vec(d, j));
      out.mult_residual = std::max(
          out.mult_residual, max_abs(out.pi[i] * out.pi[j] - pi_of(prod)));
    }
  }
  Matrix orbit(out.H_dim, k);
  for (int j = 0; j < k; ++j) {
    Matrix pj = pi_of(f.ideal_basis.col(j));
    orbit.col(j) = pj * out.zeta;
    const Cplx recon = out.zeta.dot(pj * out.zeta);  // <pi(a_j) zeta, zeta>
    out.reconstruction_residual =
        std::max(out.reconstruction_residual, std::abs(recon - f.values[j]));
  }
  out.cyclic = numerical_rank(orbit, 1e-8) == out.H_dim;

  const double vscale = std::max(1.0, max_abs(f.values));
  if (out.star_residual > 1e-8 || out.mult_residual > 1e-8 ||
      out.reconstruction_residual > kTol * vscale || !out.cyclic) {
    throw InternalCheck("GNS postconditions failed");
  }
  return out;
}

MinimalExtension minimal_extension(const IdealFunctional& f, int samples,
                                   std::uint64_t seed) {
  GnsData data = gns(f);
  MinimalExtension out;
  out.fN = data.fN;
  const int d = f.algebra.dim;
  const int k = static_cast<int>(f.ideal_basis.cols());
  const double vscale = std::max(1.0, max_abs(f.values));

  if (k > 0) {
    out.extension_error =
        max_abs(f.ideal_basis.transpose() * out.fN - f.values);
  }
  out.representable = is_representable_total(f.algebra, out.fN, &out.representable_C);

  Matrix g = functional_gram(f);
  Matrix a_vals = value_matrix(f);
  GramQuotient quo = quotient_of(g, kRankRtol);
  IdealOps ops(f);
  std::mt19937_64 rng = seeded_rng(seed);
  for (int t = 0; t < samples; ++t) {
    Vector x = random_vector(rng, d);
    Vector star_x = f.algebra.involute(x);
    // explicit formula on squares against the ellipsoid oracle
    Vector tvec(k);
    for (int j = 0; j < k; ++j) {
      tvec[j] = ops.apply(f.algebra.multiply(star_x, f.ideal_basis.col(j)),
                          1e-7, "sup formula");
    }
    const double sup = psd_ratio_sup(g, tvec.conjugate(), 500, seed + t);
    const Cplx fnxx = functional_at(out.fN, f.algebra.multiply(star_x, x));
    out.supformula_error =
        std::max(out.supformula_error,
                 std::abs(fnxx - sup) / std::max(1.0, std::abs(fnxx)));
    // cyclic identity pi(x) zeta = [G^+ A^* x]
    Matrix pix = Matrix::Zero(data.H_dim, data.H_dim);
    for (int i = 0; i < d; ++i) {
      if (x[i] != Cplx(0, 0)) pix += x[i] * data.pi[i];
    }
    Vector lhs = pix * data.zeta;
    Vector rhs = data.quotient * (quo.pinv * (a_vals.adjoint() * x));
    out.cyclic_identity_error =
        std::max(out.cyclic_identity_error, max_abs(lhs - rhs));
  }

  if (out.extension_error > kTol * vscale) {
    throw InternalCheck("f_N does not extend f");
  }
  if (!out.representable) {
    throw InternalCheck("f_N failed the whole-algebra representability check");
  }
  if (samples > 0 && out.supformula_error > 1e-6) {
    throw InternalCheck("f_N violates the square sup-formula");
  }
  if (samples > 0 && out.cyclic_identity_error > 1e-7 * vscale) {
    throw InternalCheck("cyclic-vector identity failed");
  }
  return out;
}

bool is_representable_total(const StarAlgebra& a, const Vector& functional,
                            double* c_min, double rtol) {
  if (functional.size() != a.dim) {
    throw DimensionMismatch("functional vector has wrong length");
  }
  Matrix g = total_gram(a, functional);
  const double scale = std::max(1.0, max_abs(g));
  if (hermitian_deviation(g) > kTol * scale) return false;
  g = 0.5 * (g + g.adjoint());
  if (min_eigenvalue(g) < -kTol * scale) return false;
  Matrix kernel;
  Matrix pinv = psd_pseudo_inverse(g, rtol, nullptr, &kernel);
  const double vscale = std::max(1.0, max_abs(functional));
  for (int j = 0; j < kernel.cols(); ++j) {
    const Cplx fa = (functional.array() * kernel.col(j).array()).sum();
    if (std::abs(fa) > 1e-8 * vscale) return false;
  }
  if (c_min) {
    Vector w = functional.conjugate();
    *c_min = std::real(w.dot(pinv * w));
  }
  return true;
}

bool verify_functional_minimality(const IdealFunctional& f, const Vector& fN,
                                  const Vector& candidate, int samples,
                                  std::uint64_t seed, double tol) {
  if (candidate.size() != f.algebra.dim) {
    throw BadCandidate("candidate has wrong length");
  }
  const double vscale = std::max(1.0, max_abs(f.values));
  if (f.ideal_basis.cols() > 0) {
    const double ext =
        max_abs(f.ideal_basis.transpose() * candidate - f.values);
    if (ext > 1e-8 * vscale) {
      throw BadCandidate("candidate does not extend f on the ideal");
    }
  }
  if (!is_representable_total(f.algebra, candidate)) {
    throw BadCandidate("candidate is not representable on the algebra");
  }
  std::mt19937_64 rng = seeded_rng(seed);
  for (int t = 0; t < samples; ++t) {
    Vector x = random_vector(rng, f.algebra.dim);
    Vector xx = f.algebra.multiply(f.algebra.involute(x), x);
    const double lhs = std::real(functional_at(fN, xx));
    const double rhs = std::real(functional_at(candidate, xx));
    if (lhs > rhs + tol * std::max(1.0, std::abs(rhs))) return false;
  }
  return true;
}

Vector unital_minimal_extension(const IdealFunctional& f, const Vector& e) {
  if (e.size() != f.algebra.dim) {
    throw DimensionMismatch("left unit has wrong length");
  }
  const int k = static_cast<int>(f.ideal_basis.cols());
  for (int j = 0; j < k; ++j) {
    Vector ea = f.algebra.multiply(e, f.ideal_basis.col(j));
    if (max_abs(ea - f.ideal_basis.col(j)) >
        1e-9 * std::max(1.0, f.ideal_basis.col(j).norm())) {
      throw NotLeftUnit("e a != a on an ideal basis element");
    }
  }
  representability_check(f);           // criterion (ii)
  schwarz_functional_bound(f);         // criterion (iii); both must pass together
  Matrix a_vals = value_matrix(f);
  Matrix g = functional_gram(f);
  GramQuotient quo = quotient_of(g, kRankRtol);
  Matrix a_n = a_vals * quo.pinv * a_vals.adjoint();
  Vector fn_unital = (a_n * e).conjugate();
  Vector fn_general = minimal_extension(f).fN;
  if (max_abs(fn_unital - fn_general) >
      kTol * std::max(1.0, max_abs(fn_general))) {
    throw InternalCheck("conj(A_N e) disagrees with the general construction");
  }
  return fn_unital;
}

ApproxUnitReport approximate_unit_limit(const IdealFunctional& f,
                                        const std::vector<Vector>& units,
                                        double norm_bound) {
  for (const Vector& e : units) {
    if (f.algebra.norm(e) > norm_bound + 1e-9) {
      throw UnboundedNet("unit norm exceeds the declared bound");
    }
  }
  GnsData data = gns(f);
  Matrix a_vals = value_matrix(f);
  GramQuotient quo = quotient_of(functional_gram(f), kRankRtol);
  Matrix a_n = a_vals * quo.pinv * a_vals.adjoint();
  Vector target = data.fN.conjugate();  // antidual coordinates J zeta_A

  ApproxUnitReport rep;
  for (const Vector& e : units) {
    Vector img = a_n * e;
    rep.extensions.push_back(img.conjugate());
    rep.deviations.push_back(f.algebra.dual_norm(img - target));
  }
  for (std::size_t i = 1; i < rep.deviations.size(); ++i) {
    if (rep.deviations[i] > rep.deviations[i - 1] + 1e-12) rep.monotone = false;
  }
  rep.final_deviation = rep.deviations.empty() ? 0.0 : rep.deviations.back();
  return rep;
}

UnitizationResult unitization_extension(const StarAlgebra& a,
                                        const Vector& f_total, int samples,
                                        std::uint64_t seed) {
  const int d = a.dim;
  IdealFunctional total{a, Matrix::Identity(d, d), f_total};
  representability_check(total);  // throws with a witness if (E:cyclic) fails

  UnitizationResult out;
  out.unitization = StarAlgebra::unitize(a);
  Matrix embed = Matrix::Zero(d + 1, d);
  embed.block(1, 0, d, d) = Matrix::Identity(d, d);
  IdealFunctional lifted{out.unitization, embed, f_total};
  out.fN = minimal_extension(lifted, samples, seed).fN;

  // displayed formula: f_N((l,b)^*(l,b)) = sup{|f(conj(l) a + b^* a)|^2 : f(a^*a) <= 1}
  Matrix g = total_gram(a, f_total);
  IdealOps ops(total);
  std::mt19937_64 rng = seeded_rng(seed);
  for (int t = 0; t < samples; ++t) {
    const Cplx lambda = random_cplx(rng);
    Vector b = random_vector(rng, d);
    Vector bstar = a.involute(b);
    Vector tvec(d);
    for (int j = 0; j < d; ++j) {
      tvec[j] = std::conj(lambda) * f_total[j] +
                functional_at(f_total, a.multiply(bstar, basis_vec(d, j)));
    }
    const double sup = psd_ratio_sup(g, tvec.conjugate(), 500, seed + t);
    Vector xt(d + 1);
    xt[0] = lambda;
    xt.tail(d) = b;
    Vector sq = out.unitization.multiply(out.unitization.involute(xt), xt);
    const Cplx lhs = functional_at(out.fN, sq);
    out.supformula_error = std::max(
        out.supformula_error, std::abs(lhs - sup) / std::max(1.0, std::abs(lhs)));
  }
  if (samples > 0 && out.supformula_error > 1e-6) {
    throw InternalCheck("unitization sup-formula failed");
  }
  return out;
}

namespace {

// The coordinates of each block either all lie in the ideal span or are all
// orthogonal to it; returns the inside blocks.
std::vector<int> ideal_blocks(const IdealFunctional& f) {
  if (!f.algebra.cstar_instance()) {
    throw NotCStarInstance("algebra is not a C*-instance");
  }
  const BlockStructure& bs = *f.algebra.blocks;
  std::optional<Eigen::CompleteOrthogonalDecomposition<Matrix>> cod;
  if (f.ideal_basis.cols() > 0) cod.emplace(f.ideal_basis);
  auto inside = [&](int coord) {
    Vector e = basis_vec(f.algebra.dim, coord);
    if (f.ideal_basis.cols() == 0) return false;
    Vector gamma = cod->solve(e);
    const double res = (f.ideal_basis * gamma - e).norm();
    if (res <= 1e-8) return true;
    if ((f.ideal_basis.adjoint() * e).norm() <= 1e-8) return false;
    throw NotCStarInstance("ideal is not a block ideal");
  };
  std::vector<int> blocks_in;
  for (std::size_t b = 0; b < bs.sizes.size(); ++b) {
    const int s = bs.sizes[b];
    const int off = bs.offset(static_cast<int>(b));
    int count = 0;
    for (int c = 0; c < s * s; ++c) {
      if (inside(off + c)) ++count;
    }
    if (count == s * s) {
      blocks_in.push_back(static_cast<int>(b));
    } else if (count != 0) {
      throw NotCStarInstance("ideal cuts through a block");
    }
  }
  return blocks_in;
}

// sup{ x^* H x : ||x||_A <= 1 } for Hermitian PSD H over a C*-instance norm,
// as a certified interval.
Interval opball_quadratic_sup(const StarAlgebra& a, const Matrix& h,
                              const std::vector<Vector>& starts) {
  auto value = [&](Vector x) {
    const double nrm = a.norm(x);
    if (nrm <= 0.0) return 0.0;
    x /= nrm;
    return std::real(x.dot(h * x));
  };
  double lo = 0.0;
  auto ascend = [&](Vector x) {
    const double nrm = a.norm(x);
    if (nrm <= 0.0) return;
    x /= nrm;
    double val = std::real(x.dot(h * x));
    for (int it = 0; it < 50; ++it) {
      Vector phi = h * x;
      if (max_abs(phi) == 0.0) break;
      x = a.dual_maximizer(phi);  // power step against the unit ball
      const double next = std::real(x.dot(h * x));
      if (next <= val + 1e-13 * std::max(1.0, val)) break;
      val = next;
    }
    lo = std::max(lo, val);
  };
  for (const Vector& s : starts) {
    lo = std::max(lo, value(s));
    ascend(s);
  }
  std::mt19937_64 rng = seeded_rng(0x0b5e55ULL);
  for (int t = 0; t < 12; ++t) ascend(random_vector(rng, a.dim));
  // x^* H x = sum mu_l |<w_l, x>|^2 <= sum mu_l dual_norm(w_l)^2
  HermitianEig eig = hermitian_eig(0.5 * (h + h.adjoint()));
  double hi = 0.0;
  for (int l = 0; l < eig.values.size(); ++l) {
    if (eig.values[l] <= 0.0) continue;
    const double dn = a.dual_norm(eig.vectors.col(l));
    hi += eig.values[l] * dn * dn;
  }
  return Interval::bounds(lo, std::max(lo, hi));
}

}  // namespace

CstarNormChain cstar_ideal_norm_check(const IdealFunctional& f) {
  std::vector<int> blocks_in = ideal_blocks(f);
  const BlockStructure& bs = *f.algebra.blocks;
  CstarNormChain out;

  Vector block_identity = Vector::Zero(f.algebra.dim);
  for (int b : blocks_in) {
    const int s = bs.sizes[b];
    const int off = bs.offset(b);
    for (int p = 0; p < s; ++p) block_identity[off + p * s + p] = 1.0;
  }
  out.f_norm = f.ideal_basis.cols() == 0
                   ? 0.0
                   : std::real(functional_value(f, block_identity));
  out.zeta_sq = representability_check(f);

  Matrix a_vals = value_matrix(f);
  GramQuotient quo = quotient_of(functional_gram(f), kRankRtol);
  Matrix a_n = a_vals * quo.pinv * a_vals.adjoint();
  std::vector<Vector> starts{block_identity};
  if (f.algebra.unit) starts.push_back(*f.algebra.unit);
  out.A_N_norm = opball_quadratic_sup(f.algebra, a_n, starts);

  GnsData data = gns(f);
  out.fN_norm = f.algebra.unit
                    ? std::real(functional_at(data.fN, *f.algebra.unit))
                    : 0.0;

  const double ref = out.f_norm;
  const double slack = 1e-6 * std::max(1.0, ref);
  out.chain_ok = std::abs(out.zeta_sq - ref) <= slack &&
                 std::abs(out.fN_norm - ref) <= slack &&
                 out.A_N_norm.lo >= ref - slack &&
                 out.A_N_norm.contains(ref, slack);
  return out;
}

CompletenessBound completeness_bound(const StarAlgebra& a,
                                     const Vector& f_total) {
  IdealFunctional total{a, Matrix::Identity(a.dim, a.dim), f_total};
  representability_check(total);
  CompletenessBound out;
  if (max_abs(f_total) == 0.0) {
    out.empty_supremum = true;
    out.L = Interval::point(0.0);
    return out;
  }
  Matrix a_vals = value_matrix(total);
  Matrix g = functional_gram(total);
  if (a.norm_desc.kind == AlgebraNorm::Kind::L1Weighted) {
    ClosedRangeConstants crc = closed_range_constants(induced_operator(total));
    out.L = crc.Mprime;
    out.empty_supremum = crc.empty_supremum;
    return out;
  }
  if (!a.cstar_instance()) {
    throw Error("completeness_bound needs a weighted-l1 or C*-instance norm");
  }
  auto ratio = [&](const Vector& gamma) {
    const double dn = a.dual_norm(a_vals * gamma);
    if (dn <= 1e-12 * std::max(1.0, max_abs(a_vals))) return 0.0;
    return std::real(gamma.dot(g * gamma)) / (dn * dn);
  };
  double lo = 0.0;
  for (int j = 0; j < a.dim; ++j) lo = std::max(lo, ratio(Vector::Unit(a.dim, j)));
  lo = std::max(lo, ratio(f_total.conjugate()));
  std::mt19937_64 rng = seeded_rng(0x1f2e3dULL);
  for (int t = 0; t < 200; ++t) lo = std::max(lo, ratio(random_vector(rng, a.dim)));
  RealVector pencil = pencil_eigenvalues_on_range(a_vals.adjoint() * a_vals, g);
  double hi = lo;
  if (pencil.size() && pencil.minCoeff() > 0.0) {
    // nuclear >= frobenius, so the l2 pencil bounds the supremum from above
    hi = std::max(lo, 1.0 / pencil.minCoeff());
  }
  out.L = Interval::bounds(lo, hi);
  return out;
}

IdealFunctional discrete_measure_functional(const RealVector& mu,
                                            const std::vector<int>& K) {
  const int n = static_cast<int>(mu.size());
  if ((mu.array() < 0.0).any()) throw Error("measure weights must be nonnegative");
  IdealFunctional f;
  f.algebra = StarAlgebra::functions_on_points(n);
  f.ideal_basis = Matrix::Zero(n, static_cast<int>(K.size()));
  f.values = Vector(static_cast<int>(K.size()));
  for (std::size_t j = 0; j < K.size(); ++j) {
    if (K[j] < 0 || K[j] >= n) throw Error("K contains an out-of-range index");
    if (j > 0 && K[j] <= K[j - 1]) throw Error("K must be strictly increasing");
    f.ideal_basis(K[j], static_cast<int>(j)) = 1.0;
    f.values[static_cast<int>(j)] = mu[K[j]];
  }
  return f;
}

ScenarioReport discrete_measure_scenario(const RealVector& mu,
                                         const std::vector<int>& K,
                                         const RealVector& eK) {
  const int n = static_cast<int>(mu.size());
  if (eK.size() != n) throw DimensionMismatch("e_K has wrong length");
  if ((eK.array() < -1e-12).any() || (eK.array() > 1.0 + 1e-12).any()) {
    throw BadIndicator("e_K must take values in [0, 1]");
  }
  for (int j : K) {
    if (j < 0 || j >= n) throw Error("K contains an out-of-range index");
    if (std::abs(eK[j] - 1.0) > 1e-12) {
      throw BadIndicator("e_K must be identically 1 on K");
    }
  }
  IdealFunctional f = discrete_measure_functional(mu, K);
  ScenarioReport rep;
  const int k = static_cast<int>(K.size());

  // ||A g|| = mu(|g|) for g supported in K
  Matrix a_vals = value_matrix(f);
  std::mt19937_64 rng = seeded_rng(0xd15c0ULL);
  for (int t = 0; t < 32 && k > 0; ++t) {
    Vector gamma = random_vector(rng, k);
    double mu_abs = 0.0;
    for (int j = 0; j < k; ++j) mu_abs += mu[K[j]] * std::abs(gamma[j]);
    rep.avals_check = std::max(
        rep.avals_check, std::abs(f.algebra.dual_norm(a_vals * gamma) - mu_abs));
  }

  for (int j : K) rep.mu_K_norm += mu[j];
  // sup{ mu(|g|) : supp g in K, |g| <= 1 } is attained at the indicator of K
  rep.sup_side = rep.mu_K_norm;

  CstarNormChain chain = cstar_ideal_norm_check(f);
  rep.A_N_norm = chain.A_N_norm;
  rep.muKN_norm = chain.fN_norm;
  rep.A_norm = rep.mu_K_norm;  // dual_norm(Ag) = sum_K mu_i |g_i| <= mu(K)
  const double slack = 1e-6 * std::max(1.0, rep.mu_K_norm);
  rep.chain_ok = chain.chain_ok && std::abs(chain.f_norm - rep.mu_K_norm) <= slack;

  rep.fN = gns(f).fN;
  rep.eK_mu = Vector(n);
  for (int i = 0; i < n; ++i) rep.eK_mu[i] = mu[i] * eK[i];
  rep.eK_mu_extends = true;
  if (k > 0) {
    rep.eK_mu_extends =
        max_abs(f.ideal_basis.transpose() * rep.eK_mu - f.values) <=
        1e-9 * std::max(1.0, max_abs(f.values));
  }
  for (int i = 0; i < n; ++i) rep.eK_mu_norm += mu[i] * eK[i];
  rep.strict = rep.sup_side < rep.eK_mu_norm - 1e-12 * std::max(1.0, rep.eK_mu_norm);
  return rep;
}

}  // namespace kvn
