#include "kvn/extension.hpp"

#include <Eigen/QR>
#include <limits>

namespace kvn {

namespace {

// Row scaling that turns dual_norm(Bc) into a plain l1/l2/linf norm of Bs*c.
Matrix dual_scaled_values(const PartialPositiveOperator& op) {
  const RealVector& w = op.space.weights;
  switch (op.space.tag) {
    case NormTag::L1:   // dual norm = max_i |phi_i| / w_i
    case NormTag::LInf: // dual norm = sum_i |phi_i| / w_i
      return w.cwiseInverse().asDiagonal() * op.values;
    case NormTag::L2:   // dual norm = sqrt(sum_i |phi_i|^2 / w_i)
      return w.cwiseSqrt().cwiseInverse().asDiagonal() * op.values;
  }
  throw Error("unreachable");
}

struct GramFactor {
  Matrix g;
  Matrix pinv;
  Matrix u_pos;        // k x r, orthonormal basis of ran G
  RealVector lam_pos;  // r positive eigenvalues
  int rank{0};
};

GramFactor factor_gram(const Matrix& g, double rtol) {
  GramFactor f;
  f.g = 0.5 * (g + g.adjoint());
  const int k = static_cast<int>(g.rows());
  if (k == 0) {
    f.pinv = Matrix(0, 0);
    f.u_pos = Matrix(0, 0);
    f.lam_pos = RealVector(0);
    return f;
  }
  HermitianEig eig = hermitian_eig(f.g);
  const double lmax = eig.values.size() ? max_abs(eig.values) : 0.0;
  const double cut = rtol * std::max(lmax, 1e-300);
  std::vector<int> pos;
  for (int i = 0; i < k; ++i) {
    if (eig.values[i] > cut) pos.push_back(i);
  }
  f.rank = static_cast<int>(pos.size());
  f.u_pos.resize(k, f.rank);
  f.lam_pos.resize(f.rank);
  for (int j = 0; j < f.rank; ++j) {
    f.u_pos.col(j) = eig.vectors.col(pos[j]);
    f.lam_pos[j] = eig.values[pos[j]];
  }
  f.pinv = f.u_pos * f.lam_pos.cwiseInverse().asDiagonal() * f.u_pos.adjoint();
  return f;
}

// Eigenvalues of the pencil (S, G) restricted to ran G, i.e. of
// Lam^{-1/2} U^* S U Lam^{-1/2}. S must be Hermitian PSD.
RealVector pencil_eigenvalues(const Matrix& s, const GramFactor& f) {
  if (f.rank == 0) return RealVector(0);
  Matrix scale = f.lam_pos.cwiseSqrt().cwiseInverse().asDiagonal();
  Matrix c = scale * f.u_pos.adjoint() * s * f.u_pos * scale;
  return hermitian_eig(0.5 * (c + c.adjoint())).values;
}

Matrix orthocomplement_projector(const Matrix& d) {
  const int n = static_cast<int>(d.rows());
  if (d.cols() == 0) return Matrix::Identity(n, n);
  Eigen::HouseholderQR<Matrix> qr(d);
  Matrix q = qr.householderQ() * Matrix::Identity(n, d.cols());
  return Matrix::Identity(n, n) - q * q.adjoint();
}

}  // namespace

void validate_operator(const PartialPositiveOperator& op, double rtol) {
  const int n = op.dim();
  if (op.domain_basis.rows() != n || op.values.rows() != n) {
    throw DimensionMismatch("domain basis / value rows must equal the space dimension");
  }
  if (op.domain_basis.cols() != op.values.cols()) {
    throw DimensionMismatch("domain basis and values need the same number of columns");
  }
  const int k = op.domain_dim();
  if (k > n) throw DimensionMismatch("domain dimension exceeds space dimension");
  if (k > 0 && numerical_rank(op.domain_basis, rtol) != k) {
    throw Error("domain basis columns are linearly dependent");
  }
}

Matrix gram(const PartialPositiveOperator& op, double tol) {
  validate_operator(op);
  Matrix g = op.domain_basis.adjoint() * op.values;
  if (g.size() == 0) return g;
  const double scale = std::max(1.0, max_abs(g));
  if (hermitian_deviation(g) > tol * scale) {
    throw NotSymmetric("Gram matrix D^*B deviates from Hermitian by " +
                       std::to_string(hermitian_deviation(g)));
  }
  g = 0.5 * (g + g.adjoint());
  const double lmin = min_eigenvalue(g);
  if (lmin < -tol * scale) {
    throw NotPositive("Gram matrix has eigenvalue " + std::to_string(lmin));
  }
  return g;
}

WellDefinedCheck check_well_defined(const PartialPositiveOperator& op,
                                    double rtol) {
  WellDefinedCheck out;
  Matrix g = gram(op);
  if (g.size() == 0) return out;
  Matrix kernel;
  psd_pseudo_inverse(g, rtol, nullptr, &kernel);
  if (kernel.cols() == 0) return out;
  const double bscale = std::max(1.0, op.values.norm());
  for (int j = 0; j < kernel.cols(); ++j) {
    if ((op.values * kernel.col(j)).norm() > 1e-8 * bscale) {
      out.ok = false;
      out.witness = kernel.col(j);
      return out;
    }
  }
  return out;
}

namespace {

Interval schwarz_bound_impl(const PartialPositiveOperator& op,
                            const GramFactor& f) {
  const int k = op.domain_dim();
  if (k == 0 || f.rank == 0 || max_abs(op.values) == 0.0) {
    return Interval::point(0.0);
  }
  Matrix bs = dual_scaled_values(op);
  switch (op.space.tag) {
    case NormTag::L2: {
      RealVector eigs = pencil_eigenvalues(bs.adjoint() * bs, f);
      return Interval::point(eigs.size() ? std::max(0.0, eigs.maxCoeff()) : 0.0);
    }
    case NormTag::L1: {
      // max over rows r of B~ of r G^+ r^*
      double best = 0.0;
      for (int i = 0; i < op.dim(); ++i) {
        Vector row = bs.row(i).adjoint();  // conj of row as column
        best = std::max(best, std::real(row.dot(f.pinv * row)));
      }
      return Interval::point(best);
    }
    case NormTag::LInf: {
      // sup_c ||B~c||_1^2 / c^*Gc ; alternating (sigma, c) ascent for the
      // lower bound, torus relaxation of H = B~ G^+ B~^* for the upper.
      Matrix h = bs * f.pinv * bs.adjoint();
      h = 0.5 * (h + h.adjoint());
      auto ratio = [&](const Vector& c) {
        const double den = std::real(c.dot(f.g * c));
        if (den <= 1e-14 * std::max(1.0, max_abs(f.g))) return 0.0;
        const double num = (bs * c).cwiseAbs().sum();
        return num * num / den;
      };
      auto ascend = [&](Vector c) {
        double val = ratio(c);
        for (int it = 0; it < 100; ++it) {
          Vector u = bs * c;
          if (max_abs(u) == 0.0) break;
          Vector sigma(u.size());
          for (int i = 0; i < u.size(); ++i) {
            const double m = std::abs(u[i]);
            sigma[i] = m > 0 ? u[i] / m : Cplx(1, 0);
          }
          c = f.pinv * (bs.adjoint() * sigma);
          const double next = ratio(c);
          if (next <= val + 1e-13 * std::max(1.0, val)) break;
          val = next;
        }
        return val;
      };
      double lo = 0.0;
      for (int j = 0; j < k; ++j) lo = std::max(lo, ascend(Vector::Unit(k, j)));
      std::mt19937_64 rng = seeded_rng(0x5c487aULL);
      for (int t = 0; t < 16; ++t) {
        lo = std::max(lo, ascend(random_vector(rng, k)));
      }
      const double mass = h.cwiseAbs().sum();
      const double lihi = op.dim() * std::max(0.0, hermitian_eig(h).values.maxCoeff());
      const double hi = std::max(lo, std::min(mass, lihi));
      return Interval::bounds(lo, hi);
    }
  }
  throw Error("unreachable");
}

}  // namespace

Interval schwarz_bound(const PartialPositiveOperator& op, double rtol) {
  WellDefinedCheck wd = check_well_defined(op, rtol);
  if (!wd.ok) {
    throw NotExtendable(
        "operator maps a Gram-null direction to a nonzero functional; "
        "the Schwarz supremum is unbounded",
        wd.witness);
  }
  GramFactor f = factor_gram(gram(op), rtol);
  return schwarz_bound_impl(op, f);
}

namespace {

Interval mprime_impl(const PartialPositiveOperator& op, const GramFactor& f,
                     bool* empty) {
  *empty = false;
  if (op.domain_dim() == 0 || f.rank == 0 ||
      max_abs(op.values) == 0.0) {
    *empty = true;
    return Interval::point(0.0);
  }
  Matrix bs = dual_scaled_values(op);
  RealVector eigs = pencil_eigenvalues(bs.adjoint() * bs, f);
  const double lmin = eigs.size() ? std::max(eigs.minCoeff(), 1e-300) : 1e-300;
  if (op.space.tag == NormTag::L2) {
    return Interval::point(1.0 / lmin);
  }
  // l1: dual norm is a scaled max-abs, bounded below by the scaled l2 norm
  // over sqrt(#active rows); linf: dual norm is a scaled l1 sum, bounded
  // below by the scaled l2 norm. Both give certified upper bounds.
  int active_rows = 0;
  const double row_scale = max_abs(bs);
  for (int i = 0; i < bs.rows(); ++i) {
    if (max_abs(bs.row(i)) > 1e-13 * std::max(1.0, row_scale)) {
      ++active_rows;
    }
  }
  const double upper = (op.space.tag == NormTag::L1)
                           ? active_rows / lmin
                           : 1.0 / lmin;
  auto ratio = [&](const Vector& c) {
    if (max_abs(c) == 0.0) return 0.0;
    Vector u = bs * c;
    const double dn = (op.space.tag == NormTag::L1) ? max_abs(u)
                                                    : u.cwiseAbs().sum();
    if (dn <= 1e-12 * std::max(1.0, row_scale)) return 0.0;
    return std::real(c.dot(f.g * c)) / (dn * dn);
  };
  const int k = op.domain_dim();
  double lo = 0.0;
  for (int j = 0; j < k; ++j) lo = std::max(lo, ratio(Vector::Unit(k, j)));
  for (int m = 2; m <= k; ++m) {  // equal-mass patterns catch spread-out optima
    Vector c = Vector::Zero(k);
    c.head(m).setConstant(Cplx(1.0, 0.0));
    lo = std::max(lo, ratio(c));
  }
  // the max-norm optimum equalizes the active rows: iterate c = B~^+ sigma
  if (op.space.tag == NormTag::L1) {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(bs);
    Vector c = cod.solve(Vector::Ones(bs.rows()));
    lo = std::max(lo, ratio(c));
    for (int it = 0; it < 10; ++it) {
      Vector u = bs * c;
      Vector sigma(u.size());
      for (int i = 0; i < u.size(); ++i) {
        const double m = std::abs(u[i]);
        sigma[i] = m > 1e-13 ? u[i] / m : Cplx(1, 0);
      }
      c = cod.solve(sigma);
      lo = std::max(lo, ratio(c));
    }
  }
  std::mt19937_64 rng = seeded_rng(0x3a91bcULL);
  for (int t = 0; t < 200; ++t) lo = std::max(lo, ratio(random_vector(rng, k)));
  return Interval::bounds(lo, std::max(lo, upper));
}

}  // namespace

ExtensionResult krein_von_neumann(const PartialPositiveOperator& op,
                                  double rtol) {
  WellDefinedCheck wd = check_well_defined(op, rtol);
  if (!wd.ok) {
    throw NotExtendable("no bounded positive extension exists", wd.witness);
  }
  ExtensionResult res;
  res.rtol = rtol;
  res.G = gram(op);
  GramFactor f = factor_gram(res.G, rtol);
  res.rank_G = f.rank;
  res.pinv_G = f.pinv;
  res.T_coeff = f.pinv * op.values.adjoint();
  Matrix a_n = op.values * res.T_coeff;
  res.A_N = 0.5 * (a_n + a_n.adjoint());
  res.M_min = schwarz_bound_impl(op, f);
  res.Mprime_min = mprime_impl(op, f, &res.mprime_empty);

  const double scale = std::max(1.0, max_abs(op.values));
  if (op.domain_dim() > 0 &&
      max_abs((res.A_N * op.domain_basis - op.values)) >
          1e-8 * scale) {
    throw InternalCheck("extension property A_N D = B failed");
  }
  return res;
}

double quadratic_form_oracle(const PartialPositiveOperator& op, const Vector& x,
                             int grid_density, std::uint64_t seed) {
  op.space.check_dim(x);
  if (op.domain_dim() == 0) return 0.0;
  Matrix g = gram(op);
  Vector v = op.values.adjoint() * x;  // |<Ay|x>|^2 = |v^* c|^2 for y = Dc
  return psd_ratio_sup(g, v, grid_density, seed);
}

bool verify_minimality(const PartialPositiveOperator& op,
                       const ExtensionResult& result, const Matrix& candidate,
                       double tol) {
  if (candidate.rows() != op.dim() || candidate.cols() != op.dim()) {
    throw BadCandidate("candidate has wrong shape");
  }
  const double scale = std::max(1.0, max_abs(candidate));
  if (hermitian_deviation(candidate) > tol * scale) {
    throw BadCandidate("candidate is not Hermitian");
  }
  if (min_eigenvalue(candidate) < -tol * scale) {
    throw BadCandidate("candidate is not positive semidefinite");
  }
  if (op.domain_dim() > 0) {
    const double ext_err =
        max_abs((candidate * op.domain_basis - op.values));
    if (ext_err > tol * std::max(scale, max_abs(op.values))) {
      throw BadCandidate("candidate does not extend the operator");
    }
  }
  return min_eigenvalue(candidate - result.A_N) >= -tol * scale;
}

Matrix random_extension(const PartialPositiveOperator& op,
                        const ExtensionResult& result, std::uint64_t seed) {
  const int n = op.dim();
  Matrix proj = orthocomplement_projector(op.domain_basis);
  std::mt19937_64 rng = seeded_rng(seed);
  Matrix s = random_psd(rng, n, n);
  Matrix ext = result.A_N + proj * s * proj;
  return 0.5 * (ext + ext.adjoint());
}

NormReport extension_norm(const PartialPositiveOperator& op,
                          const ExtensionResult& result) {
  NormReport rep;
  rep.norm = operator_norm(result.A_N, op.space).value;
  rep.matches_schwarz = rep.norm.overlaps(result.M_min, 1e-6);

  // ||T||^2 = sup{ x^* A_N x : norm(x) <= 1 }; the sup of a convex function
  // over the ball sits on extreme points.
  const RealVector& w = op.space.weights;
  switch (op.space.tag) {
    case NormTag::L1: {
      double best = 0.0;
      for (int i = 0; i < op.dim(); ++i) {
        best = std::max(best, std::real(result.A_N(i, i)) / (w[i] * w[i]));
      }
      rep.t_norm_sq = Interval::point(best);
      break;
    }
    case NormTag::L2: {
      RealVector rsq = w.cwiseSqrt().cwiseInverse();
      Matrix scaled = rsq.asDiagonal() * result.A_N * rsq.asDiagonal();
      rep.t_norm_sq = Interval::point(
          std::max(0.0, hermitian_eig(0.5 * (scaled + scaled.adjoint())).values
                            .maxCoeff()));
      break;
    }
    case NormTag::LInf: {
      RealVector recip = w.cwiseInverse();
      Matrix scaled = recip.asDiagonal() * result.A_N * recip.asDiagonal();
      rep.t_norm_sq = torus_bilinear_max(0.5 * (scaled + scaled.adjoint()), true);
      break;
    }
  }
  rep.cstar_identity = rep.norm.overlaps(rep.t_norm_sq, 1e-6);
  if (!rep.matches_schwarz) {
    throw InternalCheck("norm formula ||A_N|| = M_min failed");
  }
  if (!rep.cstar_identity) {
    throw InternalCheck("C*-identity ||A_N|| = ||T||^2 failed");
  }
  return rep;
}

ClosedRangeConstants closed_range_constants(const PartialPositiveOperator& op,
                                            double rtol) {
  ClosedRangeConstants out;
  GramFactor f = factor_gram(gram(op), rtol);
  WellDefinedCheck wd = check_well_defined(op, rtol);
  if (!wd.ok) {
    throw NotExtendable("closed-range constants need a well-defined operator",
                        wd.witness);
  }
  out.M = schwarz_bound_impl(op, f);
  out.Mprime = mprime_impl(op, f, &out.empty_supremum);
  return out;
}

RangeChainReport range_chain_check(const PartialPositiveOperator& op,
                                   const ExtensionResult& result) {
  RangeChainReport rep;
  const double rtol = result.rtol;
  GramFactor f = factor_gram(result.G, rtol);
  // T^* sends [c] to Bc; J is its restriction-closure with the same image.
  Matrix t_star = op.values * (f.pinv * f.g);  // B restricted to ran G
  Matrix j_mat = op.values * f.u_pos;
  rep.rank_A_N = numerical_rank(result.A_N, rtol);
  rep.rank_T_star = numerical_rank(t_star, rtol);
  rep.rank_J = numerical_rank(j_mat, rtol);
  Matrix an_star = result.A_N.adjoint();
  auto included = [&](const Matrix& a, const Matrix& b) {
    Matrix joined(a.rows(), a.cols() + b.cols());
    joined << a, b;
    return numerical_rank(joined, rtol) == numerical_rank(b, rtol);
  };
  rep.ran_AN_in_ran_ANstar = included(result.A_N, an_star);
  rep.ran_ANstar_in_ran_Tstar = included(an_star, t_star);
  rep.ranks_equal =
      rep.rank_A_N == rep.rank_T_star && rep.rank_T_star == rep.rank_J;
  rep.column_spaces_equal = same_column_space(result.A_N, t_star, rtol);
  return rep;
}

CompactnessReport compactness_check(const PartialPositiveOperator& op,
                                    double rtol) {
  CompactnessReport rep;
  WellDefinedCheck wd = check_well_defined(op, rtol);
  if (!wd.ok) {
    // {Ax : <Ax|x> <= 1} contains t * B w for every t: unbounded.
    rep.compact = false;
    rep.witness = op.values * wd.witness;
    rep.radius = Interval::bounds(0.0, std::numeric_limits<double>::infinity());
    return rep;
  }
  GramFactor f = factor_gram(gram(op), rtol);
  Interval m = schwarz_bound_impl(op, f);
  rep.radius = Interval::bounds(std::sqrt(std::max(0.0, m.lo)),
                                std::sqrt(std::max(0.0, m.hi)));
  return rep;
}

}  // namespace kvn
