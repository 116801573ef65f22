#include "kvn/algebra.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <array>
#include <algorithm>

namespace kvn {

int BlockStructure::offset(int b) const {
  int off = 0;
  for (int i = 0; i < b; ++i) off += sizes[i] * sizes[i];
  return off;
}

int BlockStructure::total_dim() const {
  int r = 0;
  for (int s : sizes) r += s;
  return r;
}

Vector StarAlgebra::multiply(const Vector& x, const Vector& y) const {
  if (x.size() != dim || y.size() != dim) {
    throw DimensionMismatch("algebra elements have wrong length");
  }
  return left_mult_matrix(x) * y;
}

Vector StarAlgebra::involute(const Vector& x) const {
  if (x.size() != dim) throw DimensionMismatch("algebra element has wrong length");
  return invol.transpose() * x.conjugate();
}

Matrix StarAlgebra::left_mult_matrix(const Vector& x) const {
  if (x.size() != dim) throw DimensionMismatch("algebra element has wrong length");
  Matrix l = Matrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    if (x[i] != Cplx(0, 0)) l += x[i] * lmul[i];
  }
  return l;
}

double StarAlgebra::norm(const Vector& x) const {
  if (x.size() != dim) throw DimensionMismatch("algebra element has wrong length");
  if (norm_desc.kind == AlgebraNorm::Kind::L1Weighted) {
    return (norm_desc.weights.array() * x.cwiseAbs().array()).sum();
  }
  const int r = static_cast<int>(norm_desc.rep.front().rows());
  Matrix m = Matrix::Zero(r, r);
  for (int i = 0; i < dim; ++i) {
    if (x[i] != Cplx(0, 0)) m += x[i] * norm_desc.rep[i];
  }
  if (max_abs(m) == 0.0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()[0];
}

Matrix StarAlgebra::block_matrix(const Vector& coords) const {
  if (!blocks) throw Error("block matrix realization needs a C*-instance");
  const BlockStructure& bs = *blocks;
  const int r = bs.total_dim();
  Matrix m = Matrix::Zero(r, r);
  int row0 = 0;
  for (std::size_t b = 0; b < bs.sizes.size(); ++b) {
    const int s = bs.sizes[b];
    const int off = bs.offset(static_cast<int>(b));
    for (int p = 0; p < s; ++p) {
      for (int q = 0; q < s; ++q) {
        m(row0 + p, row0 + q) = coords[off + p * s + q];
      }
    }
    row0 += s;
  }
  return m;
}

double StarAlgebra::dual_norm(const Vector& phi) const {
  if (phi.size() != dim) throw DimensionMismatch("functional vector has wrong length");
  if (norm_desc.kind == AlgebraNorm::Kind::L1Weighted) {
    return (phi.cwiseAbs().array() / norm_desc.weights.array()).maxCoeff();
  }
  if (!blocks) {
    throw Error("dual norm is only available for weighted-l1 and C*-instances");
  }
  const BlockStructure& bs = *blocks;
  double total = 0.0;
  for (std::size_t b = 0; b < bs.sizes.size(); ++b) {
    const int s = bs.sizes[b];
    const int off = bs.offset(static_cast<int>(b));
    Matrix blk(s, s);
    for (int p = 0; p < s; ++p) {
      for (int q = 0; q < s; ++q) blk(p, q) = phi[off + p * s + q];
    }
    if (max_abs(blk) == 0.0) continue;
    Eigen::JacobiSVD<Matrix> svd(blk);
    total += svd.singularValues().sum();  // nuclear norm of the block
  }
  return total;
}

Vector StarAlgebra::dual_maximizer(const Vector& phi) const {
  if (phi.size() != dim) throw DimensionMismatch("functional vector has wrong length");
  Vector x = Vector::Zero(dim);
  if (norm_desc.kind == AlgebraNorm::Kind::L1Weighted) {
    int best = 0;
    double best_val = -1.0;
    for (int i = 0; i < dim; ++i) {
      const double v = std::abs(phi[i]) / norm_desc.weights[i];
      if (v > best_val) {
        best_val = v;
        best = i;
      }
    }
    const double m = std::abs(phi[best]);
    x[best] = (m > 0 ? phi[best] / m : Cplx(1, 0)) / norm_desc.weights[best];
    return x;
  }
  if (!blocks) {
    throw Error("dual maximizer is only available for weighted-l1 and C*-instances");
  }
  const BlockStructure& bs = *blocks;
  for (std::size_t b = 0; b < bs.sizes.size(); ++b) {
    const int s = bs.sizes[b];
    const int off = bs.offset(static_cast<int>(b));
    Matrix blk(s, s);
    for (int p = 0; p < s; ++p) {
      for (int q = 0; q < s; ++q) blk(p, q) = phi[off + p * s + q];
    }
    // polar factor attains the nuclear norm against the operator-norm ball
    Eigen::JacobiSVD<Matrix> svd(blk, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix polar = svd.matrixU() * svd.matrixV().adjoint();
    for (int p = 0; p < s; ++p) {
      for (int q = 0; q < s; ++q) x[off + p * s + q] = polar(p, q);
    }
  }
  return x;
}

void StarAlgebra::validate(double tol, std::uint64_t seed) const {
  if (static_cast<int>(lmul.size()) != dim) throw Error("structure tensor has wrong size");
  for (const Matrix& l : lmul) {
    if (l.rows() != dim || l.cols() != dim) throw Error("structure tensor slice has wrong shape");
  }
  if (invol.rows() != dim || invol.cols() != dim) throw Error("involution matrix has wrong shape");

  auto basis = [&](int i) { return Vector(Vector::Unit(dim, i)); };

  // associativity through the left-regular representation
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      Matrix lhs = left_mult_matrix(multiply(basis(i), basis(j)));
      Matrix rhs = lmul[i] * lmul[j];
      if (max_abs((lhs - rhs)) > tol) {
        throw Error("structure constants are not associative");
      }
    }
  }
  // involution laws
  Matrix ss = invol.conjugate() * invol;
  if (max_abs((ss - Matrix::Identity(dim, dim))) > tol) {
    throw Error("involution is not an involution");
  }
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      Vector lhs = involute(multiply(basis(i), basis(j)));
      Vector rhs = multiply(involute(basis(j)), involute(basis(i)));
      if (max_abs((lhs - rhs)) > tol) {
        throw Error("involution is not an anti-homomorphism");
      }
    }
  }
  if (unit) {
    for (int i = 0; i < dim; ++i) {
      if (max_abs((multiply(*unit, basis(i)) - basis(i))) > tol ||
          max_abs((multiply(basis(i), *unit) - basis(i))) > tol) {
        throw Error("declared unit is not a unit");
      }
    }
  }
  // norm: structural submultiplicativity
  if (norm_desc.kind == AlgebraNorm::Kind::L1Weighted) {
    if (norm_desc.weights.size() != dim || (norm_desc.weights.array() <= 0).any()) {
      throw Error("l1 norm weights must be positive of length dim");
    }
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        double lhs = 0.0;
        for (int k = 0; k < dim; ++k) {
          lhs += std::abs(lmul[i](k, j)) * norm_desc.weights[k];
        }
        if (lhs > norm_desc.weights[i] * norm_desc.weights[j] * (1 + tol)) {
          throw Error("declared l1 weights are not submultiplicative");
        }
      }
    }
  } else {
    if (static_cast<int>(norm_desc.rep.size()) != dim || norm_desc.rep.empty()) {
      throw Error("operator-norm representation needs one matrix per basis element");
    }
    const int r = static_cast<int>(norm_desc.rep.front().rows());
    Matrix flat(r * r, dim);
    for (int i = 0; i < dim; ++i) {
      if (norm_desc.rep[i].rows() != r || norm_desc.rep[i].cols() != r) {
        throw Error("representation matrices must share one square shape");
      }
      flat.col(i) = Eigen::Map<const Vector>(norm_desc.rep[i].data(), r * r);
    }
    if (numerical_rank(flat) != dim) {
      throw Error("representation is not faithful");
    }
    for (int i = 0; i < dim; ++i) {
      Vector starred = involute(basis(i));
      Matrix rep_star = Matrix::Zero(r, r);
      for (int k = 0; k < dim; ++k) rep_star += starred[k] * norm_desc.rep[k];
      if (max_abs((rep_star - norm_desc.rep[i].adjoint())) > tol) {
        throw Error("representation does not intertwine the involution");
      }
      for (int j = 0; j < dim; ++j) {
        Vector prod = multiply(basis(i), basis(j));
        Matrix rep_prod = Matrix::Zero(r, r);
        for (int k = 0; k < dim; ++k) rep_prod += prod[k] * norm_desc.rep[k];
        if (max_abs((norm_desc.rep[i] * norm_desc.rep[j] - rep_prod)) > tol) {
          throw Error("representation is not multiplicative");
        }
      }
    }
  }
  // sampled submultiplicativity and basis-pair bound
  std::mt19937_64 rng = seeded_rng(seed);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      if (norm(multiply(basis(i), basis(j))) >
          norm(basis(i)) * norm(basis(j)) + 1e-9) {
        throw Error("norm is not submultiplicative on basis pairs");
      }
    }
  }
  for (int t = 0; t < 32; ++t) {
    Vector x = random_vector(rng, dim);
    Vector y = random_vector(rng, dim);
    if (norm(multiply(x, y)) > norm(x) * norm(y) + 1e-9 * norm(x) * norm(y)) {
      throw Error("norm is not submultiplicative");
    }
  }
  if (involution_isometric) {
    for (int i = 0; i < dim; ++i) {
      if (std::abs(norm(involute(basis(i))) - norm(basis(i))) > tol) {
        throw Error("involution is not isometric on the basis");
      }
    }
    for (int t = 0; t < 32; ++t) {
      Vector x = random_vector(rng, dim);
      if (std::abs(norm(involute(x)) - norm(x)) > 1e-9 * std::max(1.0, norm(x))) {
        throw Error("involution is not isometric");
      }
    }
  }
}

namespace {

StarAlgebra from_block_structure(std::vector<int> sizes) {
  for (int s : sizes) {
    if (s < 1) throw Error("block sizes must be >= 1");
  }
  StarAlgebra a;
  BlockStructure bs{std::move(sizes)};
  int d = 0;
  for (int s : bs.sizes) d += s * s;
  a.dim = d;
  const int r = bs.total_dim();

  // basis = matrix units E^b_{pq}, row-major inside each block
  std::vector<Matrix> rep(d, Matrix::Zero(r, r));
  int row0 = 0;
  for (std::size_t b = 0; b < bs.sizes.size(); ++b) {
    const int s = bs.sizes[b];
    const int off = bs.offset(static_cast<int>(b));
    for (int p = 0; p < s; ++p) {
      for (int q = 0; q < s; ++q) {
        rep[off + p * s + q](row0 + p, row0 + q) = 1.0;
      }
    }
    row0 += s;
  }
  // E_pq E_rs = delta_qr E_ps within a block
  a.lmul.assign(d, Matrix::Zero(d, d));
  a.invol = Matrix::Zero(d, d);
  for (std::size_t b = 0; b < bs.sizes.size(); ++b) {
    const int s = bs.sizes[b];
    const int off = bs.offset(static_cast<int>(b));
    auto idx = [&](int p, int q) { return off + p * s + q; };
    for (int p = 0; p < s; ++p) {
      for (int q = 0; q < s; ++q) {
        a.invol(idx(p, q), idx(q, p)) = 1.0;
        for (int t = 0; t < s; ++t) {
          // e_{idx(p,q)} * e_{idx(q,t)} = e_{idx(p,t)}
          a.lmul[idx(p, q)](idx(p, t), idx(q, t)) = 1.0;
        }
      }
    }
  }
  Vector unit = Vector::Zero(d);
  for (std::size_t b = 0; b < bs.sizes.size(); ++b) {
    const int s = bs.sizes[b];
    const int off = bs.offset(static_cast<int>(b));
    for (int p = 0; p < s; ++p) unit[off + p * s + p] = 1.0;
  }
  a.unit = unit;
  a.norm_desc.kind = AlgebraNorm::Kind::OperatorRep;
  a.norm_desc.rep = std::move(rep);
  a.involution_isometric = true;
  a.blocks = bs;
  return a;
}

StarAlgebra from_group_table(const std::vector<std::vector<int>>& table,
                             const std::vector<int>& inverse) {
  const int d = static_cast<int>(table.size());
  StarAlgebra a;
  a.dim = d;
  a.lmul.assign(d, Matrix::Zero(d, d));
  a.invol = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) a.lmul[i](table[i][j], j) = 1.0;
    a.invol(i, inverse[i]) = 1.0;
  }
  a.unit = Vector(Vector::Unit(d, 0));  // element 0 is the group identity
  a.norm_desc.kind = AlgebraNorm::Kind::L1Weighted;
  a.norm_desc.weights = RealVector::Ones(d);
  a.involution_isometric = true;  // delta_g -> delta_{g^{-1}} permutes the basis
  return a;
}

}  // namespace

StarAlgebra StarAlgebra::matrix_algebra(int d) {
  return from_block_structure({d});
}

StarAlgebra StarAlgebra::block_algebra(const std::vector<int>& sizes) {
  return from_block_structure(sizes);
}

StarAlgebra StarAlgebra::functions_on_points(int n) {
  return from_block_structure(std::vector<int>(static_cast<std::size_t>(n), 1));
}

StarAlgebra StarAlgebra::group_algebra_cyclic(int n) {
  if (n < 1) throw Error("cyclic group order must be >= 1");
  std::vector<std::vector<int>> table(n, std::vector<int>(n));
  std::vector<int> inverse(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) table[i][j] = (i + j) % n;
    inverse[i] = (n - i) % n;
  }
  return from_group_table(table, inverse);
}

StarAlgebra StarAlgebra::group_algebra_s3() {
  // permutations of {0,1,2}; element 0 is the identity
  const std::array<std::array<int, 3>, 6> perms = {{
      {0, 1, 2}, {1, 0, 2}, {0, 2, 1}, {2, 1, 0}, {1, 2, 0}, {2, 0, 1}}};
  auto find = [&](const std::array<int, 3>& p) {
    for (std::size_t i = 0; i < perms.size(); ++i) {
      if (perms[i] == p) return static_cast<int>(i);
    }
    throw Error("permutation lookup failed");
  };
  std::vector<std::vector<int>> table(6, std::vector<int>(6));
  std::vector<int> inverse(6);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      std::array<int, 3> comp;
      for (int t = 0; t < 3; ++t) comp[t] = perms[i][perms[j][t]];
      table[i][j] = find(comp);
    }
    std::array<int, 3> inv;
    for (int t = 0; t < 3; ++t) inv[perms[i][t]] = t;
    inverse[i] = find(inv);
  }
  return from_group_table(table, inverse);
}

StarAlgebra StarAlgebra::unitize(const StarAlgebra& a) {
  StarAlgebra u;
  u.dim = a.dim + 1;
  u.lmul.assign(u.dim, Matrix::Zero(u.dim, u.dim));
  u.lmul[0] = Matrix::Identity(u.dim, u.dim);
  for (int i = 0; i < a.dim; ++i) {
    Matrix& l = u.lmul[i + 1];
    l.block(1, 1, a.dim, a.dim) = a.lmul[i];
    l(i + 1, 0) = 1.0;  // e_i * unit-coordinate
  }
  u.invol = Matrix::Zero(u.dim, u.dim);
  u.invol(0, 0) = 1.0;
  u.invol.block(1, 1, a.dim, a.dim) = a.invol;
  u.unit = Vector(Vector::Unit(u.dim, 0));
  if (a.norm_desc.kind == AlgebraNorm::Kind::L1Weighted) {
    u.norm_desc.kind = AlgebraNorm::Kind::L1Weighted;
    u.norm_desc.weights = RealVector(u.dim);
    u.norm_desc.weights[0] = 1.0;
    u.norm_desc.weights.tail(a.dim) = a.norm_desc.weights;
  } else {
    const int r = static_cast<int>(a.norm_desc.rep.front().rows());
    u.norm_desc.kind = AlgebraNorm::Kind::OperatorRep;
    u.norm_desc.rep.assign(u.dim, Matrix::Zero(r + 1, r + 1));
    u.norm_desc.rep[0] = Matrix::Identity(r + 1, r + 1);
    for (int i = 0; i < a.dim; ++i) {
      u.norm_desc.rep[i + 1].block(1, 1, r, r) = a.norm_desc.rep[i];
    }
  }
  u.involution_isometric = a.involution_isometric;
  u.blocks.reset();  // the adjoined unit is not a matrix unit
  return u;
}

double spectral_radius(const StarAlgebra& a, const Vector& x) {
  if (x.size() != a.dim) throw DimensionMismatch("algebra element has wrong length");
  // left-regular representation of x on the unitization C + A
  Matrix l = Matrix::Zero(a.dim + 1, a.dim + 1);
  l.block(1, 0, a.dim, 1) = x;
  l.block(1, 1, a.dim, a.dim) = a.left_mult_matrix(x);
  Eigen::ComplexEigenSolver<Matrix> solver(l);
  if (solver.info() != Eigen::Success) throw Error("eigen solve failed");
  return max_abs(solver.eigenvalues());
}

std::vector<double> gelfand_estimates(const StarAlgebra& a, const Vector& x,
                                      int kmax) {
  std::vector<double> out;
  Vector p = x;
  double exponent = 1.0;
  for (int k = 0; k <= kmax; ++k) {
    const double nrm = a.norm(p);
    out.push_back(nrm > 0 ? std::pow(nrm, 1.0 / exponent) : 0.0);
    if (nrm == 0.0) break;
    p = a.multiply(p, p);
    exponent *= 2.0;
  }
  return out;
}

SquareRootResult square_root_lemma(const StarAlgebra& a, const Vector& h,
                                   double tol, int cap) {
  if (max_abs((a.involute(h) - h)) >
      1e-9 * std::max(1.0, max_abs(h))) {
    throw NotHermitianElement("square root lemma needs a hermitian element");
  }
  const double r = spectral_radius(a, h);
  if (r >= 1.0 - tol) {
    throw SpectralRadiusTooLarge("square root lemma needs r(h) < 1, got " +
                                 std::to_string(r));
  }
  Vector y = Vector::Zero(a.dim);
  for (int it = 1; it <= cap; ++it) {
    y = 0.5 * (h + a.multiply(y, y));
    Vector residual = 2.0 * y - a.multiply(y, y) - h;
    const double res = a.norm(residual);
    if (res <= tol) return {y, res, it};
  }
  throw Error("square root iteration did not reach the tolerance within the cap");
}

double modulus_of_continuity_lower_bound(const StarAlgebra& a, int samples,
                                         std::uint64_t seed) {
  if (samples < 1) throw Error("samples must be >= 1");
  double best = 0.0;
  auto consider = [&](const Vector& x) {
    const double nrm = a.norm(x);
    if (nrm <= 0.0) return;
    const Vector xx = a.multiply(a.involute(x), x);
    best = std::max(best, std::sqrt(std::max(0.0, spectral_radius(a, xx))) / nrm);
  };
  for (int i = 0; i < a.dim; ++i) consider(Vector::Unit(a.dim, i));
  if (a.unit) consider(*a.unit);
  std::mt19937_64 rng = seeded_rng(seed);
  for (int t = 0; t < samples; ++t) consider(random_vector(rng, a.dim));
  return best;
}

Matrix left_ideal_basis(const StarAlgebra& a,
                        const std::vector<Vector>& generators, double rtol) {
  if (generators.empty()) throw Error("left_ideal_basis needs at least one generator");
  Matrix span(a.dim, static_cast<int>(generators.size()));
  for (std::size_t j = 0; j < generators.size(); ++j) {
    if (generators[j].size() != a.dim) {
      throw DimensionMismatch("generator has wrong length");
    }
    span.col(static_cast<int>(j)) = generators[j];
  }
  auto orthobasis = [&](const Matrix& m) {
    if (m.cols() == 0) return Matrix(m.rows(), 0);
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    int r = 0;
    const double cut = sv.size() ? rtol * std::max(sv[0], 1e-300) : 0.0;
    for (int i = 0; i < sv.size(); ++i) {
      if (sv[i] > cut) ++r;
    }
    return Matrix(svd.matrixU().leftCols(r));
  };
  Matrix basis = orthobasis(span);
  for (int round = 0; round <= a.dim; ++round) {
    const int before = static_cast<int>(basis.cols());
    if (before == 0) return basis;
    Matrix grown(a.dim, before + a.dim * before);
    grown.leftCols(before) = basis;
    int col = before;
    for (int i = 0; i < a.dim; ++i) {
      for (int j = 0; j < before; ++j) {
        grown.col(col++) = a.lmul[i] * basis.col(j);
      }
    }
    basis = orthobasis(grown);
    if (static_cast<int>(basis.cols()) == before) return basis;
  }
  throw Error("left ideal closure did not stabilize");
}

}  // namespace kvn
