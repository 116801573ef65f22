#include "kvn/numeric.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace kvn {

HermitianEig hermitian_eig(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw Error("hermitian eigendecomposition failed");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double hermitian_deviation(const Matrix& m) {
  return max_abs((m - m.adjoint()));
}

bool is_hermitian(const Matrix& m, double tol) {
  if (m.size() == 0) return true;
  const double scale = std::max(1.0, max_abs(m));
  return hermitian_deviation(m) <= tol * scale;
}

double min_eigenvalue(const Matrix& h) {
  if (h.rows() == 0) return 0.0;
  Matrix sym = 0.5 * (h + h.adjoint());
  return hermitian_eig(sym).values.minCoeff();
}

Matrix psd_pseudo_inverse(const Matrix& g, double rtol, int* rank,
                          Matrix* kernel) {
  const int k = static_cast<int>(g.rows());
  if (k == 0) {
    if (rank) *rank = 0;
    if (kernel) *kernel = Matrix(0, 0);
    return Matrix(0, 0);
  }
  HermitianEig eig = hermitian_eig(0.5 * (g + g.adjoint()));
  const double lmax = max_abs(eig.values);
  const double cut = rtol * std::max(lmax, 1e-300);
  Matrix pinv = Matrix::Zero(k, k);
  int r = 0;
  std::vector<int> null_cols;
  for (int i = 0; i < k; ++i) {
    if (eig.values[i] > cut) {
      pinv += eig.vectors.col(i) * eig.vectors.col(i).adjoint() / eig.values[i];
      ++r;
    } else {
      null_cols.push_back(i);
    }
  }
  if (rank) *rank = r;
  if (kernel) {
    kernel->resize(k, static_cast<int>(null_cols.size()));
    for (std::size_t j = 0; j < null_cols.size(); ++j) {
      kernel->col(static_cast<int>(j)) = eig.vectors.col(null_cols[j]);
    }
  }
  return pinv;
}

int numerical_rank(const Matrix& m, double rtol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double cut = rtol * std::max(sv[0], 1e-300);
  int r = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv[i] > cut) ++r;
  }
  return r;
}

RealVector pencil_eigenvalues_on_range(const Matrix& s, const Matrix& g,
                                       double rtol) {
  const int k = static_cast<int>(g.rows());
  if (k == 0) return RealVector(0);
  HermitianEig eig = hermitian_eig(0.5 * (g + g.adjoint()));
  const double lmax = max_abs(eig.values);
  const double cut = rtol * std::max(lmax, 1e-300);
  std::vector<int> pos;
  for (int i = 0; i < k; ++i) {
    if (eig.values[i] > cut) pos.push_back(i);
  }
  const int r = static_cast<int>(pos.size());
  if (r == 0) return RealVector(0);
  Matrix u(k, r);
  RealVector lam(r);
  for (int j = 0; j < r; ++j) {
    u.col(j) = eig.vectors.col(pos[j]);
    lam[j] = eig.values[pos[j]];
  }
  Matrix scale = lam.cwiseSqrt().cwiseInverse().asDiagonal();
  Matrix c = scale * u.adjoint() * s * u * scale;
  return hermitian_eig(0.5 * (c + c.adjoint())).values;
}

bool same_column_space(const Matrix& a, const Matrix& b, double rtol) {
  const int ra = numerical_rank(a, rtol);
  const int rb = numerical_rank(b, rtol);
  if (ra != rb) return false;
  Matrix joined(a.rows(), a.cols() + b.cols());
  joined << a, b;
  return numerical_rank(joined, rtol) == ra;
}

Vector cg_solve_psd(const Matrix& g, const Vector& rhs, double tol,
                    int max_iter) {
  const int k = static_cast<int>(g.rows());
  Vector m = Vector::Zero(k);
  if (k == 0 || rhs.norm() == 0.0) return m;
  if (max_iter < 0) max_iter = 4 * k + 10;
  Vector r = rhs;
  Vector p = r;
  double rs = r.squaredNorm();
  const double stop = tol * rhs.norm();
  for (int it = 0; it < max_iter && std::sqrt(rs) > stop; ++it) {
    Vector gp = g * p;
    const double denom = std::real(p.dot(gp));
    if (denom <= 0.0) break;  // left ran G, numerical kernel reached
    const double alpha = rs / denom;
    m += alpha * p;
    r -= alpha * gp;
    const double rs_new = r.squaredNorm();
    p = r + (rs_new / rs) * p;
    rs = rs_new;
  }
  return m;
}

double psd_ratio_sup(const Matrix& g, const Vector& w, int samples,
                     std::uint64_t seed) {
  const int k = static_cast<int>(g.rows());
  if (k == 0 || w.norm() == 0.0) return 0.0;
  const double gscale = std::max(1e-300, max_abs(g));
  auto value = [&](const Vector& c) {
    const double den = std::real(c.dot(g * c));
    if (den <= 1e-13 * gscale * c.squaredNorm()) return 0.0;
    const double num = std::abs(w.dot(c));
    return num * num / den;
  };
  double best = 0.0;
  for (int j = 0; j < k; ++j) best = std::max(best, value(Vector::Unit(k, j)));
  best = std::max(best, value(w));
  std::mt19937_64 rng = seeded_rng(seed);
  for (int t = 0; t < samples; ++t) {
    best = std::max(best, value(random_unit_vector(rng, k)));
  }
  best = std::max(best, value(cg_solve_psd(g, w)));
  return best;
}

std::mt19937_64 seeded_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

Cplx random_cplx(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  return {gauss(rng), gauss(rng)};
}

Vector random_vector(std::mt19937_64& rng, int n) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = random_cplx(rng);
  return v;
}

Vector random_unit_vector(std::mt19937_64& rng, int n) {
  Vector v = random_vector(rng, n);
  const double nrm = v.norm();
  return nrm > 0 ? Vector(v / nrm) : v;
}

Matrix random_psd(std::mt19937_64& rng, int n, int rank) {
  rank = std::min(rank, n);
  if (rank <= 0) return Matrix::Zero(n, n);
  Matrix f(n, rank);
  for (int j = 0; j < rank; ++j) f.col(j) = random_vector(rng, n);
  return f * f.adjoint();
}

}  // namespace kvn
