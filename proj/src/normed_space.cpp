#include "kvn/normed_space.hpp"

#include <Eigen/SVD>

namespace kvn {

namespace {

RealVector unit_weights(int dim) { return RealVector::Ones(dim); }

Cplx phase_of(Cplx z) {
  const double m = std::abs(z);
  return m > 0 ? z / m : Cplx(1.0, 0.0);
}

}  // namespace

NormedSpace NormedSpace::l1(int dim) {
  return with_weights(NormTag::L1, unit_weights(dim));
}
NormedSpace NormedSpace::l2(int dim) {
  return with_weights(NormTag::L2, unit_weights(dim));
}
NormedSpace NormedSpace::linf(int dim) {
  return with_weights(NormTag::LInf, unit_weights(dim));
}

NormedSpace NormedSpace::with_weights(NormTag tag, RealVector weights) {
  if (weights.size() < 1) throw DimensionMismatch("space dimension must be >= 1");
  if ((weights.array() <= 0.0).any()) {
    throw Error("norm weights must be strictly positive");
  }
  NormedSpace s;
  s.dim = static_cast<int>(weights.size());
  s.tag = tag;
  s.weights = std::move(weights);
  return s;
}

NormedSpace NormedSpace::dual() const {
  RealVector recip = weights.cwiseInverse();
  switch (tag) {
    case NormTag::L1:
      return with_weights(NormTag::LInf, recip);
    case NormTag::L2:
      return with_weights(NormTag::L2, recip);
    case NormTag::LInf:
      return with_weights(NormTag::L1, recip);
  }
  throw Error("unreachable");
}

void NormedSpace::check_dim(const Vector& v) const {
  if (static_cast<int>(v.size()) != dim) {
    throw DimensionMismatch("vector length " + std::to_string(v.size()) +
                            " does not match space dimension " +
                            std::to_string(dim));
  }
}

double NormedSpace::norm(const Vector& x) const {
  check_dim(x);
  switch (tag) {
    case NormTag::L1:
      return (weights.array() * x.cwiseAbs().array()).sum();
    case NormTag::L2:
      return std::sqrt((weights.array() * x.cwiseAbs2().array()).sum());
    case NormTag::LInf:
      return (weights.array() * x.cwiseAbs().array()).maxCoeff();
  }
  throw Error("unreachable");
}

double NormedSpace::dual_norm(const Vector& phi) const {
  check_dim(phi);
  return dual().norm(phi);
}

Vector NormedSpace::dual_maximizer(const Vector& phi) const {
  check_dim(phi);
  Vector x = Vector::Zero(dim);
  switch (tag) {
    case NormTag::L1: {
      int best = 0;
      double best_val = -1.0;
      for (int i = 0; i < dim; ++i) {
        const double v = std::abs(phi[i]) / weights[i];
        if (v > best_val) {
          best_val = v;
          best = i;
        }
      }
      x[best] = phase_of(phi[best]) / weights[best];
      return x;
    }
    case NormTag::L2: {
      const double dn = dual_norm(phi);
      if (dn == 0.0) return x;
      for (int i = 0; i < dim; ++i) x[i] = phi[i] / weights[i] / dn;
      return x;
    }
    case NormTag::LInf: {
      for (int i = 0; i < dim; ++i) x[i] = phase_of(phi[i]) / weights[i];
      return x;
    }
  }
  throw Error("unreachable");
}

Cplx pair(const Vector& phi, const Vector& x) {
  if (phi.size() != x.size()) {
    throw DimensionMismatch("pairing of vectors of different lengths");
  }
  return x.dot(phi);  // Eigen dot conjugates its receiver: sum conj(x_i) phi_i
}

namespace {

Vector phases(const Vector& u) {
  Vector p(u.size());
  for (int i = 0; i < u.size(); ++i) p[i] = phase_of(u[i]);
  return p;
}

double bilinear_value(const Matrix& h, const Vector& z) {
  return h.rows() == 0 ? 0.0 : (h * z).cwiseAbs().sum();
}

// Alternating phase ascent on Re(sigma^* H z); each half-step is the exact
// coordinate optimum, so the value is nondecreasing.
double ascend_bilinear(const Matrix& h, Vector z, int max_iter = 200) {
  double val = bilinear_value(h, z);
  for (int it = 0; it < max_iter; ++it) {
    Vector sigma = phases(h * z);
    z = phases(h.adjoint() * sigma);
    const double next = std::real(sigma.dot(h * z));
    if (next <= val + 1e-15 * std::max(1.0, val)) return std::max(val, next);
    val = next;
  }
  return val;
}

// Coordinate phase ascent on z^* H z for Hermitian H.
double ascend_quadratic(const Matrix& h, Vector z, int max_iter = 200) {
  const int n = static_cast<int>(h.rows());
  double val = std::real(z.dot(h * z));
  for (int it = 0; it < max_iter; ++it) {
    for (int j = 0; j < n; ++j) {
      const Cplx rowdot = h.row(j) * z;
      const Cplx off = rowdot - h(j, j) * z[j];
      if (std::abs(off) > 0) z[j] = phase_of(off);
    }
    const double next = std::real(z.dot(h * z));
    if (next <= val + 1e-15 * std::max(1.0, val)) return std::max(val, next);
    val = next;
  }
  return val;
}

}  // namespace

Interval torus_bilinear_max(const Matrix& h, bool quadratic) {
  const int n = static_cast<int>(h.rows());
  if (n == 0 || max_abs(h) == 0.0) return Interval::point(0.0);

  double lo = 0.0;
  auto ascend = [&](const Vector& start) {
    const double v = quadratic ? ascend_quadratic(h, start)
                               : ascend_bilinear(h, start);
    lo = std::max(lo, v);
  };

  ascend(Vector::Ones(n));
  // real sign patterns: exhaustive for small n, they seed the phase ascent
  if (n <= 12) {
    Vector s(n);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      for (int i = 0; i < n; ++i) s[i] = (mask >> i) & 1 ? -1.0 : 1.0;
      const double v = quadratic ? std::real(s.dot(h * s)) : bilinear_value(h, s);
      lo = std::max(lo, v);
    }
  }
  std::mt19937_64 rng = seeded_rng(0x6b766eULL);
  const int starts = 24;
  for (int t = 0; t < starts; ++t) ascend(phases(random_vector(rng, n)));

  Eigen::JacobiSVD<Matrix> svd(h);
  const double smax = svd.singularValues()[0];
  const double mass = h.cwiseAbs().sum();
  const double hi = std::min(mass, n * smax);
  return Interval::bounds(lo, std::max(lo, hi));
}

OperatorNormResult operator_norm(const Matrix& m, const NormedSpace& space) {
  if (m.rows() != space.dim || m.cols() != space.dim) {
    throw DimensionMismatch("operator_norm needs a square matrix of the space dimension");
  }
  const RealVector& w = space.weights;
  switch (space.tag) {
    case NormTag::L1: {
      double best = 0.0;
      for (int i = 0; i < space.dim; ++i) {
        for (int j = 0; j < space.dim; ++j) {
          best = std::max(best, std::abs(m(i, j)) / (w[i] * w[j]));
        }
      }
      return {Interval::point(best), true, 0};
    }
    case NormTag::L2: {
      RealVector rsq = w.cwiseSqrt().cwiseInverse();
      Matrix scaled = rsq.asDiagonal() * m * rsq.asDiagonal();
      Eigen::JacobiSVD<Matrix> svd(scaled);
      const double s = scaled.size() == 0 ? 0.0 : svd.singularValues()[0];
      return {Interval::point(s), true, 0};
    }
    case NormTag::LInf: {
      RealVector recip = w.cwiseInverse();
      Matrix scaled = recip.asDiagonal() * m * recip.asDiagonal();
      const bool herm = is_hermitian(scaled, 1e-12) && min_eigenvalue(scaled) >= -1e-12;
      Interval v = torus_bilinear_max(scaled, herm);
      return {v, v.is_point(), 24};
    }
  }
  throw Error("unreachable");
}

SymmetryCheck check_symmetry(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) throw DimensionMismatch("check_symmetry needs a square matrix");
  SymmetryCheck out;
  const int n = static_cast<int>(m.rows());
  if (n == 0) return out;
  const double scale = std::max(1.0, max_abs(m));
  int bi = 0, bj = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double d = std::abs(m(i, j) - std::conj(m(j, i)));
      if (d > out.deviation) {
        out.deviation = d;
        bi = i;
        bj = j;
      }
    }
  }
  if (out.deviation > tol * scale) {
    out.symmetric = false;
    // <Mx|y> = M_ij and conj(<My|x>) = conj(M_ji) disagree for these:
    out.witness_x = Vector::Unit(n, bj);
    out.witness_y = Vector::Unit(n, bi);
  }
  return out;
}

}  // namespace kvn
