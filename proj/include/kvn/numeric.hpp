#ifndef KVN_NUMERIC_HPP
#define KVN_NUMERIC_HPP

#include <Eigen/Dense>
#include <complex>
#include <random>
#include <stdexcept>
#include <string>

namespace kvn {

using Cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Absolute tolerance for equality asserts on unit-scaled data.
inline constexpr double kTol = 1e-9;
// Relative cutoff below which eigen/singular values count as zero; the same
// cutoff drives every rank decision so rank claims stay mutually consistent.
inline constexpr double kRankRtol = 1e-10;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct NotSymmetric : Error {
  using Error::Error;
};
struct NotPositive : Error {
  using Error::Error;
};
struct NotExtendable : Error {
  Vector witness;
  NotExtendable(const std::string& msg, Vector w)
      : Error(msg), witness(std::move(w)) {}
};
struct BadCandidate : Error {
  using Error::Error;
};
struct NotRepresentable : Error {
  Vector witness;  // ideal element a with f(a*a)=0 but f(a)!=0
  NotRepresentable(const std::string& msg, Vector w)
      : Error(msg), witness(std::move(w)) {}
};
struct InternalCheck : Error {
  using Error::Error;
};

/// Certified enclosure of a real quantity. Closed-form results are points
/// (lo == hi); combinatorial suprema carry an honest [lower, upper] gap.
struct Interval {
  double lo{0.0};
  double hi{0.0};

  static Interval point(double v) { return {v, v}; }
  static Interval bounds(double lo, double hi) { return {lo, hi}; }

  double mid() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
  bool is_point(double rel = 1e-12) const {
    return width() <= rel * std::max(1.0, std::abs(hi));
  }
  bool contains(double v, double slack = 0.0) const {
    return v >= lo - slack && v <= hi + slack;
  }
  bool overlaps(const Interval& other, double rel = 1e-9) const {
    const double slack = rel * std::max({1.0, std::abs(hi), std::abs(other.hi)});
    return lo <= other.hi + slack && other.lo <= hi + slack;
  }
};

struct HermitianEig {
  RealVector values;  // ascending
  Matrix vectors;
};

HermitianEig hermitian_eig(const Matrix& h);

/// max |entry|, 0 for empty inputs (Eigen's maxCoeff rejects empty).
template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// max |(M - M^†)_ij|, zero for Hermitian input.
double hermitian_deviation(const Matrix& m);
bool is_hermitian(const Matrix& m, double tol = kTol);

/// Smallest eigenvalue of the Hermitian part; callers decide the PSD slack.
double min_eigenvalue(const Matrix& h);

/// Moore-Penrose inverse of a Hermitian PSD matrix; eigenvalues below
/// rtol * lambda_max are treated as exact zeros. Optionally reports the rank
/// and an orthonormal basis of the numerical kernel.
Matrix psd_pseudo_inverse(const Matrix& g, double rtol = kRankRtol,
                          int* rank = nullptr, Matrix* kernel = nullptr);

int numerical_rank(const Matrix& m, double rtol = kRankRtol);

/// Eigenvalues of the pencil (S, G) restricted to ran G; S Hermitian, G PSD.
RealVector pencil_eigenvalues_on_range(const Matrix& s, const Matrix& g,
                                       double rtol = kRankRtol);

/// rank([A B]) == rank(A) == rank(B) style column-space equality test.
bool same_column_space(const Matrix& a, const Matrix& b, double rtol = kRankRtol);

/// Conjugate-gradient solve of the consistent PSD system G m = rhs starting
/// from zero, so iterates stay in ran G. Used as the Krylov route that is
/// independent of the eigendecomposition-based pseudo-inverse.
Vector cg_solve_psd(const Matrix& g, const Vector& rhs, double tol = 1e-14,
                    int max_iter = -1);

/// sup{ |w^* c|^2 / c^* G c : c^* G c > 0 } for Hermitian PSD G and w in
/// ran G: seeded sampling of the G-ellipsoid plus a conjugate-gradient ascent
/// onto the stationary direction G c ~ w. Independent of any pseudo-inverse.
double psd_ratio_sup(const Matrix& g, const Vector& w, int samples = 2000,
                     std::uint64_t seed = 20240901);

std::mt19937_64 seeded_rng(std::uint64_t seed);
Cplx random_cplx(std::mt19937_64& rng);
Vector random_vector(std::mt19937_64& rng, int n);
Vector random_unit_vector(std::mt19937_64& rng, int n);
/// Random Hermitian PSD matrix of the given rank (rank <= n).
Matrix random_psd(std::mt19937_64& rng, int n, int rank);

}  // namespace kvn

#endif  // KVN_NUMERIC_HPP
