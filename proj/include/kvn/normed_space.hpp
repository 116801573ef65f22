#ifndef KVN_NORMED_SPACE_HPP
#define KVN_NORMED_SPACE_HPP

#include "kvn/numeric.hpp"

namespace kvn {

enum class NormTag { L1, L2, LInf };

/// Finite-dimensional complex coordinate space with a weighted l1, l2 or
/// linf norm. Antidual elements are stored as plain coordinate vectors phi
/// acting through pair(phi, x) = sum_i phi_i * conj(x_i); the anti-bidual
/// embedding is the identity on coordinates (finite dimension is reflexive).
struct NormedSpace {
  int dim{0};
  NormTag tag{NormTag::L2};
  RealVector weights;  // size dim, all strictly positive

  static NormedSpace l1(int dim);
  static NormedSpace l2(int dim);
  static NormedSpace linf(int dim);
  static NormedSpace with_weights(NormTag tag, RealVector weights);

  /// Dual space under the pairing: l1(w) -> linf(1/w), l2(w) -> l2(1/w),
  /// linf(w) -> l1(1/w).
  NormedSpace dual() const;

  double norm(const Vector& x) const;
  double dual_norm(const Vector& phi) const;

  /// A vector x with norm(x) <= 1 and |pair(phi, x)| = dual_norm(phi).
  Vector dual_maximizer(const Vector& phi) const;

  void check_dim(const Vector& v) const;
};

/// <phi|x> : linear in phi, conjugate-linear in x.
Cplx pair(const Vector& phi, const Vector& x);

/// Norm of M as a map E -> antidual(E), i.e. sup{dual_norm(Mx) : norm(x)<=1}.
/// Exact for l1 (max scaled entry) and l2 (scaled largest singular value);
/// the linf -> l1 case is a torus maximization returned as a certified
/// interval (phase-ascent lower bound, mass / n*sigma_max upper bound).
struct OperatorNormResult {
  Interval value;
  bool exact{true};
  int ascent_starts{0};  // 0 for closed forms
};
OperatorNormResult operator_norm(const Matrix& m, const NormedSpace& space);

/// Largest value of Re(sigma^* H z) over per-coordinate phase vectors, i.e.
/// the linf->l1 norm of H; `quadratic` restricts to sigma == z which is the
/// same value for Hermitian PSD H. Exposed for reuse by the extension engine.
Interval torus_bilinear_max(const Matrix& h, bool quadratic);

struct SymmetryCheck {
  bool symmetric{true};
  double deviation{0.0};
  Vector witness_x;  // <Mx|y> != conj(<My|x>) when !symmetric
  Vector witness_y;
};
SymmetryCheck check_symmetry(const Matrix& m, double tol = kTol);

}  // namespace kvn

#endif  // KVN_NORMED_SPACE_HPP
