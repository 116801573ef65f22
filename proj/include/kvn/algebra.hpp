#ifndef KVN_ALGEBRA_HPP
#define KVN_ALGEBRA_HPP

#include "kvn/numeric.hpp"

#include <optional>
#include <vector>

namespace kvn {

struct SpectralRadiusTooLarge : Error {
  using Error::Error;
};
struct NotHermitianElement : Error {
  using Error::Error;
};

struct AlgebraNorm {
  enum class Kind { L1Weighted, OperatorRep };
  Kind kind{Kind::L1Weighted};
  RealVector weights;       // L1Weighted: strictly positive, size dim
  std::vector<Matrix> rep;  // OperatorRep: rep[i] = rho(e_i), all r x r
};

/// Marks a basis made of matrix units of a block-diagonal *-algebra; the
/// coordinates of block b are stored row-major after `offset(b)`. This is
/// what makes nuclear-norm (dual) computations exact for C*-instances.
struct BlockStructure {
  std::vector<int> sizes;
  int offset(int b) const;
  int total_dim() const;  // sum of sizes (representation dimension)
};

/// Finite-dimensional Banach *-algebra given by structure constants
/// e_i e_j = sum_k c[i][j][k] e_k, an involution matrix (row i = coords of
/// e_i^*), and a submultiplicative norm (weighted l1 on coordinates, or the
/// operator norm through a faithful *-representation).
struct StarAlgebra {
  int dim{0};
  std::vector<Matrix> lmul;  // lmul[i](k, j) = c[i][j][k]
  Matrix invol;              // row i = coords of e_i^*
  AlgebraNorm norm_desc;
  std::optional<Vector> unit;
  bool involution_isometric{false};
  std::optional<BlockStructure> blocks;

  bool cstar_instance() const { return blocks.has_value(); }

  Vector multiply(const Vector& x, const Vector& y) const;
  Vector involute(const Vector& x) const;
  Matrix left_mult_matrix(const Vector& x) const;

  double norm(const Vector& x) const;
  /// Dual norm of a functional phi acting through sum_i phi_i conj(x_i).
  /// Weighted-l1 spaces give a scaled max; C*-instances give the blockwise
  /// nuclear norm. Unavailable otherwise.
  double dual_norm(const Vector& phi) const;
  /// x with norm(x) <= 1 and pair(phi, x) = dual_norm(phi).
  Vector dual_maximizer(const Vector& phi) const;

  /// Block-diagonal matrix realization of a coordinate vector (C* only).
  Matrix block_matrix(const Vector& coords) const;

  /// Associativity, involution laws, submultiplicativity and the declared
  /// norm/involution flags; throws on violation.
  void validate(double tol = 1e-9, std::uint64_t seed = 7) const;

  static StarAlgebra matrix_algebra(int d);
  static StarAlgebra block_algebra(const std::vector<int>& sizes);
  static StarAlgebra group_algebra_cyclic(int n);
  static StarAlgebra group_algebra_s3();
  static StarAlgebra functions_on_points(int n);
  /// Standard unitization C + A; l1 norms gain weight 1 on the new unit
  /// coordinate, operator norms gain a 1x1 block. The C*-block shortcut is
  /// dropped because the adjoined unit is not a matrix unit.
  static StarAlgebra unitize(const StarAlgebra& a);
};

/// Spectral radius via the left-regular representation on the unitization,
/// exact in finite dimensions and independent of the norm choice.
double spectral_radius(const StarAlgebra& a, const Vector& x);

/// ||x^(2^j)||^(1/2^j) for j = 0..kmax; nonincreasing and >= r(x).
std::vector<double> gelfand_estimates(const StarAlgebra& a, const Vector& x,
                                      int kmax = 6);

struct SquareRootResult {
  Vector y;
  double residual;
  int iterations;
};
/// Hermitian y with 2y - y^2 = h from y_{k+1} = (h + y_k^2)/2, convergent for
/// r(h) < 1; non-convergence within the cap is reported, not truncated.
SquareRootResult square_root_lemma(const StarAlgebra& a, const Vector& h,
                                   double tol = 1e-10, int cap = 200);

/// max over sampled x != 0 of r(x^*x)^{1/2} / ||x||; a certified lower bound
/// for the modulus of continuity m(A), with basis vectors and the unit
/// included as deterministic candidates.
double modulus_of_continuity_lower_bound(const StarAlgebra& a, int samples,
                                         std::uint64_t seed);

/// Orthonormal basis of the smallest subspace containing the generators and
/// closed under left multiplication by every basis element.
Matrix left_ideal_basis(const StarAlgebra& a,
                        const std::vector<Vector>& generators,
                        double rtol = kRankRtol);

}  // namespace kvn

#endif  // KVN_ALGEBRA_HPP
