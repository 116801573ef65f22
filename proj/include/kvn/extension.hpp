#ifndef KVN_EXTENSION_HPP
#define KVN_EXTENSION_HPP

#include "kvn/normed_space.hpp"

namespace kvn {

/// Partially defined positive operator A : span(domain_basis) -> antidual(E).
/// Column j of `values` holds the antidual coordinates of A(d_j).
struct PartialPositiveOperator {
  NormedSpace space;
  Matrix domain_basis;  // n x k, linearly independent columns
  Matrix values;        // n x k

  int dim() const { return space.dim; }
  int domain_dim() const { return static_cast<int>(domain_basis.cols()); }
};

/// Basic shape and rank validation; Gram positivity is checked by gram().
void validate_operator(const PartialPositiveOperator& op,
                       double rtol = kRankRtol);

/// G_ij = <A d_j | d_i> = (D^* B)_ij. Throws NotSymmetric / NotPositive when
/// the partial operator fails to be positive.
Matrix gram(const PartialPositiveOperator& op, double tol = kTol);

struct WellDefinedCheck {
  bool ok{true};
  Vector witness;  // coefficient vector c with Gc ~ 0 but Bc != 0
};
/// ker G must sit inside ker B, which is exactly what makes the quadratic
/// seminorm on ran A definite and the extension formula consistent.
WellDefinedCheck check_well_defined(const PartialPositiveOperator& op,
                                    double rtol = kRankRtol);

/// Least M with dual_norm(Ax)^2 <= M <Ax|x> on dom A. Exact for l1/l2;
/// interval for linf. Throws NotExtendable when the supremum is unbounded.
Interval schwarz_bound(const PartialPositiveOperator& op,
                       double rtol = kRankRtol);

struct ExtensionResult {
  Matrix G;          // k x k Hermitian PSD Gram matrix
  int rank_G{0};
  Matrix pinv_G;     // k x k
  Matrix T_coeff;    // k x n, coefficient matrix of T = J^* o j_E
  Matrix A_N;        // n x n Hermitian PSD, A_N D = B
  Interval M_min;    // Schwarz constant
  Interval Mprime_min;
  bool mprime_empty{false};  // B = 0: empty supremum, 0 by convention
  double rtol{kRankRtol};
};

/// Smallest positive extension: H_A is realized as C^k / ker G with the
/// G-inner product, J maps [c] to Bc, T = J^* o j_E has coefficient matrix
/// G^+ B^*, and A_N = T^* T = B G^+ B^*.
ExtensionResult krein_von_neumann(const PartialPositiveOperator& op,
                                  double rtol = kRankRtol);

/// sup{ |<Ay|x>|^2 : y in dom A, <Ay|y> <= 1 } by dense seeded sampling of
/// the G-ellipsoid plus a conjugate-gradient ascent; independent of the
/// pseudo-inverse route that produces A_N.
double quadratic_form_oracle(const PartialPositiveOperator& op, const Vector& x,
                             int grid_density = 2000,
                             std::uint64_t seed = 20240901);

/// candidate must be a Hermitian PSD extension of A (else BadCandidate);
/// returns whether candidate - A_N is PSD within tol.
bool verify_minimality(const PartialPositiveOperator& op,
                       const ExtensionResult& result, const Matrix& candidate,
                       double tol = kTol);

/// A_N + P S P with P the orthoprojection onto span(domain_basis)^perp and
/// S a seeded random Hermitian PSD matrix; always a positive extension of A.
Matrix random_extension(const PartialPositiveOperator& op,
                        const ExtensionResult& result, std::uint64_t seed);

struct NormReport {
  Interval norm;        // operator norm of A_N as a map E -> antidual(E)
  Interval t_norm_sq;   // sup{ x^* A_N x : norm(x) <= 1 } = ||T||^2
  bool matches_schwarz{false};
  bool cstar_identity{false};
};
/// Computes ||A_N|| and checks the norm formula ||A_N|| = M_min and the
/// C*-identity ||A_N|| = ||T||^2 (intervals must overlap at 1e-6 relative).
NormReport extension_norm(const PartialPositiveOperator& op,
                          const ExtensionResult& result);

struct ClosedRangeConstants {
  Interval M;
  Interval Mprime;
  bool empty_supremum{false};
};
/// The two constants of the closed-range characterization:
/// dual_norm(Ax)^2 <= M <Ax|x> <= M * Mprime ... <Ax|x> <= Mprime dual_norm(Ax)^2.
ClosedRangeConstants closed_range_constants(const PartialPositiveOperator& op,
                                            double rtol = kRankRtol);

struct RangeChainReport {
  int rank_A_N{0};
  int rank_T_star{0};
  int rank_J{0};
  bool ran_AN_in_ran_ANstar{false};
  bool ran_ANstar_in_ran_Tstar{false};
  bool ranks_equal{false};
  bool column_spaces_equal{false};
  bool ok() const {
    return ran_AN_in_ran_ANstar && ran_ANstar_in_ran_Tstar && ranks_equal &&
           column_spaces_equal;
  }
};
RangeChainReport range_chain_check(const PartialPositiveOperator& op,
                                   const ExtensionResult& result);

struct CompactnessReport {
  bool compact{true};
  Interval radius;  // sqrt(M_min): the set {Ax : <Ax|x> <= 1} sits in this ball
  Vector witness;   // unbounded direction when not well defined
};
CompactnessReport compactness_check(const PartialPositiveOperator& op,
                                    double rtol = kRankRtol);

}  // namespace kvn

#endif  // KVN_EXTENSION_HPP
