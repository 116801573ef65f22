#ifndef KVN_DIAGONAL_HPP
#define KVN_DIAGONAL_HPP

#include "kvn/extension.hpp"

#include <optional>
#include <vector>

namespace kvn {

/// Tail rule for indices past the explicit prefix. `Empty` ends the support;
/// the other three keep every remaining index in the support with the stated
/// values (`Decay` is s(n) = scale / (n + 1)).
enum class TailKind { Empty, Zero, Constant, Decay };

/// Diagonal positive operator l1 >= l1_N -> linf with <Ax|y> =
/// sum_n s(n) x(n) conj(y(n)). The tail family keeps the extendability,
/// compactness and closed-range predicates decidable.
struct DiagonalOperator {
  std::vector<int> prefix_indices;   // strictly increasing, >= 0
  std::vector<double> prefix_values; // s on the prefix, >= 0
  TailKind tail{TailKind::Empty};
  double tail_param{0.0};  // Constant: the value; Decay: the scale

  void validate() const;
  int tail_start() const;  // first index governed by the tail rule
  bool in_support(int n) const;
  double value_at(int n) const;  // s(n); 0 outside the support
};

struct Extendability {
  bool extendable{true};  // always true for the supported tail rules
  double m_min{0.0};      // sup_n s(n)
};
/// ||Ax||_inf^2 <= (sup s) <Ax|x>, sharp on single-index vectors.
Extendability is_extendable(const DiagonalOperator& d);

/// The constraint set {Ax : <Ax|x> <= 1} is the box of radii sqrt(s(n));
/// totally bounded in linf exactly when s(n) -> 0 along the support.
bool is_compact_extension(const DiagonalOperator& d);

/// Single-index vectors force s >= 1/M' on the support; equal-mass vectors
/// spread over m indices defeat that bound as m grows, so the closed-range
/// property holds exactly when {n : s(n) > 0} is finite.
bool has_closed_range_extension(const DiagonalOperator& d);

/// n-dimensional unweighted-l1 instance with domain basis {e_j : j in N, j < n}
/// and values s(j) e_j.
PartialPositiveOperator truncate(const DiagonalOperator& d, int n);

/// log2 of the size of an eps-net (sup metric) of the box of radii
/// sqrt(s(j)), j in support, j < n. Stabilizes in n for each eps exactly
/// when the extension is compact; the truncation oracle for
/// is_compact_extension. Logarithmic to stay exact for huge nets.
double epsilon_net_log2_cardinality(const DiagonalOperator& d, int n,
                                    double eps);

}  // namespace kvn

#endif  // KVN_DIAGONAL_HPP
