#include "kvn/diagonal.hpp"

#include <algorithm>
#include <cmath>

namespace kvn {

void DiagonalOperator::validate() const {
  if (prefix_indices.size() != prefix_values.size()) {
    throw DimensionMismatch("prefix indices and values differ in length");
  }
  for (std::size_t i = 0; i < prefix_indices.size(); ++i) {
    if (prefix_indices[i] < 0) throw Error("prefix indices must be nonnegative");
    if (i > 0 && prefix_indices[i] <= prefix_indices[i - 1]) {
      throw Error("prefix indices must be strictly increasing");
    }
    if (prefix_values[i] < 0.0) throw Error("diagonal values must be nonnegative");
  }
  if (tail_param < 0.0) throw Error("tail parameter must be nonnegative");
}

int DiagonalOperator::tail_start() const {
  return prefix_indices.empty() ? 0 : prefix_indices.back() + 1;
}

bool DiagonalOperator::in_support(int n) const {
  if (std::binary_search(prefix_indices.begin(), prefix_indices.end(), n)) {
    return true;
  }
  return n >= tail_start() && tail != TailKind::Empty;
}

double DiagonalOperator::value_at(int n) const {
  auto it = std::lower_bound(prefix_indices.begin(), prefix_indices.end(), n);
  if (it != prefix_indices.end() && *it == n) {
    return prefix_values[static_cast<std::size_t>(it - prefix_indices.begin())];
  }
  if (n < tail_start()) return 0.0;
  switch (tail) {
    case TailKind::Empty:
    case TailKind::Zero:
      return 0.0;
    case TailKind::Constant:
      return tail_param;
    case TailKind::Decay:
      return tail_param / (n + 1);
  }
  return 0.0;
}

Extendability is_extendable(const DiagonalOperator& d) {
  d.validate();
  double sup = 0.0;
  for (double v : d.prefix_values) sup = std::max(sup, v);
  switch (d.tail) {
    case TailKind::Empty:
    case TailKind::Zero:
      break;
    case TailKind::Constant:
      sup = std::max(sup, d.tail_param);
      break;
    case TailKind::Decay:
      sup = std::max(sup, d.tail_param / (d.tail_start() + 1));
      break;
  }
  return {true, sup};
}

bool is_compact_extension(const DiagonalOperator& d) {
  d.validate();
  switch (d.tail) {
    case TailKind::Empty:
    case TailKind::Zero:
    case TailKind::Decay:
      return true;  // s -> 0 along the support (finite support included)
    case TailKind::Constant:
      return d.tail_param == 0.0;
  }
  return true;
}

bool has_closed_range_extension(const DiagonalOperator& d) {
  d.validate();
  switch (d.tail) {
    case TailKind::Empty:
    case TailKind::Zero:
      return true;  // finite positive support
    case TailKind::Constant:
    case TailKind::Decay:
      return d.tail_param == 0.0;
  }
  return true;
}

PartialPositiveOperator truncate(const DiagonalOperator& d, int n) {
  d.validate();
  if (n < 1) throw Error("truncation size must be >= 1");
  std::vector<int> support;
  for (int j = 0; j < n; ++j) {
    if (d.in_support(j)) support.push_back(j);
  }
  const int k = static_cast<int>(support.size());
  PartialPositiveOperator op;
  op.space = NormedSpace::l1(n);
  op.domain_basis = Matrix::Zero(n, k);
  op.values = Matrix::Zero(n, k);
  for (int c = 0; c < k; ++c) {
    op.domain_basis(support[c], c) = 1.0;
    op.values(support[c], c) = d.value_at(support[c]);
  }
  return op;
}

double epsilon_net_log2_cardinality(const DiagonalOperator& d, int n,
                                    double eps) {
  if (eps <= 0.0) throw Error("eps must be positive");
  // A disc of radius r needs one point when r <= eps, otherwise a square
  // grid of spacing eps*sqrt(2) inside the bounding box covers it.
  auto disc_cover = [eps](double r) -> double {
    if (r <= eps) return 1.0;
    const double per_axis = std::ceil(2.0 * r / (eps * std::sqrt(2.0))) + 1.0;
    return per_axis * per_axis;
  };
  double log2_total = 0.0;
  for (int j = 0; j < n; ++j) {
    if (!d.in_support(j)) continue;
    log2_total += std::log2(disc_cover(std::sqrt(d.value_at(j))));
  }
  return log2_total;
}

}  // namespace kvn
