#ifndef KVN_GNS_HPP
#define KVN_GNS_HPP

#include "kvn/algebra.hpp"
#include "kvn/extension.hpp"

namespace kvn {

struct NotLeftUnit : Error {
  using Error::Error;
};
struct UnboundedNet : Error {
  using Error::Error;
};
struct BadIndicator : Error {
  using Error::Error;
};
struct NotCStarInstance : Error {
  using Error::Error;
};

/// Positive functional f on a left ideal M, given by an explicit basis of M
/// (columns of ideal_basis, closed under left multiplication) and the values
/// f(a_j). The Gram form (a, b) -> f(b^* a) must be Hermitian PSD.
struct IdealFunctional {
  StarAlgebra algebra;
  Matrix ideal_basis;  // d x k
  Vector values;       // k
};

/// Checks basis rank, left-multiplication closure, and Gram positivity.
void validate_ideal_functional(const IdealFunctional& f, double tol = kTol);

/// f evaluated on an ideal element given by algebra coordinates.
Cplx functional_value(const IdealFunctional& f, const Vector& algebra_coords,
                      double tol = 1e-7);

/// G_ij = f(a_i^* a_j).
Matrix functional_gram(const IdealFunctional& f);

/// Column j = antidual coordinates of A a_j, i.e. (i, j) entry = f(e_i^* a_j).
Matrix value_matrix(const IdealFunctional& f);

/// The induced positive operator of the functional, over the algebra's own
/// normed space; only weighted-l1 algebras map onto a NormedSpace tag.
PartialPositiveOperator induced_operator(const IdealFunctional& f);

/// C_min = sup{ |f(a)|^2 : a in M, f(a^*a) <= 1 }, the representability
/// constant; throws NotRepresentable with a kernel witness when ker G does
/// not annihilate the values. Cross-checked against the ellipsoid oracle.
double representability_check(const IdealFunctional& f,
                              double rtol = kRankRtol);

/// Least M with sup{ |f(x^*a)|^2 : ||x|| <= 1 } <= M f(a^*a). Exact through
/// the extension engine for weighted-l1 algebras; alternating polar/ellipsoid
/// ascent with a certified upper bound on C*-instances.
Interval schwarz_functional_bound(const IdealFunctional& f,
                                  double rtol = kRankRtol);

struct GnsData {
  int H_dim{0};
  Matrix quotient;          // r x k: ideal coefficients -> orthonormal H_A
  Matrix lift;              // k x r: right inverse of quotient
  std::vector<Matrix> pi;   // pi[i] = pi_A(e_i), r x r
  Vector zeta;              // cyclic vector, r
  double C_min{0.0};
  Vector fN;                // minimal representable extension on the basis
  // postcondition residuals
  double star_residual{0.0};
  double mult_residual{0.0};
  double reconstruction_residual{0.0};
  bool cyclic{true};
};
/// GNS construction on the Gram quotient: pi_A(x)[Aa] = [A(xa)], zeta_A the
/// Riesz vector of [Aa] -> f(a), fN = conj(J zeta_A).
GnsData gns(const IdealFunctional& f, double rtol = kRankRtol);

struct MinimalExtension {
  Vector fN;
  double extension_error{0.0};      // max_j |f_N(a_j) - f(a_j)|
  bool representable{false};        // f_N passes the whole-algebra check
  double representable_C{0.0};
  double supformula_error{0.0};     // |f_N(x^*x) - sup-formula oracle|
  double cyclic_identity_error{0.0};
};
/// f_N(e_i) = conj(<J zeta_A | e_i>) with the certificate bundle: extends f,
/// representable on the whole algebra, satisfies the square sup-formula on
/// sampled x, and matches pi_A(x) zeta_A = (J^* o j)(x).
MinimalExtension minimal_extension(const IdealFunctional& f, int samples = 50,
                                   std::uint64_t seed = 20240901);

/// candidate must extend f and be representable on the whole algebra (else
/// BadCandidate); true when f_N(x^*x) <= candidate(x^*x) + tol on samples.
bool verify_functional_minimality(const IdealFunctional& f, const Vector& fN,
                                  const Vector& candidate, int samples = 50,
                                  std::uint64_t seed = 20240901,
                                  double tol = kTol);

/// Representability of an everywhere-defined functional (ideal = algebra).
bool is_representable_total(const StarAlgebra& a, const Vector& functional,
                            double* c_min = nullptr, double rtol = kRankRtol);

/// Left-unit shortcut f_N = conj(A_N e); asserts agreement with the general
/// construction and the equivalence of the two representability criteria.
Vector unital_minimal_extension(const IdealFunctional& f, const Vector& e);

struct ApproxUnitReport {
  std::vector<Vector> extensions;   // conj(A_N e_i) per unit
  std::vector<double> deviations;   // dual-norm distance to f_N
  bool monotone{true};              // nonincreasing within 1e-12 slack
  double final_deviation{0.0};
};
ApproxUnitReport approximate_unit_limit(const IdealFunctional& f,
                                        const std::vector<Vector>& units,
                                        double norm_bound);

struct UnitizationResult {
  StarAlgebra unitization;
  Vector fN;                 // on C + A, coordinate 0 = adjoined unit
  double supformula_error{0.0};
};
/// Minimal representable extension of f transported to the ideal {0} x A of
/// the standard unitization; checks the displayed formula for
/// f_N((lambda, b)^*(lambda, b)) on sampled arguments.
UnitizationResult unitization_extension(const StarAlgebra& a,
                                        const Vector& f_total,
                                        int samples = 30,
                                        std::uint64_t seed = 20240901);

struct CstarNormChain {
  double f_norm{0.0};     // value at the ideal-block identity
  double zeta_sq{0.0};    // ||zeta_A||^2 = C_min
  Interval A_N_norm;      // operator norm of A_N over the C*-norm
  double fN_norm{0.0};    // value at the algebra unit
  bool chain_ok{false};
};
/// ||f|| = ||zeta_A||^2 = ||A_N|| = ||f_N|| on a C*-instance whose ideal is a
/// *-closed block ideal; throws NotCStarInstance otherwise.
CstarNormChain cstar_ideal_norm_check(const IdealFunctional& f);

struct CompletenessBound {
  Interval L;
  bool empty_supremum{false};  // f = 0
};
/// Least L with f(a^*a) <= L sup{ |f(x^*a)|^2 : ||x|| <= 1 } for all a.
CompletenessBound completeness_bound(const StarAlgebra& a,
                                     const Vector& f_total);

/// Functions on a finite set with sup norm (commutative C*-instance),
/// M = D(K), f = the restriction of the discrete measure mu.
IdealFunctional discrete_measure_functional(const RealVector& mu,
                                            const std::vector<int>& K);

struct ScenarioReport {
  double mu_K_norm{0.0};         // ||mu_K|| = mu(K)
  double muKN_norm{0.0};         // ||mu_{K,N}||
  double A_norm{0.0};            // ||A||
  Interval A_N_norm;             // ||A_N||
  bool chain_ok{false};          // the four agree
  double avals_check{0.0};       // max | ||Af|| - mu(|f|) | on samples
  Vector eK_mu;                  // competitor functional e_K.mu
  bool eK_mu_extends{false};
  double eK_mu_norm{0.0};        // mu(e_K)
  double sup_side{0.0};          // sup{|mu(f)| : f in D(K), |f| <= 1}
  bool strict{false};            // sup_side < mu(e_K)
  Vector fN;
};
ScenarioReport discrete_measure_scenario(const RealVector& mu,
                                         const std::vector<int>& K,
                                         const RealVector& eK);

}  // namespace kvn

#endif  // KVN_GNS_HPP
