#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace bqs {

/// Parameters shared by the protocols and bounds. Counts are bits or qubits.
struct SecurityParams {
  std::int64_t n = 64;       // qubits sent
  std::int64_t ell = 4;      // output string length
  std::int64_t m = 0;        // adversary quantum memory
  std::int64_t beta = 0;     // auxiliary-input qubits
  double eps = 0.0625;       // error parameter, (0, 1)
  std::int64_t q = 0;        // side-information qubits
  double lambda = 0.25;      // uncertainty parameter, (0, 1/2)
  std::int64_t s = 0;        // simulator memory (measured, reported)

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

/// Which trade-off between l, m and beta is used.
///   main:      8l + 10m       <= R(n, eps)
///   pure-aux:  8l + 4m + 2beta <= R(n, eps)
///   mixed-aux: 8l + 4m + 6beta <= R(n, eps)
/// with R(n, eps) = n - 20 cbrt(n^2 log2(1/eps)) - 12 log2(1/eps) - 4.
enum class BoundVariant { Main, PureAux, MixedAux };

BoundVariant parse_variant(std::string_view name);
std::string to_string(BoundVariant v);

/// n/2 - 10 cbrt(n^2 log2(1/eps)). Zero exactly at n = 8000 log2(1/eps).
double uncertainty_bound(double n, double eps);

struct UncertaintyRelation {
  double eps;   // exp(-lambda^2 n / (32 (2 - log2 lambda)^2)), natural exp
  double rate;  // (1/2 - 2 lambda) n
};

/// Requires 0 < lambda < 1/2 and n >= 1.
UncertaintyRelation uncertainty_relation(double lambda, double n);
double uncertainty_epsilon(double lambda, double n);

/// The lambda that turns the relation into the entropy bound for a target
/// eps: 5 cbrt(log2(1/eps) / n).
double proof_lambda(double n, double eps);

struct AuxInequalityReport {
  bool holds;
  double lhs;  // (2 - log2 x)^-2
  double rhs;  // e^3 ln(2)^2 / 54 * x
  double ratio;
  /// d lhs/dx over d rhs/dx; equals 1 at x = 4/e^3.
  double derivative_ratio;
};

/// Requires 0 < x <= 1/2.
AuxInequalityReport check_aux_inequality(double x);

/// R(n, eps) above.
double ell_budget(double n, double eps);

/// Largest l >= 0 satisfying the variant's inequality, or 0 when none does.
std::int64_t max_ell(std::int64_t n, std::int64_t m, std::int64_t beta, double eps, BoundVariant variant);

inline constexpr std::int64_t kMinNCap = 1'000'000'000;

/// Smallest n for which the variant's inequality admits l, i.e.
/// 8l + (memory terms) <= R(n, eps). Throws InfeasibleParameters if no n up
/// to `cap` works. R is increasing for n >= (40/3)^3 log2(1/eps); the search
/// starts there and checks monotonicity at every point it visits.
std::int64_t min_n(std::int64_t ell, std::int64_t m, std::int64_t beta, double eps, BoundVariant variant,
                   std::int64_t cap = kMinNCap);

/// 2^-ell for OT-to-BC. Requires ell >= 1.
double bc_error(std::int64_t ell);

/// Error of BC built on BQS-OT with ell = log2(1/eps): 6 eps.
double composed_bc_error(double eps);

}  // namespace bqs
