#include "bqs/bounds.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "bqs/errors.h"

namespace bqs {

namespace {

void check_eps(double eps) {
  if (!(eps > 0 && eps < 1)) {
    throw std::invalid_argument("eps must lie in (0, 1)");
  }
}

struct Coefficients {
  double m;
  double beta;
};

Coefficients coefficients(BoundVariant v) {
  switch (v) {
    case BoundVariant::Main:
      return {10, 0};
    case BoundVariant::PureAux:
      return {4, 2};
    case BoundVariant::MixedAux:
      return {4, 6};
  }
  throw std::invalid_argument("unknown bound variant");
}

// 8 l <= R(n) - memory terms
long double headroom(std::int64_t n, std::int64_t m, std::int64_t beta, double eps, BoundVariant v) {
  auto c = coefficients(v);
  long double L = std::log2(1.0L / eps);
  long double nn = static_cast<long double>(n);
  long double r = nn - 20 * std::cbrt(nn * nn * L) - 12 * L - 4;
  return r - c.m * static_cast<long double>(m) - c.beta * static_cast<long double>(beta);
}

}  // namespace

void SecurityParams::validate() const {
  if (n < 1) throw std::invalid_argument("n must be positive");
  if (ell < 0 || m < 0 || beta < 0 || q < 0 || s < 0) {
    throw std::invalid_argument("counts must be non-negative");
  }
  check_eps(eps);
  if (!(lambda > 0 && lambda < 0.5)) {
    throw std::invalid_argument("lambda must lie in (0, 1/2)");
  }
}

BoundVariant parse_variant(std::string_view name) {
  if (name == "main") return BoundVariant::Main;
  if (name == "pure-aux") return BoundVariant::PureAux;
  if (name == "mixed-aux") return BoundVariant::MixedAux;
  throw std::invalid_argument("unknown variant '" + std::string(name) + "' (main, pure-aux, mixed-aux)");
}

std::string to_string(BoundVariant v) {
  switch (v) {
    case BoundVariant::Main:
      return "main";
    case BoundVariant::PureAux:
      return "pure-aux";
    case BoundVariant::MixedAux:
      return "mixed-aux";
  }
  return "?";
}

double uncertainty_bound(double n, double eps) {
  check_eps(eps);
  if (!(n >= 1)) throw std::invalid_argument("n must be at least 1");
  return n / 2 - 10 * std::cbrt(n * n * std::log2(1 / eps));
}

UncertaintyRelation uncertainty_relation(double lambda, double n) {
  if (!(lambda > 0 && lambda < 0.5)) {
    throw std::invalid_argument("lambda must lie in (0, 1/2)");
  }
  if (!(n >= 1)) throw std::invalid_argument("n must be at least 1");
  double d = 2 - std::log2(lambda);
  return {std::exp(-lambda * lambda * n / (32 * d * d)), (0.5 - 2 * lambda) * n};
}

double uncertainty_epsilon(double lambda, double n) {
  return uncertainty_relation(lambda, n).eps;
}

double proof_lambda(double n, double eps) {
  check_eps(eps);
  return 5 * std::cbrt(std::log2(1 / eps) / n);
}

AuxInequalityReport check_aux_inequality(double x) {
  if (!(x > 0 && x <= 0.5)) {
    throw std::invalid_argument("x must lie in (0, 1/2]");
  }
  using std::numbers::e;
  using std::numbers::ln2;
  double c = e * e * e * ln2 * ln2 / 54;
  double d = 2 - std::log2(x);
  AuxInequalityReport r;
  r.lhs = 1 / (d * d);
  r.rhs = c * x;
  r.ratio = r.lhs / r.rhs;
  r.derivative_ratio = (2 / (d * d * d * x * ln2)) / c;
  r.holds = r.lhs >= r.rhs;
  return r;
}

double ell_budget(double n, double eps) {
  check_eps(eps);
  double L = std::log2(1 / eps);
  return n - 20 * std::cbrt(n * n * L) - 12 * L - 4;
}

std::int64_t max_ell(std::int64_t n, std::int64_t m, std::int64_t beta, double eps, BoundVariant variant) {
  check_eps(eps);
  if (n < 1 || m < 0 || beta < 0) {
    throw std::invalid_argument("max_ell: need n >= 1 and m, beta >= 0");
  }
  long double h = headroom(n, m, beta, eps, variant);
  if (h < 0) return 0;
  return static_cast<std::int64_t>(std::floor(h / 8));
}

std::int64_t min_n(std::int64_t ell, std::int64_t m, std::int64_t beta, double eps, BoundVariant variant,
                   std::int64_t cap) {
  check_eps(eps);
  if (ell < 0 || m < 0 || beta < 0) {
    throw std::invalid_argument("min_n: counts must be non-negative");
  }
  auto feasible = [&](std::int64_t n) { return headroom(n, m, beta, eps, variant) >= 8.0L * ell; };
  long double L = std::log2(1.0L / eps);
  auto lo = static_cast<std::int64_t>(std::ceil(std::pow(40.0L / 3, 3) * L));
  lo = std::max<std::int64_t>(lo, 1);
  if (lo > cap || !feasible(cap)) {
    throw InfeasibleParameters("no n <= " + std::to_string(cap) + " satisfies the bound for ell = " +
                               std::to_string(ell));
  }
  if (feasible(lo)) return lo;
  // invariant: !feasible(lo), feasible(hi)
  std::int64_t hi = cap;
  std::vector<std::pair<std::int64_t, long double>> visited{{lo, headroom(lo, m, beta, eps, variant)},
                                                            {hi, headroom(hi, m, beta, eps, variant)}};
  while (hi - lo > 1) {
    std::int64_t mid = lo + (hi - lo) / 2;
    visited.emplace_back(mid, headroom(mid, m, beta, eps, variant));
    if (feasible(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  std::sort(visited.begin(), visited.end());
  for (std::size_t i = 1; i < visited.size(); ++i) {
    if (visited[i].second < visited[i - 1].second) {
      throw std::logic_error("min_n: bound is not increasing in n on the search range");
    }
  }
  return hi;
}

double bc_error(std::int64_t ell) {
  if (ell < 1) throw std::invalid_argument("bc_error: ell must be at least 1");
  return std::ldexp(1.0, -static_cast<int>(std::min<std::int64_t>(ell, 2000)));
}

double composed_bc_error(double eps) {
  check_eps(eps);
  return 6 * eps;
}

}  // namespace bqs
