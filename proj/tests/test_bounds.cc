#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "bqs/bounds.h"
#include "bqs/errors.h"
#include "bqs/rng.h"

using namespace bqs;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

// 50-digit evaluation of n - 20 cbrt(n^2 L) - 12 L - 4 with L = log2(1/eps).
Big big_budget(std::int64_t n, const Big &L) {
  Big nn = n;
  return nn - 20 * boost::multiprecision::cbrt(nn * nn * L) - 12 * L - 4;
}

}  // namespace

TEST(UncertaintyBound, BoundaryAtEightThousand) {
  EXPECT_DOUBLE_EQ(uncertainty_bound(8000, 0.5), 0.0);
  EXPECT_GT(uncertainty_bound(8001, 0.5), 0.0);
  EXPECT_LT(uncertainty_bound(7999, 0.5), 0.0);
}

TEST(UncertaintyBound, MillionQubits) {
  Big n = 1000000;
  Big oracle = n / 2 - 10 * boost::multiprecision::cbrt(n * n * 30);
  double v = uncertainty_bound(1e6, std::ldexp(1.0, -30));
  EXPECT_NEAR(v, static_cast<double>(oracle), 1e-7);
  EXPECT_NEAR(v, 189276.7494046141, 1e-7);
}

TEST(UncertaintyBound, SignChangeAtBoundaryForRandomEps) {
  Rng rng(50, 0);
  for (int t = 0; t < 20; ++t) {
    double eps = std::exp2(-(0.5 + 40 * rng.uniform()));
    double L = std::log2(1 / eps);
    double nstar = 8000 * L;
    auto below = std::floor(nstar), above = below + 1;
    if (below == nstar) below -= 1;
    EXPECT_LE(uncertainty_bound(below, eps), 0.0);
    EXPECT_GT(uncertainty_bound(above, eps), 0.0);
    EXPECT_NEAR(uncertainty_bound(nstar, eps), 0.0, 1e-9 * nstar);
  }
}

TEST(UncertaintyEpsilon, Examples) {
  EXPECT_NEAR(uncertainty_epsilon(0.25, 8192), std::exp(-1.0), 1e-12);
  EXPECT_NEAR(uncertainty_relation(0.25, 8192).rate, 0.0, 1e-12);
  EXPECT_GT(uncertainty_epsilon(1e-6, 100), 1 - 1e-9);
  double prev = 1;
  for (double n = 1; n < 1e7; n *= 3) {
    double e = uncertainty_epsilon(0.1, n);
    EXPECT_LT(e, prev);
    prev = e;
  }
  EXPECT_THROW(uncertainty_epsilon(0.5, 10), std::invalid_argument);
  EXPECT_THROW(uncertainty_epsilon(0.0, 10), std::invalid_argument);
}

TEST(UncertaintyEpsilon, ProofLambdaMeetsTargetEps) {
  Rng rng(51, 0);
  int checked = 0;
  while (checked < 20) {
    double eps = std::exp2(-(1 + 60 * rng.uniform()));
    double n = std::exp(std::log(1e3) + rng.uniform() * std::log(1e9));
    double lambda = proof_lambda(n, eps);
    if (!(lambda < 0.5)) continue;  // the relation is only stated for lambda < 1/2
    EXPECT_LE(uncertainty_epsilon(lambda, n), eps) << "eps " << eps << " n " << n;
    ++checked;
  }
}

TEST(AuxInequality, Examples) {
  EXPECT_TRUE(check_aux_inequality(0.5).holds);
  auto x = 4 / std::exp(3.0);
  auto r = check_aux_inequality(x);
  EXPECT_TRUE(r.holds);
  EXPECT_NEAR(r.derivative_ratio, 1.0, 1e-9);
  EXPECT_NEAR(r.ratio, 1.5, 1e-9);
  auto tiny = check_aux_inequality(1e-6);
  EXPECT_TRUE(tiny.holds);
  EXPECT_GT(tiny.ratio, 1000);
  EXPECT_THROW(check_aux_inequality(0.0), std::invalid_argument);
  EXPECT_THROW(check_aux_inequality(0.6), std::invalid_argument);
}

TEST(AuxInequality, HoldsOnGrid) {
  for (int i = 0; i < 10000; ++i) {
    // log-spaced from 1e-9 to 0.5
    double x = std::exp(std::log(1e-9) + (std::log(0.5) - std::log(1e-9)) * (i + 1) / 10000.0);
    x = std::min(x, 0.5);
    ASSERT_TRUE(check_aux_inequality(x).holds) << x;
  }
}

TEST(MaxEll, Examples) {
  EXPECT_EQ(max_ell(8000, 0, 0, 0.5, BoundVariant::Main), 0);
  double eps = std::ldexp(1.0, -30);
  Big oracle = big_budget(1000000, 30) / 8;
  auto frozen = static_cast<std::int64_t>(boost::multiprecision::floor(oracle));
  EXPECT_EQ(frozen, 47273);
  EXPECT_EQ(max_ell(1000000, 0, 0, eps, BoundVariant::Main), frozen);
  // 10m = 4m + 6beta when beta = m
  for (std::int64_t m : {0, 5, 100, 1000}) {
    EXPECT_EQ(max_ell(1000000, m, m, eps, BoundVariant::MixedAux), max_ell(1000000, m, 0, eps, BoundVariant::Main));
  }
}

TEST(MaxEll, AgreesWithHighPrecisionOnRandomInputs) {
  Rng rng(52, 0);
  for (int t = 0; t < 200; ++t) {
    std::int64_t n = 1000 + static_cast<std::int64_t>(rng.below(100000000));
    std::int64_t m = static_cast<std::int64_t>(rng.below(1000));
    std::int64_t L = 1 + static_cast<std::int64_t>(rng.below(60));
    Big h = big_budget(n, L) - 10 * m;
    std::int64_t expect = h < 0 ? 0 : static_cast<std::int64_t>(boost::multiprecision::floor(h / 8));
    EXPECT_EQ(max_ell(n, m, 0, std::ldexp(1.0, -static_cast<int>(L)), BoundVariant::Main), expect);
  }
}

TEST(MaxEll, Monotonicity) {
  Rng rng(53, 0);
  for (int t = 0; t < 100; ++t) {
    std::int64_t n = 10000 + static_cast<std::int64_t>(rng.below(10000000));
    std::int64_t m = static_cast<std::int64_t>(rng.below(500)), beta = static_cast<std::int64_t>(rng.below(500));
    double eps = std::exp2(-(1 + 40 * rng.uniform()));
    for (auto v : {BoundVariant::Main, BoundVariant::PureAux, BoundVariant::MixedAux}) {
      auto base = max_ell(n, m, beta, eps, v);
      EXPECT_GE(max_ell(n + 1000, m, beta, eps, v), base);
      EXPECT_LE(max_ell(n, m + 10, beta, eps, v), base);
      EXPECT_LE(max_ell(n, m, beta + 10, eps, v), base);
      EXPECT_LE(max_ell(n, m, beta, eps / 4, v), base);
    }
  }
}

TEST(MaxEll, RejectsBadInput) {
  EXPECT_THROW(max_ell(100, 0, 0, 1.0, BoundVariant::Main), std::invalid_argument);
  EXPECT_THROW(parse_variant("other"), std::invalid_argument);
  EXPECT_EQ(parse_variant("pure-aux"), BoundVariant::PureAux);
  EXPECT_EQ(to_string(BoundVariant::MixedAux), "mixed-aux");
}

TEST(MinN, InvertsMaxEll) {
  double eps = std::ldexp(1.0, -30);
  auto n0 = min_n(0, 0, 0, eps, BoundVariant::Main);
  EXPECT_GE(ell_budget(static_cast<double>(n0), eps), 0.0);
  EXPECT_LT(ell_budget(static_cast<double>(n0 - 1), eps), 0.0);
  EXPECT_LE(min_n(47273, 0, 0, eps, BoundVariant::Main), 1000000);
  EXPECT_GT(min_n(47274, 0, 0, eps, BoundVariant::Main), 1000000);
  Rng rng(54, 0);
  for (int t = 0; t < 50; ++t) {
    std::int64_t ell = static_cast<std::int64_t>(rng.below(10000)), m = static_cast<std::int64_t>(rng.below(100));
    double e = std::exp2(-(1 + 30 * rng.uniform()));
    auto v = static_cast<BoundVariant>(rng.below(3));
    auto n = min_n(ell, m, m, e, v);
    EXPECT_GE(max_ell(n, m, m, e, v), ell);
    if (n > 1) EXPECT_LT(max_ell(n - 1, m, m, e, v) , ell + (ell == 0 ? 1 : 0));
  }
  EXPECT_THROW(min_n(1000000000, 0, 0, eps, BoundVariant::Main), InfeasibleParameters);
}

TEST(BcError, Values) {
  EXPECT_DOUBLE_EQ(bc_error(1), 0.5);
  EXPECT_DOUBLE_EQ(bc_error(4), 0.0625);
  EXPECT_DOUBLE_EQ(composed_bc_error(std::ldexp(1.0, -10)), 0.005859375);
  EXPECT_THROW(bc_error(0), std::invalid_argument);
}

TEST(SecurityParams, Validation) {
  SecurityParams p;
  EXPECT_NO_THROW(p.validate());
  p.eps = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.lambda = 0.5;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.m = -1;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}
