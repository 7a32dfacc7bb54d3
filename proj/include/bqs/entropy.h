#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "bqs/rng.h"

namespace bqs {

using Rational = boost::multiprecision::cpp_rational;
using VarNames = std::vector<std::string>;

struct Variable {
  std::string name;
  std::uint64_t alphabet;
};

/// A finite joint distribution over named variables with values
/// 0..alphabet-1. Only the support is stored; each outcome is packed into
/// one 64-bit mixed-radix key (first variable most significant), so the
/// product of the alphabet sizes must fit in 64 bits.
///
/// Prob is double for the default mode and Rational for exact evaluation.
template <class Prob>
class BasicJointDistribution {
 public:
  using Entry = std::pair<std::uint64_t, Prob>;

  const std::vector<Variable> &variables() const { return vars_; }
  std::size_t index_of(std::string_view name) const;
  /// Sorted by key, strictly positive probabilities, no duplicate keys.
  const std::vector<Entry> &entries() const { return entries_; }
  std::size_t support_size() const { return entries_.size(); }

  std::uint64_t value(std::uint64_t key, std::size_t var) const {
    return (key / strides_[var]) % vars_[var].alphabet;
  }
  std::vector<std::uint64_t> values(std::uint64_t key) const;
  std::uint64_t key_of(std::span<const std::uint64_t> values) const;
  Prob probability(std::initializer_list<std::uint64_t> values) const;

  /// Marginal over the named variables, in the given order.
  BasicJointDistribution marginal(const VarNames &names) const;

  /// Pushes every outcome through `fn` (values of all variables -> values of
  /// new_vars), merging probability mass.
  BasicJointDistribution transform(
      std::vector<Variable> new_vars,
      const std::function<std::vector<std::uint64_t>(std::span<const std::uint64_t>)> &fn) const;

 private:
  template <class>
  friend class DistributionBuilder;

  BasicJointDistribution() = default;

  std::vector<Variable> vars_;
  std::vector<std::uint64_t> strides_;
  std::vector<Entry> entries_;
};

/// Accumulates (outcome, mass) pairs and produces a validated distribution.
template <class Prob>
class DistributionBuilder {
 public:
  explicit DistributionBuilder(std::vector<Variable> vars);

  DistributionBuilder &add(std::span<const std::uint64_t> values, const Prob &p);
  DistributionBuilder &add(std::initializer_list<std::uint64_t> values, const Prob &p) {
    return add(std::span<const std::uint64_t>(values.begin(), values.size()), p);
  }
  DistributionBuilder &add_key(std::uint64_t key, const Prob &p);
  std::size_t pending() const { return raw_.size(); }

  /// Merges duplicates, drops zero cells and checks that the mass sums to 1
  /// (1e-12 for double, exactly for Rational). With normalize = true the
  /// mass is rescaled to 1 first.
  BasicJointDistribution<Prob> build(bool normalize = false) const;

 private:
  BasicJointDistribution<Prob> proto_;
  std::vector<std::pair<std::uint64_t, Prob>> raw_;
};

using JointDistribution = BasicJointDistribution<double>;
using ExactDistribution = BasicJointDistribution<Rational>;

JointDistribution to_double(const ExactDistribution &d);

/// max over conditioning values y (with P(y) > 0) and targets x of P(x | y).
template <class Prob>
Prob max_conditional_probability(const BasicJointDistribution<Prob> &d, const VarNames &target,
                                 const VarNames &given);

/// Smallest cap t such that removing sum_{x,y} P(y) max(0, P(x|y) - t) <= eps
/// of probability mass brings every P(x, E | y) down to t. This is the
/// optimum over events E with Pr(E) >= 1 - eps; the smooth min-entropy is
/// -log2 of it. Solved exactly on the piecewise-linear removal cost.
template <class Prob>
Prob smooth_max_conditional_probability(const BasicJointDistribution<Prob> &d, const VarNames &target,
                                        const VarNames &given, const Prob &eps);

/// H_min(target | given) in bits.
double min_entropy(const JointDistribution &d, const VarNames &target, const VarNames &given);
/// H^eps_min(target | given) in bits; eps in [0, 1).
double smooth_min_entropy(const JointDistribution &d, const VarNames &target, const VarNames &given,
                          double eps);
double smooth_min_entropy(const ExactDistribution &d, const VarNames &target, const VarNames &given,
                          const Rational &eps);

/// Variable names used by the splitting functions. K and J are single
/// variables; give J alphabet 1 when there is no unknown auxiliary index.
struct SplitVariables {
  std::string x0 = "X0";
  std::string x1 = "X1";
  std::string k = "K";
  std::string j = "J";
};

/// The choice function C = f(X0, X1, K): 1 iff some j has
/// P(X1 = x1 | K = k, J = j) >= 2^{-(alpha - beta)/2}. It never looks at x0,
/// so it is stored per (x1, k).
struct SplitResult {
  std::map<std::pair<std::uint64_t, std::uint64_t>, int> choice;  // (x1, k) -> c
  double threshold;
  double alpha;
  double beta;

  /// Throws std::out_of_range outside the support.
  int c(std::uint64_t x0, std::uint64_t x1, std::uint64_t k) const;
};

/// Requires 0 <= beta < alpha and |J| <= 2^beta.
SplitResult split_choice(const JointDistribution &d, double alpha, double beta,
                         const SplitVariables &vars = {});

/// The same rule for an arbitrary threshold, without the lemma's
/// preconditions. Simulators use this when alpha <= beta at small n.
SplitResult split_with_threshold(const JointDistribution &d, double threshold,
                                 const SplitVariables &vars = {});

struct LemmaReport {
  bool precondition_met = true;
  bool holds = false;
  double lhs = 0;
  double rhs = 0;
  /// lhs - rhs; the lemma holds when slack >= -tolerance.
  double slack = 0;
  std::string note;
};

inline constexpr double kLemmaSlack = 1e-9;

/// Checks H^eps_min(X_{1-C} C | K J) >= (alpha - beta)/2 for C from
/// split_choice. alpha defaults to H^eps_min(X0 X1 | K J).
LemmaReport verify_splitting(const JointDistribution &d, double eps, std::optional<double> alpha,
                             double beta, const SplitVariables &vars = {});

/// Exact counterpart. alpha is passed as the cap 2^-alpha (defaulting to the
/// oracle's exact cap) and beta must be an integer, so both the threshold
/// test P(x1|k,j) >= 2^{-(alpha-beta)/2} and the conclusion are decided by
/// comparing squares of rationals.
LemmaReport verify_splitting_exact(const ExactDistribution &d, const Rational &eps,
                                   std::optional<Rational> alpha_cap, unsigned beta,
                                   const SplitVariables &vars = {});

/// H^{eps+eps'}(X | Y Z) >= H^eps(X Y | Z) - log2|Y| - log2(1/eps'), where
/// |Y| is the product of the declared alphabet sizes of Y.
LemmaReport verify_chain_rule(const JointDistribution &d, const VarNames &x, const VarNames &y,
                              const VarNames &z, double eps, double eps_prime);

/// H^eps(X Y | Z) >= H^eps(X | Z).
LemmaReport verify_monotonicity(const JointDistribution &d, const VarNames &x, const VarNames &y,
                                const VarNames &z, double eps);

/// Random table over `vars`: integer weights in [0, 1000] with a random mix
/// of sparse, skewed and flat shapes, normalized exactly.
ExactDistribution random_exact_distribution(const std::vector<Variable> &vars, Rng &rng);
JointDistribution random_distribution(const std::vector<Variable> &vars, Rng &rng);

/// CSV fixture: a header of outcome columns ("name" or "name:alphabet") and a
/// final probability column; one outcome per row. Alphabets default to
/// max value + 1.
JointDistribution read_distribution_csv(std::istream &in);
JointDistribution load_distribution_csv(const std::string &path);
void write_distribution_csv(std::ostream &out, const JointDistribution &d);

}  // namespace bqs
