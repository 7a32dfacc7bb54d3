// Acceptance suite: one [PASS]/[FAIL] line per criterion, exit 1 on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "bqs/errors.h"
#include "bqs/harness.h"
#include "bqs/qstate.h"

using namespace bqs;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

SecurityParams params(std::int64_t n, std::int64_t ell) {
  SecurityParams p;
  p.n = n;
  p.ell = ell;
  return p;
}

std::vector<BitString> all_strings(std::size_t len) {
  std::vector<BitString> out;
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << len); ++v) out.push_back(BitString::from_uint(v, len));
  return out;
}

std::string fmt(const char *f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome ac1() {
  auto t0 = Clock::now();
  const int N = 10000;
  int correct = 0;
  for (int t = 0; t < N; ++t) {
    Rng rng = Rng(1, 0).fork(t);
    auto r = run_bqs_ot(params(64, 4), honest_receiver(), rng, {}, t);
    correct += r.receiver_output->y == r.sender_output.at(r.receiver_output->c);
  }
  double secs = seconds_since(t0);
  return {correct == N && secs < 10.0, fmt("%.0f/%.0f correct in %.2f s", correct, N, secs)};
}

Outcome ac2() {
  Rng rng(2, 0);
  const std::size_t width = 8;
  Labels targets;
  for (std::size_t i = 0; i < width; ++i) targets.push_back("q" + std::to_string(i));
  std::uint64_t matched = 0, matched_agree = 0, mismatched = 0, mismatched_agree = 0;
  while (mismatched < 20000) {
    auto x = BitString::random(width, rng);
    auto b = BasisString::random(width, rng);
    auto m = BasisString::random(width, rng);
    auto out = measure(encode_bb84(x, b), targets, m, rng).outcome;
    for (std::size_t i = 0; i < width; ++i) {
      if (b[i] == m[i]) {
        ++matched;
        matched_agree += out[i] == x[i];
      } else {
        ++mismatched;
        mismatched_agree += out[i] == x[i];
      }
    }
  }
  double rate = double(mismatched_agree) / double(mismatched);
  bool pass = matched_agree == matched && std::abs(rate - 0.5) <= 0.015;
  return {pass, fmt("matching %.6f over %.0f; mismatched %.4f over ", double(matched_agree) / double(matched),
                    double(matched), rate) +
                    std::to_string(mismatched)};
}

Outcome ac3() {
  auto strings = all_strings(4);
  std::size_t pairs = 0, exact = 0;
  for (std::size_t i = 0; i < strings.size(); ++i)
    for (std::size_t j = i + 1; j < strings.size(); ++j) {
      ++pairs;
      // 2^(4*2) seeds; exactly a quarter must collide
      exact += count_colliding_seeds(4, 2, strings[i], strings[j]) == 64;
    }
  return {exact == pairs && pairs == 120, std::to_string(exact) + "/" + std::to_string(pairs) +
                                              " pairs collide on exactly 64 of 256 seeds"};
}

Outcome ac4() {
  auto t0 = Clock::now();
  auto r = verify_lemmas("pa", 200, 4);
  double secs = seconds_since(t0);
  return {r.cases == 200 && r.violations == 0 && secs < 60.0,
          std::to_string(r.violations) + " violations in " + std::to_string(r.cases) + " instances (" +
              std::to_string(r.nontrivial) + " with output length >= 1), min slack " + fmt("%.3g, %.2f s", r.min_slack, secs)};
}

Outcome suite(const std::string &name, std::uint64_t cases, std::uint64_t seed) {
  auto r = verify_lemmas(name, cases, seed);
  return {r.cases == cases && r.violations == 0,
          name + ": " + std::to_string(r.violations) + " violations in " + std::to_string(r.cases) +
              fmt(" instances, min slack %.3g", r.min_slack)};
}

Outcome ac5() {
  auto a = suite("splitting", 1000, 5);
  auto b = suite("splitting-exact", 1000, 5);
  return {a.pass && b.pass, a.detail + "; " + b.detail};
}

Outcome ac6() {
  auto a = suite("chain-rule", 1000, 6);
  auto b = suite("monotonicity", 1000, 6);
  return {a.pass && b.pass, a.detail + "; " + b.detail};
}

Outcome ac7() {
  Rng rng(7, 0);
  int crossings = 0;
  for (int i = 0; i < 20; ++i) {
    double eps = std::exp2(-(1.0 + 59.0 * rng.uniform()));
    double n0 = 8000.0 * std::log2(1.0 / eps);
    bool at = std::abs(uncertainty_bound(n0, eps)) <= 1e-9 * n0;
    bool below = uncertainty_bound(n0 * (1 - 1e-6), eps) < 0;
    bool above = uncertainty_bound(n0 * (1 + 1e-6), eps) > 0;
    crossings += at && below && above;
  }
  const std::int64_t oracle = 47273;  // floor of (R(10^6, 2^-30)) / 8 at 60 digits
  auto got = max_ell(1000000, 0, 0, std::exp2(-30.0), BoundVariant::Main);
  int grid = 0;
  for (int i = 0; i < 10000; ++i) {
    double x = std::min(0.5, std::exp(std::log(1e-9) + (std::log(0.5) - std::log(1e-9)) * (i + 1) / 10000.0));
    grid += check_aux_inequality(x).holds;
  }
  return {crossings == 20 && got == oracle && grid == 10000,
          std::to_string(crossings) + "/20 zero crossings; max_ell " + std::to_string(got) + " (oracle " +
              std::to_string(oracle) + "); inequality on " + std::to_string(grid) + "/10000 grid points"};
}

Outcome ac8() {
  ProtocolOptions legacy;
  legacy.variant = ModelVariant::Legacy;
  auto strategy = epr_teleport_receiver(8, ModelVariant::Legacy);
  const int N = 1000;
  int both = 0;
  for (int t = 0; t < N; ++t) {
    Rng rng = Rng(8, 0).fork(t);
    auto r = run_bqs_ot(params(8, 2), strategy, rng, legacy, t);
    both += r.adversary.guess && *r.adversary.guess == r.sender_output;
  }
  bool rejected = false;
  try {
    epr_teleport_receiver(8, ModelVariant::Refined);
  } catch (const StrategyRejected &) {
    rejected = true;
  }
  return {both == N && rejected,
          fmt("legacy: both strings in %.0f/%.0f trials; refined: ", both, N) + (rejected ? "rejected" : "accepted")};
}

Outcome ac9() {
  const int N = 1000;
  int hits = 0;
  std::size_t qubits = 0;
  for (int t = 0; t < N; ++t) {
    Rng rng = Rng(9, 0).fork(t);
    auto r = run_reflection_pair(params(16, 3), reflection_attacker(), rng, {}, t);
    const auto &y = r.second_receiver_output.y;
    hits += y == r.first_sender_output.x0 || y == r.first_sender_output.x1;
    qubits = std::max(qubits, r.attacker_qubits);
  }
  return {hits == N && qubits == 0, fmt("y in {x0, x1} in %.0f/%.0f trials, %.0f adversary qubits", hits, N,
                                        double(qubits))};
}

Outcome ac10() {
  const int N = 100000;
  int wins = 0;
  for (int t = 0; t < N; ++t) {
    Rng rng = Rng(10, 0).fork(t);
    wins += run_bc(t % 2, 1, 4, rng, binding_attacker(), t).cheat_success;
  }
  double p = 1.0 / 16, f = double(wins) / N, tol = 3 * std::sqrt(p * (1 - p) / N);
  return {std::abs(f - p) <= tol, fmt("cheat frequency %.5f vs 0.0625 +- %.5f", f, tol)};
}

Outcome ac11() {
  bool same = true;
  for (std::size_t ell = 1; ell <= 4; ++ell) same = same && bc_commit_distribution(0, ell) == bc_commit_distribution(1, ell);
  auto d = bc_commit_distribution(0, 4);
  std::ostringstream os;
  for (const auto &[k, v] : d) os << k << ":" << v << " ";
  return {same, "commit message distribution identical for b=0,1 at ell=1..4 (" + os.str() + ")"};
}

Outcome ac12() {
  auto strings = all_strings(2);
  std::size_t runs = 0, correct = 0;
  for (const auto &x0 : strings)
    for (const auto &x1 : strings)
      for (int c = 0; c < 2; ++c)
        for (const auto &p0 : strings)
          for (const auto &p1 : strings)
            for (int cp = 0; cp < 2; ++cp) {
              RotSample rot{{p0, p1}, {cp, cp ? p1 : p0}};
              ++runs;
              correct += ot_from_rot({x0, x1}, c, rot).y == (c ? x1 : x0);
            }
  std::size_t sender_cases = 0, sender_zero = 0;
  for (const auto &p0 : strings)
    for (const auto &p1 : strings)
      for (const auto &k0 : strings)
        for (const auto &k1 : strings) {
          std::vector<std::function<OtStrings(int)>> replies = {
              [&](int) { return OtStrings{k0, k1}; },
              [&](int d) { return OtStrings{k0 ^ (d ? p1 : p0), k1 ^ (d ? p0 : p1)}; },
              [&](int d) { return d ? OtStrings{k1, k0} : OtStrings{k0, k1 ^ p0}; },
          };
          for (const auto &reply : replies) {
            RotSenderAdversary adv{{p0, p1}, reply};
            for (int c = 0; c < 2; ++c) {
              ++sender_cases;
              sender_zero += total_variation(ot_from_rot_real_corrupt_sender(adv, c),
                                             ot_from_rot_ideal_corrupt_sender(adv, c)) == 0;
            }
          }
        }
  std::size_t receiver_cases = 0, receiver_zero = 0;
  for (int cp = 0; cp < 2; ++cp)
    for (const auto &yp : strings)
      for (int d = 0; d < 2; ++d)
        for (const auto &x0 : strings)
          for (const auto &x1 : strings) {
            RotReceiverAdversary adv{{cp, yp}, d};
            ++receiver_cases;
            receiver_zero += total_variation(ot_from_rot_real_corrupt_receiver(adv, {x0, x1}),
                                             ot_from_rot_ideal_corrupt_receiver(adv, {x0, x1})) == 0;
          }
  bool pass = correct == runs && sender_zero == sender_cases && receiver_zero == receiver_cases;
  return {pass, std::to_string(correct) + "/" + std::to_string(runs) + " correct; sender corruption TV=0 in " +
                    std::to_string(sender_zero) + "/" + std::to_string(sender_cases) +
                    "; receiver corruption TV=0 in " + std::to_string(receiver_zero) + "/" +
                    std::to_string(receiver_cases)};
}

Outcome ac13() {
  const int N = 1000;
  int correct = 0;
  double budget = 0;
  for (int t = 0; t < N; ++t) {
    Rng rng = Rng(13, 0).fork(t);
    int b = rng.bit(), a = rng.bit();
    auto r = compose_bc(params(64, 4), b, a, rng, {}, t);
    correct += a == 1 ? r.verifier_output == b : !r.verifier_output.has_value();
    budget = r.error_budget;
  }
  bool pass = correct == N && budget == 6 * std::exp2(-4.0);
  return {pass, fmt("%.0f/%.0f correct; error budget %.4f (6 eps = 0.375)", correct, N, budget)};
}

}  // namespace

int main() {
  struct Criterion {
    const char *name;
    const char *title;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"AC1", "honest BQS-OT correctness", ac1},
      {"AC2", "BB84 statistics", ac2},
      {"AC3", "two-universality", ac3},
      {"AC4", "privacy amplification", ac4},
      {"AC5", "min-entropy splitting", ac5},
      {"AC6", "chain rule and monotonicity", ac6},
      {"AC7", "bounds", ac7},
      {"AC8", "EPR-teleport attack", ac8},
      {"AC9", "reflection attack", ac9},
      {"AC10", "BC binding", ac10},
      {"AC11", "BC hiding", ac11},
      {"AC12", "OT from ROT", ac12},
      {"AC13", "composed BC stack", ac13},
  };
  int failed = 0;
  for (const auto &c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << c.name << " " << c.title << ": " << o.detail << std::endl;
  }
  std::cout << (sizeof criteria / sizeof criteria[0]) - failed << "/" << sizeof criteria / sizeof criteria[0]
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
