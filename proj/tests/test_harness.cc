#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bqs/errors.h"
#include "bqs/harness.h"

using namespace bqs;

namespace {

ExperimentConfig config(const std::string &scenario, std::int64_t n, std::int64_t ell, std::uint64_t trials,
                        std::uint64_t seed = 1) {
  ExperimentConfig c;
  c.scenario = scenario;
  c.params.n = n;
  c.params.ell = ell;
  c.trials = trials;
  c.seed = seed;
  return c;
}

std::string slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string temp_path(const std::string &name) {
  return (std::filesystem::temp_directory_path() / ("bqs_harness_" + name)).string();
}

}  // namespace

TEST(Config, KeyValueLines) {
  ExperimentConfig c;
  std::istringstream in("# comment\n\nn = 12\nell=3\neps=0.125\nscenario=reflection\nvariant=legacy\n"
                        "every_round=true\ntrials=50\nseed=0x10\n");
  c.load(in);
  EXPECT_EQ(c.params.n, 12);
  EXPECT_EQ(c.params.ell, 3);
  EXPECT_DOUBLE_EQ(c.params.eps, 0.125);
  EXPECT_EQ(c.scenario, "reflection");
  EXPECT_EQ(c.variant, ModelVariant::Legacy);
  EXPECT_TRUE(c.bound_every_round);
  EXPECT_EQ(c.trials, 50u);
  EXPECT_EQ(c.seed, 16u);
  auto j = c.resolved();
  EXPECT_EQ(j["variant"], "legacy");
  EXPECT_EQ(j["n"], 12);
  EXPECT_FALSE(j.contains("threads"));
}

TEST(Config, Rejections) {
  ExperimentConfig c;
  EXPECT_THROW(c.set("nope", "1"), std::invalid_argument);
  EXPECT_THROW(c.set("n", "12x"), std::invalid_argument);
  EXPECT_THROW(c.set("n", "-3"), std::invalid_argument);
  EXPECT_THROW(c.set("every_round", "maybe"), std::invalid_argument);
  EXPECT_THROW(c.apply_line("n 12"), std::invalid_argument);
  c.trials = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.trials = 1;
  c.scenario = "unregistered";
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_THROW(c.load_file("/nonexistent/config.txt"), std::runtime_error);
}

TEST(Statistics, EmpiricalTv) {
  Histogram a, b;
  a.add("x", 3);
  a.add("y", 1);
  b.add("y", 2);
  b.add("z", 2);
  // |3/4 - 0| + |1/4 - 1/2| + |0 - 1/2| = 1.5
  EXPECT_DOUBLE_EQ(empirical_tv(a, b), 0.75);
  EXPECT_DOUBLE_EQ(empirical_tv(a, a), 0.0);
  Histogram c;
  c.merge(a);
  c.merge(a);
  EXPECT_EQ(c.total, 8u);
  EXPECT_DOUBLE_EQ(empirical_tv(a, c), 0.0);
}

TEST(Statistics, RadiiShrinkWithSamples) {
  EXPECT_NEAR(dkw_radius(10000, 0.01), std::sqrt(std::log(200.0) / 20000.0), 1e-15);
  EXPECT_LT(dkw_radius(20000, 0.01), dkw_radius(10000, 0.01));
  EXPECT_LT(l1_radius(16, 20000, 0.01), l1_radius(16, 10000, 0.01));
  EXPECT_GT(l1_radius(64, 10000, 0.01), l1_radius(4, 10000, 0.01));
  EXPECT_THROW(dkw_radius(0, 0.01), std::invalid_argument);
}

TEST(Uniformity, FairCoinsWithinRadius) {
  Rng rng(1, 0);
  std::vector<BitString> s;
  for (int i = 0; i < 10000; ++i) s.push_back(BitString::random(1, rng));
  auto r = uniformity_test(s);
  EXPECT_LE(r.tv_from_uniform, r.radius);
  EXPECT_EQ(r.samples, 10000u);
}

TEST(Uniformity, ConstantIsHalfAway) {
  std::vector<BitString> s(500, BitString{1});
  EXPECT_DOUBLE_EQ(uniformity_test(s).tv_from_uniform, 0.5);
  std::vector<BitString> t(500, BitString{0, 1});
  EXPECT_DOUBLE_EQ(uniformity_test(t).tv_from_uniform, 0.75);
}

TEST(Uniformity, Errors) {
  EXPECT_THROW(uniformity_test({}), std::invalid_argument);
  EXPECT_THROW(uniformity_test({BitString{0}, BitString{0, 1}}), std::invalid_argument);
}

TEST(Uniformity, UnchosenStringOfHonestRuns) {
  SecurityParams p;
  p.n = 32;
  p.ell = 1;
  std::vector<BitString> s;
  for (int i = 0; i < 10000; ++i) {
    Rng rng(2, i);
    auto r = run_bqs_ot(p, honest_receiver(), rng);
    s.push_back(r.sender_output.at(1 - r.receiver_output->c));
  }
  auto u = uniformity_test(s);
  EXPECT_LE(u.tv_from_uniform, u.radius);
}

TEST(Experiment, HonestRotWithinRadius) {
  auto rep = run_experiment(config("honest-rot", 32, 2, 10000, 3));
  EXPECT_LE(rep.tv, rep.radius);
  EXPECT_EQ(rep.real.total, 10000u);
  for (const auto &[cell, k] : rep.real.counts) EXPECT_NE(cell.find("ok=1"), std::string::npos) << cell;
  EXPECT_EQ(rep.alphabet, 64u);
}

TEST(Experiment, CalibrationOnIdenticalWorlds) {
  // Both sides honest: the true distance is 0, so the radius should cover
  // the estimate in at least 99 of 100 repetitions.
  int covered = 0;
  for (int rep = 0; rep < 100; ++rep) {
    auto cfg = config("honest-rot", 16, 1, 1000, 100 + rep);
    auto r = run_experiment(cfg);
    covered += r.tv <= r.radius;
  }
  EXPECT_GE(covered, 99);
}

TEST(Experiment, SenderCorruptionExactlyZero) {
  for (std::string s : {"honest", "product", "epr"}) {
    auto cfg = config("sender-corruption", 4, 1, 2000, 4);
    cfg.sender = s;
    auto rep = run_experiment(cfg);
    ASSERT_TRUE(rep.exact_tv) << s;
    EXPECT_NEAR(*rep.exact_tv, 0.0, 1e-9) << s;
    EXPECT_LE(rep.tv, rep.radius) << s;
  }
}

TEST(Experiment, ReceiverCorruptionFullMeasurement) {
  auto cfg = config("receiver-corruption", 6, 1, 4000, 5);
  auto rep = run_experiment(cfg);
  EXPECT_EQ(rep.extra["simulator_path"], "enumerated");
  EXPECT_FALSE(rep.extra["within_proven_bounds"].get<bool>());
  EXPECT_GE(rep.tv, 0.0);
  EXPECT_LE(rep.tv, 1.0);
}

TEST(Experiment, EprTeleportDistinguishes) {
  auto cfg = config("epr-teleport", 8, 2, 2000, 6);
  cfg.variant = ModelVariant::Legacy;
  auto rep = run_experiment(cfg);
  EXPECT_NEAR(rep.tv, 0.75, rep.radius);
  EXPECT_EQ(rep.real.counts.at("g0=1 g1=1"), 2000u);
  cfg.variant = ModelVariant::Refined;
  EXPECT_THROW(run_experiment(cfg), StrategyRejected);
}

TEST(Experiment, ReflectionAndBinding) {
  auto refl = run_experiment(config("reflection", 16, 3, 300, 7));
  EXPECT_EQ(refl.real.counts.at("in_first=1"), 300u);
  EXPECT_GT(refl.tv, 0.7);
  auto bind = run_experiment(config("bc-binding", 8, 2, 4000, 8));
  EXPECT_NEAR(bind.tv, 0.25, 3 * std::sqrt(0.25 * 0.75 / 4000));
}

TEST(Experiment, ComposedBcMatchesIdeal) {
  auto rep = run_experiment(config("composed-bc", 32, 2, 2000, 9));
  EXPECT_LE(rep.tv, rep.radius);
  EXPECT_DOUBLE_EQ(rep.extra["error_budget"].get<double>(), 6 * 0.25);
}

TEST(Experiment, ReplayIsByteIdentical) {
  auto a = temp_path("a.jsonl"), b = temp_path("b.jsonl"), c = temp_path("c.jsonl");
  auto cfg = config("honest-rot", 16, 2, 200, 10);
  cfg.out = a;
  run_experiment(cfg);
  cfg.out = b;
  run_experiment(cfg);
  cfg.out = c;
  cfg.threads = 4;
  run_experiment(cfg);
  auto sa = slurp(a);
  EXPECT_FALSE(sa.empty());
  EXPECT_EQ(sa, slurp(b));
  EXPECT_EQ(sa, slurp(c));

  std::istringstream lines(sa);
  std::string line;
  std::getline(lines, line);
  EXPECT_TRUE(Json::parse(line).contains("config"));
  std::size_t rows = 0, env = 0;
  std::string last;
  while (std::getline(lines, line)) {
    last = line;
    if (line.rfind("{\"summary\"", 0) == 0) break;
    auto e = parse_json_line(line);
    ++rows;
    env += e.channel == "Env";
  }
  EXPECT_EQ(env, 400u);
  EXPECT_GT(rows, env);
  EXPECT_TRUE(Json::parse(last).contains("summary"));
  for (const auto &p : {a, b, c}) std::filesystem::remove(p);
}

TEST(Experiment, UnwritableOutput) {
  auto cfg = config("reflection", 8, 1, 2);
  cfg.out = "/nonexistent/dir/out.jsonl";
  EXPECT_THROW(run_experiment(cfg), std::runtime_error);
}

TEST(Strategies, ByName) {
  SecurityParams p;
  p.n = 8;
  p.m = 3;
  EXPECT_EQ(make_strategy("storing", p, ModelVariant::Refined).store, 3u);
  EXPECT_EQ(make_strategy("honest", p, ModelVariant::Refined).kind, StrategyKind::Honest);
  EXPECT_THROW(make_strategy("epr-teleport", p, ModelVariant::Refined), StrategyRejected);
  EXPECT_NO_THROW(make_strategy("epr-teleport", p, ModelVariant::Legacy));
  EXPECT_THROW(make_strategy("unknown", p, ModelVariant::Refined), std::invalid_argument);
}

TEST(Lemmas, SuitesHaveNoViolations) {
  for (const auto &suite : suite_names()) {
    auto r = verify_lemmas(suite, suite == "pa" ? 40 : 200, 7);
    EXPECT_EQ(r.violations, 0u) << suite;
    EXPECT_EQ(r.cases, suite == "pa" ? 40u : 200u) << suite;
    EXPECT_GE(r.min_slack, -kLemmaSlack) << suite;
  }
  EXPECT_GT(verify_lemmas("pa", 100, 8).nontrivial, 5u);
  EXPECT_THROW(verify_lemmas("other", 1, 1), std::invalid_argument);
}

TEST(Lemmas, DeterministicPerSeed) {
  auto a = verify_lemmas("splitting", 50, 3), b = verify_lemmas("splitting", 50, 3);
  EXPECT_EQ(a.skipped, b.skipped);
  EXPECT_DOUBLE_EQ(a.min_slack, b.min_slack);
}

TEST(Params, Report) {
  SecurityParams p;
  p.n = 1000000;
  p.m = 0;
  p.eps = 2e-9;
  auto j = params_report(p, BoundVariant::Main);
  EXPECT_EQ(j["max_ell"], max_ell(p.n, 0, 0, p.eps, BoundVariant::Main));
  EXPECT_GT(j["max_ell"].get<std::int64_t>(), 0);
  EXPECT_TRUE(j["feasible"].get<bool>());
  p.n = 64;
  auto small = params_report(p, BoundVariant::Main);
  EXPECT_EQ(small["max_ell"], 0);
  EXPECT_FALSE(small["feasible"].get<bool>());
}
