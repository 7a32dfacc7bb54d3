// bqs: command-line front end for the protocols, attacks and checks.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bqs/errors.h"
#include "bqs/harness.h"

using namespace bqs;

namespace {

constexpr int kUsage = 1;
constexpr int kInvariant = 2;

// Flags shared by every subcommand; they override --config and BQS_SEED.
struct Common {
  std::string config_file;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;
  std::map<std::string, CLI::Option *> opts;

  void attach(CLI::App *sub, const std::vector<std::string> &keys) {
    sub->add_option("--config", config_file, "key=value configuration file")->check(CLI::ExistingFile);
    sub->add_option("--set", sets, "extra key=value override (repeatable)");
    for (const auto &k : keys) opts[k] = sub->add_option("--" + k, flags[k]);
  }

  ExperimentConfig resolve() const {
    ExperimentConfig cfg;
    if (const char *env = std::getenv("BQS_SEED"); env && *env) cfg.set("seed", env);
    if (!config_file.empty()) cfg.load_file(config_file);
    for (const auto &s : sets) cfg.apply_line(s);
    for (const auto &[k, opt] : opts) {
      if (opt->count() > 0) cfg.set(k, flags.at(k));
    }
    return cfg;
  }
};

void print(const Json &j) { std::cout << j.dump(2) << '\n'; }

void append_transcript(const std::string &path, const Transcript &t, bool first) {
  if (path.empty()) return;
  std::ofstream out(path, first ? std::ios::trunc : std::ios::app);
  if (!out) throw std::runtime_error("cannot write " + path);
  t.write_jsonl(out);
}

void write_header(const std::string &path, const Json &config) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << Json{{"config", config}}.dump() << '\n';
}

BitString bits_or_random(const std::string &text, std::size_t ell, Rng &rng) {
  if (text.empty()) return BitString::random(ell, rng);
  auto b = BitString::from_string(text);
  if (b.size() != ell) throw std::invalid_argument("string '" + text + "' does not have length ell");
  return b;
}

int run_rot(const ExperimentConfig &cfg, const std::string &adversary) {
  cfg.params.validate();
  auto strategy = make_strategy(adversary, cfg.params, cfg.variant);
  ProtocolOptions opt;
  opt.variant = cfg.variant;
  opt.bound_every_round = cfg.bound_every_round;
  write_header(cfg.out, cfg.resolved());
  Rng root(cfg.seed, 0);
  std::uint64_t correct = 0, both = 0;
  Json first;
  bool within = false;
  for (std::uint64_t t = 0; t < cfg.trials; ++t) {
    Rng rng = root.fork(t);
    auto r = run_bqs_ot(cfg.params, strategy, rng, opt, t);
    append_transcript(cfg.out, r.transcript, false);
    within = r.within_proven_bounds;
    if (r.receiver_output && r.receiver_output->y == r.sender_output.at(r.receiver_output->c)) ++correct;
    if (r.adversary.guess && *r.adversary.guess == r.sender_output) ++both;
    if (t == 0) {
      first["s0"] = r.sender_output.x0.to_string();
      first["s1"] = r.sender_output.x1.to_string();
      if (r.receiver_output) {
        first["c"] = r.receiver_output->c;
        first["y"] = r.receiver_output->y.to_string();
      }
    }
  }
  Json j;
  j["config"] = cfg.resolved();
  j["receiver"] = strategy.name;
  j["trials"] = cfg.trials;
  j["correct"] = correct;
  j["guessed_both"] = both;
  j["within_proven_bounds"] = within;
  j["first_trial"] = first;
  print(j);
  return 0;
}

int run_ot(const ExperimentConfig &cfg, const std::string &x0, const std::string &x1, int c) {
  cfg.params.validate();
  auto ell = static_cast<std::size_t>(cfg.params.ell);
  Rng rng(cfg.seed, 0);
  OtStrings x{bits_or_random(x0, ell, rng), bits_or_random(x1, ell, rng)};
  if (c != 0 && c != 1) throw std::invalid_argument("c must be 0 or 1");
  auto r = run_ot_from_rot(x, c, rng);
  write_header(cfg.out, cfg.resolved());
  append_transcript(cfg.out, r.transcript, false);
  Json j;
  j["x0"] = x.x0.to_string();
  j["x1"] = x.x1.to_string();
  j["c"] = c;
  j["d"] = r.d;
  j["m0"] = r.m.x0.to_string();
  j["m1"] = r.m.x1.to_string();
  j["y"] = r.y.to_string();
  j["correct"] = r.y == x.at(c);
  print(j);
  return 0;
}

int run_bc_cmd(const ExperimentConfig &cfg, int b, int a, const std::string &committer) {
  if (cfg.params.ell < 1) throw std::invalid_argument("ell must be at least 1");
  if ((b != 0 && b != 1) || (a != 0 && a != 1)) throw std::invalid_argument("b and a must be 0 or 1");
  AdversaryStrategy who = committer == "binding" ? binding_attacker() : AdversaryStrategy{"honest", Role::Committer};
  if (committer != "binding" && committer != "honest") throw std::invalid_argument("committer: honest or binding");
  Rng root(cfg.seed, 0);
  write_header(cfg.out, cfg.resolved());
  std::uint64_t accepted = 0, cheats = 0;
  Json first;
  for (std::uint64_t t = 0; t < cfg.trials; ++t) {
    Rng rng = root.fork(t);
    auto r = run_bc(b, a, static_cast<std::size_t>(cfg.params.ell), rng, who, t);
    append_transcript(cfg.out, r.transcript, false);
    accepted += r.verifier_output.has_value();
    cheats += r.cheat_success;
    if (t == 0) {
      first["m"] = r.m;
      first["output"] = r.verifier_output ? Json(*r.verifier_output) : Json(nullptr);
    }
  }
  Json j;
  j["b"] = b;
  j["a"] = a;
  j["committer"] = committer;
  j["trials"] = cfg.trials;
  j["accepted"] = accepted;
  j["cheat_success"] = cheats;
  j["cheat_rate"] = double(cheats) / double(cfg.trials);
  j["bc_error"] = bc_error(cfg.params.ell);
  j["first_trial"] = first;
  print(j);
  return 0;
}

int compose_cmd(const ExperimentConfig &cfg, const std::string &inner) {
  cfg.params.validate();
  ComposeOptions co;
  if (inner == "ideal-tor") co.inner = InnerImplementation::IdealTor;
  else if (inner != "bqs-to") throw std::invalid_argument("inner: bqs-to or ideal-tor");
  co.protocol.variant = cfg.variant;
  co.protocol.bound_every_round = cfg.bound_every_round;
  Rng root(cfg.seed, 0);
  write_header(cfg.out, cfg.resolved());
  std::uint64_t correct = 0;
  ComposeResult last;
  for (std::uint64_t t = 0; t < cfg.trials; ++t) {
    Rng rng = root.fork(t);
    int b = rng.bit(), a = rng.bit();
    last = compose_bc(cfg.params, b, a, rng, co, t);
    append_transcript(cfg.out, last.transcript, false);
    correct += a == 1 ? last.verifier_output == b : !last.verifier_output.has_value();
  }
  Json j;
  j["config"] = cfg.resolved();
  j["inner"] = inner;
  j["trials"] = cfg.trials;
  j["correct"] = correct;
  j["eps"] = last.eps;
  j["error_budget"] = last.error_budget;
  j["within_proven_bounds"] = last.within_proven_bounds;
  j["simulator_classical_bits"] = last.simulator_classical_bits;
  j["sender_simulator_qubits"] = last.sender_simulator_qubits;
  j["receiver_simulator_qubits"] = last.receiver_simulator_qubits;
  print(j);
  return 0;
}

int attack_cmd(ExperimentConfig cfg, const std::string &name) {
  cfg.params.validate();
  Json j;
  j["attack"] = name;
  if (name == "reflection") {
    ProtocolOptions opt;
    opt.variant = cfg.variant;
    Rng root(cfg.seed, 0);
    write_header(cfg.out, cfg.resolved());
    std::uint64_t hits = 0;
    std::size_t qubits = 0;
    for (std::uint64_t t = 0; t < cfg.trials; ++t) {
      Rng rng = root.fork(t);
      auto r = run_reflection_pair(cfg.params, reflection_attacker(), rng, opt, t);
      append_transcript(cfg.out, r.transcript, false);
      hits += r.y_in_first;
      qubits = std::max(qubits, r.attacker_qubits);
      if (t == 0) {
        j["x0"] = r.first_sender_output.x0.to_string();
        j["x1"] = r.first_sender_output.x1.to_string();
        j["y"] = r.second_receiver_output.y.to_string();
      }
    }
    j["trials"] = cfg.trials;
    j["y_in_x0_x1"] = hits;
    j["rate"] = double(hits) / double(cfg.trials);
    j["attacker_qubits"] = qubits;
    print(j);
    return 0;
  }
  std::map<std::string, std::string> scenario{{"epr-teleport", "epr-teleport"}, {"binding", "bc-binding"}};
  if (auto it = scenario.find(name); it != scenario.end()) {
    cfg.scenario = it->second;
  } else {
    cfg.scenario = "receiver-corruption";
    cfg.adversary = name;
  }
  auto rep = run_experiment(cfg);
  j["report"] = to_json(rep);
  print(j);
  return 0;
}

int params_cmd(const ExperimentConfig &cfg, const std::string &variant) {
  auto j = params_report(cfg.params, parse_variant(variant));
  print(j);
  if (j["max_ell"].get<std::int64_t>() == 0) {
    std::cerr << "infeasible parameters: no positive ell satisfies the bound\n";
    return kInvariant;
  }
  return 0;
}

int lemmas_cmd(const std::string &suite, std::uint64_t cases, const ExperimentConfig &cfg) {
  std::vector<std::string> suites = suite == "all" ? suite_names() : std::vector<std::string>{suite};
  Json out = Json::array();
  std::uint64_t violations = 0;
  for (const auto &s : suites) {
    auto r = verify_lemmas(s, cases, cfg.seed);
    violations += r.violations;
    out.push_back(to_json(r));
  }
  print(suites.size() == 1 ? out[0] : out);
  return violations == 0 ? 0 : kInvariant;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Bounded-quantum-storage oblivious transfer: protocols, attacks and checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "bqs 0.1.0");

  const std::vector<std::string> proto_keys{"n", "ell", "m", "beta", "eps", "q", "lambda", "s",
                                            "trials", "seed", "variant", "every_round", "threads", "out"};
  std::map<std::string, Common> common;
  std::map<std::string, CLI::App *> subs;
  auto make = [&](const std::string &name, const std::string &help, std::vector<std::string> extra = {}) {
    auto *sub = app.add_subcommand(name, help);
    auto keys = proto_keys;
    keys.insert(keys.end(), extra.begin(), extra.end());
    common[name].attach(sub, keys);
    subs[name] = sub;
    return sub;
  };

  std::string adversary = "honest";
  make("run-rot", "run BQS-OT with a chosen receiver")
      ->add_option("--receiver", adversary, "honest, full-measurement, full-measurement-fixed, storing, epr-teleport");

  std::string x0, x1;
  int c = 0;
  auto *ot = make("run-ot", "run OT built from one randomized OT");
  ot->add_option("--x0", x0, "sender string 0 (random if omitted)");
  ot->add_option("--x1", x1, "sender string 1 (random if omitted)");
  ot->add_option("--c", c, "choice bit");

  int b = 0, a = 1;
  std::string committer = "honest";
  auto *bc = make("run-bc", "commit to a bit and open it");
  bc->add_option("--b", b, "committed bit");
  bc->add_option("--a", a, "1 to open, 0 to abort");
  bc->add_option("--committer", committer, "honest or binding");

  std::string inner = "bqs-to";
  make("compose-bc", "bit commitment over BQS-TO, end to end")
      ->add_option("--inner", inner, "bqs-to or ideal-tor");

  std::string attack = "reflection";
  make("attack", "run an attack and report its success")
      ->add_option("--name", attack, "reflection, epr-teleport, binding, storing, full-measurement")
      ->required();

  std::string bound_variant = "main";
  make("params", "print every bound for the parameters")
      ->add_option("--bound", bound_variant, "main, pure-aux or mixed-aux");

  std::string suite = "all";
  std::uint64_t cases = 1000;
  auto *lem = make("verify-lemmas", "check the entropy and hashing lemmas on random instances");
  lem->add_option("--suite", suite, "splitting, splitting-exact, chain-rule, monotonicity, pa or all");
  lem->add_option("--cases", cases, "instances per suite");

  make("distinguish", "real-versus-ideal experiment for a scenario", {"scenario", "adversary", "sender", "delta"});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  // `params --variant` names a bound; every other subcommand takes a model.
  if (subs["params"]->parsed() && common["params"].opts["variant"]->count() > 0) {
    bound_variant = common["params"].flags["variant"];
    common["params"].opts["variant"]->clear();
  }

  try {
    for (auto &[name, sub] : subs) {
      if (!sub->parsed()) continue;
      auto cfg = common[name].resolve();
      if (name == "run-rot") return run_rot(cfg, adversary);
      if (name == "run-ot") return run_ot(cfg, x0, x1, c);
      if (name == "run-bc") return run_bc_cmd(cfg, b, a, committer);
      if (name == "compose-bc") return compose_cmd(cfg, inner);
      if (name == "attack") return attack_cmd(cfg, attack);
      if (name == "params") return params_cmd(cfg, bound_variant);
      if (name == "verify-lemmas") return lemmas_cmd(suite, cases, cfg);
      if (name == "distinguish") {
        print(to_json(run_experiment(cfg)));
        return 0;
      }
    }
  } catch (const InvariantViolation &e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kInvariant;
  } catch (const std::invalid_argument &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
