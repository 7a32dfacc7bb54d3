#include "bqs/harness.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "bqs/errors.h"
#include "bqs/qstate.h"

namespace bqs {

namespace {

std::string trim(const std::string &s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::uint64_t parse_count(const std::string &key, const std::string &v) {
  std::size_t used = 0;
  unsigned long long out = 0;
  try {
    if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
    out = std::stoull(v, &used, 0);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw std::invalid_argument("bad value for " + key + ": '" + v + "'");
  return out;
}

double parse_real(const std::string &key, const std::string &v) {
  std::size_t used = 0;
  double out = 0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw std::invalid_argument("bad value for " + key + ": '" + v + "'");
  return out;
}

bool parse_flag(const std::string &key, const std::string &v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw std::invalid_argument("bad value for " + key + ": '" + v + "'");
}

std::string bitstr(const BitString &b) { return b.empty() ? "-" : b.to_string(); }

double gaussian(Rng &rng) {
  double u1 = 1.0 - rng.uniform();
  double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Operator ginibre_density(std::size_t qubits, Rng &rng) {
  auto dim = static_cast<Eigen::Index>(std::size_t{1} << qubits);
  Operator g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = Complex(gaussian(rng), gaussian(rng));
  Operator rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

Amplitudes random_qubit(Rng &rng) {
  Amplitudes a(2);
  a[0] = Complex(gaussian(rng), gaussian(rng));
  a[1] = Complex(gaussian(rng), gaussian(rng));
  return a / a.norm();
}

std::uint64_t saturating_pow2(std::uint64_t k) { return k >= 63 ? std::uint64_t{1} << 63 : std::uint64_t{1} << k; }

// One trial outcome per world, plus the real world's transcript rows.
struct TrialRecord {
  std::string real;
  std::string ideal;
  std::string transcript;
};

struct Runner {
  std::uint64_t alphabet = 2;
  std::function<std::string(Rng &, std::uint64_t, std::string *)> real;
  std::function<std::string(Rng &, std::uint64_t)> ideal;
  std::optional<double> exact_tv;
  Json extra = Json::object();
};

void keep(std::string *sink, const Transcript &t) {
  if (sink) *sink = t.to_jsonl();
}

std::string guess_cell(const std::optional<OtStrings> &guess, const OtStrings &truth) {
  int g0 = guess && guess->x0 == truth.x0;
  int g1 = guess && guess->x1 == truth.x1;
  return "g0=" + std::to_string(g0) + " g1=" + std::to_string(g1);
}

std::string bc_out(const std::optional<int> &o) { return o ? std::to_string(*o) : "bot"; }

SenderStrategy make_sender(const std::string &name, const SecurityParams &p, Rng &rng) {
  auto n = static_cast<std::size_t>(p.n), ell = static_cast<std::size_t>(p.ell);
  if (name == "honest") return honest_sender(n, ell, rng);
  if (name == "epr") return epr_sender(n, ell, rng);
  if (name == "product") {
    std::vector<Amplitudes> qubits;
    for (std::size_t i = 0; i < n; ++i) qubits.push_back(random_qubit(rng));
    auto b = BasisString::random(n, rng);
    auto r0 = sample_hash_seed(n, ell, rng);
    auto r1 = sample_hash_seed(n, ell, rng);
    return product_sender(qubits, b, r0, r1);
  }
  throw std::invalid_argument("unknown sender strategy '" + name + "' (honest, product, epr)");
}

Runner make_runner(const ExperimentConfig &cfg, Rng setup) {
  const auto &p = cfg.params;
  auto ell = static_cast<std::size_t>(p.ell);
  ProtocolOptions opt;
  opt.variant = cfg.variant;
  opt.bound_every_round = cfg.bound_every_round;
  Runner r;

  if (cfg.scenario == "honest-rot") {
    r.alphabet = saturating_pow2(2 + 2 * ell);
    r.real = [p, opt](Rng &rng, std::uint64_t t, std::string *sink) {
      auto run = run_bqs_ot(p, honest_receiver(), rng, opt, t);
      keep(sink, run.transcript);
      const auto &ch = *run.receiver_output;
      int ok = ch.y == run.sender_output.at(ch.c);
      return "c=" + std::to_string(ch.c) + " ok=" + std::to_string(ok) + " s0=" + bitstr(run.sender_output.x0) +
             " s1=" + bitstr(run.sender_output.x1);
    };
    r.ideal = [ell](Rng &rng, std::uint64_t) {
      auto s = ideal_rot(ell, rng);
      int ok = s.choice.y == s.strings.at(s.choice.c);
      return "c=" + std::to_string(s.choice.c) + " ok=" + std::to_string(ok) + " s0=" + bitstr(s.strings.x0) +
             " s1=" + bitstr(s.strings.x1);
    };
    return r;
  }

  if (cfg.scenario == "sender-corruption") {
    auto sender = std::make_shared<SenderStrategy>(make_sender(cfg.sender, p, setup));
    r.alphabet = saturating_pow2(1 + ell);
    r.real = [sender, ell](Rng &rng, std::uint64_t t, std::string *sink) {
      auto run = run_bqs_ot_corrupt_sender(*sender, ell, rng, t);
      keep(sink, run.transcript);
      return "c=" + std::to_string(run.receiver_output.c) + " y=" + bitstr(run.receiver_output.y);
    };
    r.ideal = [sender, ell](Rng &rng, std::uint64_t) {
      auto sim = simulate_sender(*sender, ell, rng);
      return "c=" + std::to_string(sim.receiver_output.c) + " y=" + bitstr(sim.receiver_output.y);
    };
    if (p.n <= 12) r.exact_tv = sender_simulation_distance(*sender, ell);
    r.extra["sender"] = sender->name;
    r.extra["simulator_qubits"] = p.n;
    return r;
  }

  if (cfg.scenario == "receiver-corruption") {
    auto strategy = make_strategy(cfg.adversary, p, cfg.variant);
    auto sim = std::make_shared<ReceiverSimulator>(strategy, p);
    r.alphabet = 4;
    r.real = [p, opt, strategy](Rng &rng, std::uint64_t t, std::string *sink) {
      auto run = run_bqs_ot(p, strategy, rng, opt, t);
      keep(sink, run.transcript);
      return guess_cell(run.adversary.guess, run.sender_output);
    };
    r.ideal = [sim](Rng &rng, std::uint64_t) {
      auto s = sim->run(rng);
      return guess_cell(s.adversary.guess, s.sender_output);
    };
    r.extra["adversary"] = strategy.name;
    r.extra["alpha"] = sim->alpha();
    r.extra["threshold"] = sim->threshold();
    r.extra["simulator_path"] = sim->path() == SimulatorPath::Enumerated ? "enumerated" : "structured";
    r.extra["table_rows"] = sim->table_rows();
    r.extra["simulator_qubits"] = strategy.store;
    r.extra["within_proven_bounds"] =
        p.ell <= max_ell(p.n, std::max<std::int64_t>(p.m, static_cast<std::int64_t>(strategy.memory)), p.beta,
                         p.eps, cfg.variant == ModelVariant::Legacy ? BoundVariant::Main : BoundVariant::MixedAux);
    return r;
  }

  if (cfg.scenario == "epr-teleport") {
    auto strategy = epr_teleport_receiver(static_cast<std::size_t>(p.n), cfg.variant,
                                          static_cast<std::size_t>(p.beta));
    r.alphabet = 4;
    r.real = [p, opt, strategy](Rng &rng, std::uint64_t t, std::string *sink) {
      auto run = run_bqs_ot(p, strategy, rng, opt, t);
      keep(sink, run.transcript);
      return guess_cell(run.adversary.guess, run.sender_output);
    };
    // The ideal adversary learns one string from ROT and can only guess
    // the other.
    r.ideal = [ell](Rng &rng, std::uint64_t) {
      OtChoice ch{rng.bit(), BitString::random(ell, rng)};
      auto strings = ideal_rot_corrupt_receiver(ch, ell, rng);
      OtStrings guess = strings;
      BitString other = BitString::random(ell, rng);
      if (ch.c == 0) guess.x1 = other;
      else guess.x0 = other;
      return guess_cell(guess, strings);
    };
    r.extra["pairs"] = p.n;
    r.extra["expected_tv"] = 1.0 - std::exp2(-static_cast<double>(p.ell));
    return r;
  }

  if (cfg.scenario == "reflection") {
    r.alphabet = 2;
    r.real = [p, opt](Rng &rng, std::uint64_t t, std::string *sink) {
      auto run = run_reflection_pair(p, reflection_attacker(), rng, opt, t);
      keep(sink, run.transcript);
      return "in_first=" + std::to_string(int(run.y_in_first));
    };
    r.ideal = [p, opt](Rng &rng, std::uint64_t t) {
      auto run = run_reflection_pair(p, honest_receiver(), rng, opt, t);
      return "in_first=" + std::to_string(int(run.y_in_first));
    };
    return r;
  }

  if (cfg.scenario == "bc-binding") {
    if (ell < 1) throw std::invalid_argument("bc-binding needs ell >= 1");
    r.alphabet = 2;
    r.real = [ell](Rng &rng, std::uint64_t t, std::string *sink) {
      int b = rng.bit();
      auto run = run_bc(b, 1, ell, rng, binding_attacker(), t);
      keep(sink, run.transcript);
      return "success=" + std::to_string(int(run.cheat_success));
    };
    r.ideal = [](Rng &rng, std::uint64_t) {
      IdealBitCommitment bc;
      int b = rng.bit();
      bc.commit(b);
      return "success=" + std::to_string(int(bc.open(1) == 1 - b));
    };
    r.extra["bc_error"] = bc_error(p.ell);
    return r;
  }

  if (cfg.scenario == "composed-bc") {
    if (ell < 1) throw std::invalid_argument("composed-bc needs ell >= 1");
    ComposeOptions co;
    co.protocol = opt;
    r.alphabet = 12;
    r.real = [p, co](Rng &rng, std::uint64_t t, std::string *sink) {
      int b = rng.bit(), a = rng.bit();
      auto run = compose_bc(p, b, a, rng, co, t);
      keep(sink, run.transcript);
      return "b=" + std::to_string(b) + " a=" + std::to_string(a) + " out=" + bc_out(run.verifier_output);
    };
    r.ideal = [](Rng &rng, std::uint64_t) {
      int b = rng.bit(), a = rng.bit();
      IdealBitCommitment bc;
      bc.commit(b);
      return "b=" + std::to_string(b) + " a=" + std::to_string(a) + " out=" + bc_out(bc.open(a));
    };
    double eps = std::exp2(-static_cast<double>(p.ell));
    r.extra["eps"] = eps;
    r.extra["error_budget"] = composed_bc_error(eps);
    r.extra["within_proven_bounds"] = 10.0 * p.m <= ell_budget(p.n, eps) - 8.0 * p.ell;
    return r;
  }

  throw std::invalid_argument("unknown scenario '" + cfg.scenario + "'");
}

void write_artifact(std::ostream &out, const DistinguishReport &rep, const std::vector<TrialRecord> &records) {
  out << Json{{"config", rep.config}}.dump() << '\n';
  for (const auto &rec : records) out << rec.transcript;
  for (std::uint64_t t = 0; t < records.size(); ++t) {
    out << to_json_line({t, 0, "Env", "real", "", "observable " + records[t].real}) << '\n';
    out << to_json_line({t, 0, "Env", "ideal", "", "observable " + records[t].ideal}) << '\n';
  }
  out << Json{{"summary", to_json(rep)}}.dump() << '\n';
}

std::vector<TrialRecord> run_trials(const ExperimentConfig &cfg, const Runner &runner, bool keep_transcripts) {
  std::vector<TrialRecord> out(cfg.trials);
  Rng root(cfg.seed, 0);
  unsigned workers = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(cfg.trials)));
  std::exception_ptr failure;
  std::mutex failure_lock;
  auto work = [&](unsigned w) {
    try {
      for (std::uint64_t t = w; t < cfg.trials; t += workers) {
        Rng real = root.fork(2 * t), ideal = root.fork(2 * t + 1);
        out[t].real = runner.real(real, t, keep_transcripts ? &out[t].transcript : nullptr);
        out[t].ideal = runner.ideal(ideal, t);
      }
    } catch (...) {
      std::lock_guard lock(failure_lock);
      if (!failure) failure = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto &th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace

void ExperimentConfig::set(const std::string &key, const std::string &raw) {
  std::string v = trim(raw);
  auto count = [&] { return static_cast<std::int64_t>(parse_count(key, v)); };
  if (key == "n") params.n = count();
  else if (key == "ell") params.ell = count();
  else if (key == "m") params.m = count();
  else if (key == "beta") params.beta = count();
  else if (key == "q") params.q = count();
  else if (key == "s") params.s = count();
  else if (key == "eps") params.eps = parse_real(key, v);
  else if (key == "lambda") params.lambda = parse_real(key, v);
  else if (key == "trials") trials = parse_count(key, v);
  else if (key == "seed") seed = parse_count(key, v);
  else if (key == "scenario") scenario = v;
  else if (key == "variant") variant = parse_model_variant(v);
  else if (key == "every_round") bound_every_round = parse_flag(key, v);
  else if (key == "adversary") adversary = v;
  else if (key == "sender") sender = v;
  else if (key == "delta") delta = parse_real(key, v);
  else if (key == "threads") threads = static_cast<unsigned>(parse_count(key, v));
  else if (key == "out") out = v;
  else throw std::invalid_argument("unknown config key '" + key + "'");
}

void ExperimentConfig::apply_line(const std::string &line) {
  std::string s = trim(line);
  if (s.empty() || s[0] == '#') return;
  auto eq = s.find('=');
  if (eq == std::string::npos) throw std::invalid_argument("expected key=value, got '" + s + "'");
  set(trim(s.substr(0, eq)), s.substr(eq + 1));
}

void ExperimentConfig::load(std::istream &in) {
  std::string line;
  while (std::getline(in, line)) apply_line(line);
}

void ExperimentConfig::load_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path);
  load(in);
}

void ExperimentConfig::validate() const {
  params.validate();
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  auto names = scenario_names();
  if (std::find(names.begin(), names.end(), scenario) == names.end()) {
    throw std::invalid_argument("unknown scenario '" + scenario + "'");
  }
  if (!(delta > 0 && delta < 1)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (threads < 1) throw std::invalid_argument("threads must be at least 1");
}

Json ExperimentConfig::resolved() const {
  Json j;
  j["n"] = params.n;
  j["ell"] = params.ell;
  j["m"] = params.m;
  j["beta"] = params.beta;
  j["eps"] = params.eps;
  j["q"] = params.q;
  j["lambda"] = params.lambda;
  j["s"] = params.s;
  j["trials"] = trials;
  j["seed"] = seed;
  j["scenario"] = scenario;
  j["variant"] = to_string(variant);
  j["every_round"] = bound_every_round;
  j["adversary"] = adversary;
  j["sender"] = sender;
  j["delta"] = delta;
  return j;
}

std::vector<std::string> scenario_names() {
  return {"honest-rot", "sender-corruption", "receiver-corruption", "epr-teleport",
          "reflection", "bc-binding",        "composed-bc"};
}

AdversaryStrategy make_strategy(const std::string &name, const SecurityParams &params, ModelVariant variant) {
  if (name == "honest") return honest_receiver();
  if (name == "full-measurement" || name == "full-measurement-random") {
    return full_measurement_receiver(BasisRule::Random);
  }
  if (name == "full-measurement-fixed") return full_measurement_receiver(BasisRule::Fixed, 0);
  if (name == "storing") return storing_receiver(static_cast<std::size_t>(params.m));
  if (name == "epr-teleport") {
    return epr_teleport_receiver(static_cast<std::size_t>(params.n), variant, static_cast<std::size_t>(params.beta));
  }
  if (name == "reflection") return reflection_attacker();
  if (name == "binding") return binding_attacker();
  throw std::invalid_argument("unknown strategy '" + name +
                              "' (honest, full-measurement, full-measurement-fixed, storing, epr-teleport, "
                              "reflection, binding)");
}

void Histogram::add(const std::string &cell, std::uint64_t k) {
  counts[cell] += k;
  total += k;
}

void Histogram::merge(const Histogram &other) {
  for (const auto &[cell, k] : other.counts) add(cell, k);
}

double empirical_tv(const Histogram &a, const Histogram &b) {
  if (a.total == 0 || b.total == 0) throw std::invalid_argument("empirical_tv: empty histogram");
  double sum = 0;
  auto ia = a.counts.begin(), ib = b.counts.begin();
  double na = static_cast<double>(a.total), nb = static_cast<double>(b.total);
  while (ia != a.counts.end() || ib != b.counts.end()) {
    if (ib == b.counts.end() || (ia != a.counts.end() && ia->first < ib->first)) {
      sum += ia->second / na;
      ++ia;
    } else if (ia == a.counts.end() || ib->first < ia->first) {
      sum += ib->second / nb;
      ++ib;
    } else {
      sum += std::abs(ia->second / na - ib->second / nb);
      ++ia;
      ++ib;
    }
  }
  return std::min(1.0, 0.5 * sum);
}

double l1_radius(std::uint64_t alphabet, std::uint64_t samples, double delta) {
  if (samples == 0) throw std::invalid_argument("l1_radius: no samples");
  double k = static_cast<double>(std::max<std::uint64_t>(alphabet, 1));
  return std::sqrt(2.0 * (k * std::numbers::ln2 + std::log(1.0 / delta)) / static_cast<double>(samples));
}

double dkw_radius(std::uint64_t samples, double delta) {
  if (samples == 0) throw std::invalid_argument("dkw_radius: no samples");
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(samples)));
}

Json to_json(const DistinguishReport &r) {
  Json j;
  j["scenario"] = r.scenario;
  j["trials"] = r.trials;
  j["tv"] = r.tv;
  j["radius"] = r.radius;
  j["dkw_radius"] = r.dkw_radius;
  j["delta"] = r.delta;
  j["within_radius"] = r.tv <= r.radius;
  j["alphabet"] = r.alphabet;
  j["exact_tv"] = r.exact_tv ? Json(*r.exact_tv) : Json(nullptr);
  Json counts = Json::object();
  for (const auto &[cell, k] : r.real.counts) counts[cell] = Json::array({k, 0});
  for (const auto &[cell, k] : r.ideal.counts) {
    if (!counts.contains(cell)) counts[cell] = Json::array({0, 0});
    counts[cell][1] = k;
  }
  Json sorted = Json::object();
  std::vector<std::string> keys;
  for (auto it = counts.begin(); it != counts.end(); ++it) keys.push_back(it.key());
  std::sort(keys.begin(), keys.end());
  for (const auto &k : keys) sorted[k] = counts[k];
  j["counts"] = sorted;
  j["extra"] = r.extra;
  j["config"] = r.config;
  return j;
}

DistinguishReport run_experiment(const ExperimentConfig &cfg) {
  cfg.validate();
  Rng root(cfg.seed, 0);
  Runner runner = make_runner(cfg, root.fork(~std::uint64_t{0}));
  bool persist = !cfg.out.empty();
  auto records = run_trials(cfg, runner, persist);

  DistinguishReport rep;
  rep.scenario = cfg.scenario;
  rep.trials = cfg.trials;
  rep.delta = cfg.delta;
  rep.alphabet = runner.alphabet;
  for (const auto &rec : records) {
    rep.real.add(rec.real);
    rep.ideal.add(rec.ideal);
  }
  rep.tv = empirical_tv(rep.real, rep.ideal);
  rep.radius = 0.5 * (l1_radius(rep.alphabet, rep.real.total, cfg.delta / 2) +
                      l1_radius(rep.alphabet, rep.ideal.total, cfg.delta / 2));
  rep.dkw_radius = dkw_radius(cfg.trials, cfg.delta);
  rep.exact_tv = runner.exact_tv;
  rep.extra = runner.extra;
  rep.config = cfg.resolved();

  if (persist) {
    std::ofstream out(cfg.out, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + cfg.out);
    write_artifact(out, rep, records);
    if (!out) throw std::runtime_error("write failed: " + cfg.out);
  }
  return rep;
}

UniformityReport uniformity_test(const std::vector<BitString> &samples, double delta) {
  if (samples.empty()) throw std::invalid_argument("uniformity_test: empty sample set");
  std::size_t len = samples.front().size();
  if (len > 24) throw std::invalid_argument("uniformity_test: strings longer than 24 bits");
  std::map<std::uint64_t, std::uint64_t> counts;
  for (const auto &s : samples) {
    if (s.size() != len) throw std::invalid_argument("uniformity_test: mixed lengths");
    ++counts[len == 0 ? 0 : s.to_uint()];
  }
  double n = static_cast<double>(samples.size());
  double cells = std::exp2(static_cast<double>(len));
  double u = 1.0 / cells;
  double sum = 0;
  for (const auto &[v, k] : counts) sum += std::abs(k / n - u);
  sum += (cells - static_cast<double>(counts.size())) * u;
  UniformityReport r;
  r.tv_from_uniform = std::min(1.0, 0.5 * sum);
  r.radius = 0.5 * l1_radius(std::uint64_t{1} << len, samples.size(), delta);
  r.samples = samples.size();
  r.length = len;
  return r;
}

Json to_json(const SuiteReport &r) {
  Json j;
  j["suite"] = r.suite;
  j["cases"] = r.cases;
  j["violations"] = r.violations;
  j["skipped"] = r.skipped;
  j["nontrivial"] = r.nontrivial;
  j["min_slack"] = r.min_slack;
  j["failures"] = r.failures;
  return j;
}

std::vector<std::string> suite_names() { return {"splitting", "splitting-exact", "chain-rule", "monotonicity", "pa"}; }

SuiteReport verify_lemmas(const std::string &suite, std::uint64_t cases, std::uint64_t seed) {
  auto names = suite_names();
  if (std::find(names.begin(), names.end(), suite) == names.end()) {
    throw std::invalid_argument("unknown suite '" + suite + "'");
  }
  SuiteReport rep;
  rep.suite = suite;
  rep.min_slack = std::numeric_limits<double>::infinity();
  Rng rng(seed, 0x5a17e);
  const std::uint64_t max_attempts = 50 * cases + 1000;

  auto tally = [&](const LemmaReport &r, std::uint64_t attempt, bool nontrivial) {
    if (!r.precondition_met) {
      ++rep.skipped;
      return;
    }
    ++rep.cases;
    rep.min_slack = std::min(rep.min_slack, r.slack);
    if (nontrivial) ++rep.nontrivial;
    if (!r.holds) {
      ++rep.violations;
      if (rep.failures.size() < 10) {
        rep.failures.push_back("instance " + std::to_string(attempt) + ": lhs " + std::to_string(r.lhs) + " rhs " +
                               std::to_string(r.rhs));
      }
    }
  };

  for (std::uint64_t attempt = 0; rep.cases < cases; ++attempt) {
    if (attempt >= max_attempts) throw std::runtime_error("verify_lemmas: too many instances failed preconditions");
    Rng inst = rng.fork(attempt);
    if (suite == "splitting") {
      std::uint64_t jn = 1 + inst.below(4);
      auto d = random_distribution(
          {{"X0", 1 + inst.below(8)}, {"X1", 1 + inst.below(8)}, {"K", 1 + inst.below(4)}, {"J", jn}}, inst);
      double eps = 0.2 * inst.uniform() * inst.bit();
      double beta = std::ceil(std::log2(static_cast<double>(jn)));
      tally(verify_splitting(d, eps, std::nullopt, beta), attempt, true);
    } else if (suite == "splitting-exact") {
      std::uint64_t jn = 1 + inst.below(2);
      auto d = random_exact_distribution(
          {{"X0", 1 + inst.below(6)}, {"X1", 1 + inst.below(6)}, {"K", 1 + inst.below(3)}, {"J", jn}}, inst);
      Rational eps(static_cast<long long>(inst.below(21)), 100);
      tally(verify_splitting_exact(d, eps, std::nullopt, jn == 1 ? 0u : 1u), attempt, true);
    } else if (suite == "chain-rule") {
      auto d = random_distribution(
          {{"X", 1 + inst.below(8)}, {"Y", 1 + inst.below(8)}, {"Z", 1 + inst.below(8)}}, inst);
      double eps = 0.001 + 0.3 * inst.uniform(), eps2 = 0.001 + 0.3 * inst.uniform();
      tally(verify_chain_rule(d, {"X"}, {"Y"}, {"Z"}, eps, eps2), attempt, true);
    } else if (suite == "monotonicity") {
      auto d = random_distribution(
          {{"X", 1 + inst.below(8)}, {"Y", 1 + inst.below(8)}, {"Z", 1 + inst.below(8)}}, inst);
      tally(verify_monotonicity(d, {"X"}, {"Y"}, {"Z"}, 0.5 * inst.uniform()), attempt, true);
    } else {
      std::size_t n = 2 + inst.below(5);
      std::uint64_t nz = 1 + inst.below(4);
      std::int64_t q = static_cast<std::int64_t>(inst.below(3));
      // Half the sources are near-flat so that some length survives the
      // 2 log(1/eps) + q penalty at these sizes.
      JointDistribution d = [&] {
        std::vector<Variable> vars{{"X", std::uint64_t{1} << n}, {"Z", nz}};
        if (inst.bit()) return random_distribution(vars, inst);
        DistributionBuilder<double> b(vars);
        for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x)
          for (std::uint64_t z = 0; z < nz; ++z) b.add({x, z}, 0.5 + inst.uniform());
        return b.build(true);
      }();
      double eps = 0.05 + 0.55 * inst.uniform();
      double eps2 = 0.2 * inst.uniform() * inst.bit();
      double h = smooth_min_entropy(d, {"X"}, {"Z"}, eps2);
      auto ell = static_cast<std::size_t>(
          std::min<std::int64_t>(static_cast<std::int64_t>(n), pa_extractable_length(h, q, eps)));
      auto dim = static_cast<Eigen::Index>(std::size_t{1} << q);
      std::vector<std::vector<Operator>> weighted(std::size_t{1} << n,
                                                  std::vector<Operator>(nz, Operator::Zero(dim, dim)));
      for (const auto &[key, prob] : d.entries()) {
        auto x = d.value(key, 0), z = d.value(key, 1);
        weighted[x][z] = prob * ginibre_density(static_cast<std::size_t>(q), inst);
      }
      LemmaReport r;
      r.lhs = eps + 2 * eps2;
      r.rhs = pa_distance_quantum(weighted, n, ell);
      r.slack = r.lhs - r.rhs;
      r.holds = r.slack >= -kLemmaSlack;
      tally(r, attempt, ell >= 1);
    }
  }
  if (rep.cases == 0) rep.min_slack = 0;
  return rep;
}

Json params_report(const SecurityParams &p, BoundVariant variant) {
  p.validate();
  Json j;
  Json in;
  in["n"] = p.n;
  in["ell"] = p.ell;
  in["m"] = p.m;
  in["beta"] = p.beta;
  in["eps"] = p.eps;
  in["q"] = p.q;
  in["lambda"] = p.lambda;
  in["s"] = p.s;
  j["params"] = in;
  j["variant"] = to_string(variant);
  double n = static_cast<double>(p.n);
  j["uncertainty_bound"] = uncertainty_bound(n, p.eps);
  j["ell_budget"] = ell_budget(n, p.eps);
  auto best = max_ell(p.n, p.m, p.beta, p.eps, variant);
  j["max_ell"] = best;
  Json all;
  for (auto v : {BoundVariant::Main, BoundVariant::PureAux, BoundVariant::MixedAux}) {
    all[to_string(v)] = max_ell(p.n, p.m, p.beta, p.eps, v);
  }
  j["max_ell_by_variant"] = all;
  j["feasible"] = best >= 1 && p.ell <= best;
  try {
    j["min_n"] = min_n(std::max<std::int64_t>(p.ell, 1), p.m, p.beta, p.eps, variant);
  } catch (const InfeasibleParameters &) {
    j["min_n"] = nullptr;
  }
  j["zero_crossing_n"] = 8000.0 * std::log2(1.0 / p.eps);
  auto rel = uncertainty_relation(p.lambda, n);
  j["uncertainty_relation"] = {{"lambda", p.lambda}, {"eps", rel.eps}, {"rate", rel.rate}};
  j["proof_lambda"] = proof_lambda(n, p.eps);
  j["pa_extractable_length"] = pa_extractable_length(uncertainty_bound(n, p.eps), p.q, p.eps);
  j["bc_error"] = p.ell >= 1 ? Json(bc_error(p.ell)) : Json(nullptr);
  j["composed_bc_error"] = composed_bc_error(p.eps);
  return j;
}

}  // namespace bqs
