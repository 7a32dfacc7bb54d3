#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bqs/adversary.h"
#include "bqs/bits.h"
#include "bqs/bounds.h"
#include "bqs/engine.h"

namespace bqs {

using Json = nlohmann::ordered_json;

/// One experiment. Every field can be set from a `key=value` line; see
/// ExperimentConfig::set for the keys.
struct ExperimentConfig {
  SecurityParams params;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
  std::string scenario = "honest-rot";
  ModelVariant variant = ModelVariant::Refined;
  bool bound_every_round = false;
  /// Receiver strategy for receiver-side scenarios (see make_strategy).
  std::string adversary = "full-measurement";
  /// Sender strategy for sender-corruption: honest, product or epr.
  std::string sender = "honest";
  double delta = 0.01;
  unsigned threads = 1;
  std::string out;

  /// Keys: n ell m beta eps q lambda s trials seed scenario variant
  /// every_round adversary sender delta threads out. Throws
  /// std::invalid_argument for unknown keys or unparsable values.
  void set(const std::string &key, const std::string &value);
  /// Applies "key=value"; blank lines and lines starting with # are skipped.
  void apply_line(const std::string &line);
  void load(std::istream &in);
  void load_file(const std::string &path);
  void validate() const;
  Json resolved() const;
};

/// Registered scenario names.
std::vector<std::string> scenario_names();

/// Strategy by CLI name: honest, full-measurement, full-measurement-fixed,
/// storing (m from params), epr-teleport (n pairs), reflection, binding.
AdversaryStrategy make_strategy(const std::string &name, const SecurityParams &params, ModelVariant variant);

struct Histogram {
  std::map<std::string, std::uint64_t> counts;
  std::uint64_t total = 0;

  void add(const std::string &cell, std::uint64_t k = 1);
  void merge(const Histogram &other);
};

/// 1/2 sum |p_hat - q_hat| over the union of cells.
double empirical_tv(const Histogram &a, const Histogram &b);

/// L1 deviation bound for an empirical distribution over `alphabet` cells
/// from N samples: ||p_hat - p||_1 < sqrt(2 (K ln 2 + ln(1/delta)) / N)
/// with probability at least 1 - delta.
double l1_radius(std::uint64_t alphabet, std::uint64_t samples, double delta);

/// sqrt(ln(2/delta) / (2N)): the Kolmogorov distance radius, valid for a
/// single binary cell.
double dkw_radius(std::uint64_t samples, double delta);

struct DistinguishReport {
  std::string scenario;
  std::uint64_t trials = 0;
  double tv = 0;
  /// With probability >= 1 - delta, |tv - true TV| <= radius.
  double radius = 0;
  double dkw_radius = 0;
  double delta = 0.01;
  std::uint64_t alphabet = 0;
  Histogram real;
  Histogram ideal;
  /// Exact real-vs-ideal distance where the scenario can enumerate it.
  std::optional<double> exact_tv;
  Json extra = Json::object();
  Json config = Json::object();
};

Json to_json(const DistinguishReport &r);

/// Runs `trials` trials of the real and the ideal world of the scenario,
/// each on its own forked stream, optionally across threads. When cfg.out
/// is set, writes a JSONL artifact: a {"config": ...} header, the
/// real-world transcript rows, one Env row per observable and world, and a
/// {"summary": ...} footer. Output is identical for any thread count.
DistinguishReport run_experiment(const ExperimentConfig &cfg);

struct UniformityReport {
  double tv_from_uniform = 0;
  double radius = 0;
  std::uint64_t samples = 0;
  std::size_t length = 0;
};

/// Empirical distance of the sample histogram from uniform on {0,1}^L.
/// Throws std::invalid_argument on an empty set, mixed lengths or L > 24.
UniformityReport uniformity_test(const std::vector<BitString> &samples, double delta = 0.01);

struct SuiteReport {
  std::string suite;
  std::uint64_t cases = 0;
  std::uint64_t violations = 0;
  /// Instances whose preconditions failed; not counted in `cases`.
  std::uint64_t skipped = 0;
  /// Instances with a non-trivial conclusion (for pa: output length >= 1).
  std::uint64_t nontrivial = 0;
  double min_slack = 0;
  std::vector<std::string> failures;
};

Json to_json(const SuiteReport &r);

/// Suites: splitting, splitting-exact, chain-rule, monotonicity, pa.
std::vector<std::string> suite_names();
/// Generates random instances until `cases` of them meet the lemma's
/// preconditions and checks each.
SuiteReport verify_lemmas(const std::string &suite, std::uint64_t cases, std::uint64_t seed);

/// Every bound for the parameters, as printed by the `params` subcommand.
Json params_report(const SecurityParams &p, BoundVariant variant);

}  // namespace bqs
