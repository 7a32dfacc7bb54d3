#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bqs/bits.h"
#include "bqs/hashpa.h"
#include "bqs/qstate.h"

namespace bqs {

enum class Role { Sender, Receiver, Committer, Verifier };

/// Legacy: the memory bound is applied once (before receiver step 3) and
/// auxiliary quantum input is unbounded. Refined: additionally, at most beta
/// qubits of auxiliary input are held before step 1.
enum class ModelVariant { Legacy, Refined };

ModelVariant parse_model_variant(const std::string &name);
std::string to_string(ModelVariant v);
std::string to_string(Role r);

enum class BasisRule { Random, Fixed };

enum class StrategyKind {
  Honest,        // follows the protocol
  Measure,       // measures on arrival, stores only classical bits
  Store,         // keeps `store` qubits until the bases are revealed
  EprTeleport,   // teleports every qubit into the environment
  Reflect,       // returns qubits unmeasured in a role-swapped twin instance
  BindingCheat,  // opens the other bit with a guessed string
};

/// A declarative description of a (possibly dishonest) player. The engine
/// interprets it; nothing here runs code on its own, so simulators can
/// enumerate the distribution a strategy induces.
struct AdversaryStrategy {
  std::string name;
  Role role = Role::Receiver;
  StrategyKind kind = StrategyKind::Honest;
  /// Declared quantum memory m, checked at every enforcement point.
  std::size_t memory = 0;
  /// Qubits of auxiliary input held before step 1 (entangled with the
  /// environment for the EPR attack).
  std::size_t aux_qubits = 0;
  BasisRule basis_rule = BasisRule::Random;
  int fixed_basis = 0;
  /// Leading qubits kept unmeasured until (b, r0, r1) arrives.
  std::size_t store = 0;
  /// Whether the classical description is enough for the receiver
  /// simulator to enumerate the induced P_{X0 X1 K}.
  bool enumerable = true;
};

/// Measures every qubit on arrival, in a fresh random basis per qubit or in
/// the fixed basis c; m = 0.
AdversaryStrategy full_measurement_receiver(BasisRule rule, int c = 0);

/// The protocol's own receiver as a strategy: one random choice bit c,
/// every qubit measured in basis c.
AdversaryStrategy honest_receiver();

/// Stores the first `store` qubits (default m) and measures the rest in
/// random bases; stored qubits are measured in the revealed bases. Throws
/// std::invalid_argument if m exceeds max_qubits(). A store larger than m
/// is allowed here and fails at the engine's enforcement point.
AdversaryStrategy storing_receiver(std::size_t m);
AdversaryStrategy storing_receiver(std::size_t m, std::size_t store);

/// Teleports each arriving qubit through one of `env_pairs` EPR pairs
/// shared with the environment. Under the refined model the pairs count as
/// auxiliary input, so construction throws StrategyRejected when
/// env_pairs > beta.
AdversaryStrategy epr_teleport_receiver(std::size_t env_pairs, ModelVariant variant, std::size_t beta = 0);

/// Bob in two role-swapped instances: forwards Alice's qubits back to her
/// unmeasured and echoes her (b, r0, r1).
AdversaryStrategy reflection_attacker();

/// Committer that tries to open the other bit by guessing x_{1-c}.
AdversaryStrategy binding_attacker();

/// A dishonest sender for BQS-OT: the joint state of the qubits it sends
/// (labels s0..s{n-1}) and anything it keeps (any other labels), plus the
/// classical message (b, r0, r1). The simulator measures only the sent
/// qubits; the retained register is never touched.
struct SenderStrategy {
  std::string name;
  QuantumState state;
  std::size_t n;
  BasisString b;
  HashSeed r0;
  HashSeed r1;

  Labels sent_labels() const;
  Labels retained_labels() const;
};

/// Honest preparation: random x, b, seeds.
SenderStrategy honest_sender(std::size_t n, std::size_t ell, Rng &rng);
/// Sends exactly |x>_b with the given seeds.
SenderStrategy fixed_bb84_sender(const BitString &x, const BasisString &b, const HashSeed &r0, const HashSeed &r1);
/// Sends arbitrary single-qubit states (one amplitude pair per qubit).
SenderStrategy product_sender(const std::vector<Amplitudes> &qubits, const BasisString &b, const HashSeed &r0,
                              const HashSeed &r1);
/// Sends one half of an EPR pair per position and keeps the other halves
/// (labels k0..k{n-1}); needs 2n <= max_qubits().
SenderStrategy epr_sender(std::size_t n, std::size_t ell, Rng &rng);

}  // namespace bqs
