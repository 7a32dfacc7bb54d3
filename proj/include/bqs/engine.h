#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bqs/adversary.h"
#include "bqs/bits.h"
#include "bqs/bounds.h"
#include "bqs/entropy.h"
#include "bqs/functionality.h"
#include "bqs/hashpa.h"
#include "bqs/rng.h"
#include "bqs/transcript.h"

namespace bqs {

struct ProtocolOptions {
  ModelVariant variant = ModelVariant::Refined;
  /// Also enforce the memory bound at the end of every round.
  bool bound_every_round = false;
  /// Player names used in transcript directions. BQS-TO swaps them.
  std::string sender = "A";
  std::string receiver = "B";
  /// Name of the protocol in the transcript and the protocol it runs in.
  std::string phase = "BQS-OT";
  std::string parent;
};

/// What a dishonest receiver ends up with after step 3.
struct ReceiverView {
  /// k_out: every classical bit the strategy keeps (bases it chose, outcomes,
  /// teleport bits, the received (b, r0, r1)).
  BitString classical;
  /// Qubits of auxiliary input held before step 1.
  std::size_t aux_qubits = 0;
  /// Qubits held at the bound before step 3.
  std::size_t qubits_at_bound = 0;
  /// Teleport bits kept (2 per teleported qubit).
  std::size_t teleport_bits = 0;
  /// Guess of both sender strings, for attacking strategies.
  std::optional<OtStrings> guess;
  /// (c, y) in the honest output format, for Honest and fixed-basis
  /// strategies.
  std::optional<OtChoice> output;
};

struct BqsOtResult {
  OtStrings sender_output;
  /// The honest receiver's (c, y); for a dishonest receiver, its claimed
  /// output if it has one.
  std::optional<OtChoice> receiver_output;
  ReceiverView adversary;
  /// Whether ell <= max_ell(n, m, beta, eps) for the variant in use. Every
  /// desk-scale instance is outside the proven regime; this is reported,
  /// not enforced.
  bool within_proven_bounds = false;
  Transcript transcript;
};

/// BQS-OT with an honest sender and the given receiver strategy.
/// Sender: (1) x, b uniform; (2) send |x>_b; (3) send (b, r0, r1);
/// (5) output s_j = h(r_j, x_{|j}) with x_{|j} zero-padded to n bits.
/// Receiver: (1) c uniform; (2) measure in basis c; (3) receive (b, r0, r1);
/// (4) output (c, h(r_c, x'_{|c})).
/// The receiver's memory is bounded before step 1 (by beta, refined model
/// only) and before step 3 (by m), plus after every round if requested.
/// Throws MemoryBoundViolation (after recording it) when a strategy holds
/// more qubits than allowed, StrategyRejected for strategies that the
/// variant does not admit.
BqsOtResult run_bqs_ot(const SecurityParams &params, const AdversaryStrategy &receiver, Rng &rng,
                       const ProtocolOptions &options = {}, std::uint64_t trial = 0);
/// Same, appending to an existing transcript (used when composing).
BqsOtResult run_bqs_ot(const SecurityParams &params, const AdversaryStrategy &receiver, Rng &rng,
                       Transcript &transcript, const ProtocolOptions &options = {});

/// BQS-OT with a dishonest sender and the honest receiver.
struct CorruptSenderRun {
  OtChoice receiver_output;
  Transcript transcript;
};
CorruptSenderRun run_bqs_ot_corrupt_sender(const SenderStrategy &sender, std::size_t ell, Rng &rng,
                                           std::uint64_t trial = 0);

/// The sender simulator: stores the n qubits, measures qubit i in b_i once
/// (b, r0, r1) arrives, and hands (s0, s1) to ROT_A. Throws
/// std::invalid_argument if the strategy's message is malformed.
struct SenderSimulation {
  OtStrings extracted;
  OtChoice receiver_output;  // what ROT_A gives the honest receiver
  std::size_t simulator_qubits = 0;
};
SenderSimulation simulate_sender(const SenderStrategy &sender, std::size_t ell, Rng &rng);

/// Exact trace distance between the real and simulated joint states
/// sum_{c,y} P(c, y) |c y><c y| (x) rho_retained, over every measurement
/// outcome.
double sender_simulation_distance(const SenderStrategy &sender, std::size_t ell);

/// Classical record of a measure/store receiver before step 3.
struct ReceiverTrace {
  BitString bases;     // basis used per position; 0 for stored positions
  BitString outcomes;  // result per position; 0 for stored positions
  BitString stored;    // 1 where the qubit is kept unmeasured
};

enum class SimulatorPath { Auto, Structured, Enumerated };

struct ReceiverSimulatorOptions {
  /// Smoothing for alpha = H^eps_min(X0 X1 | K); defaults to params.eps.
  std::optional<double> eps;
  std::uint64_t row_budget = std::uint64_t{1} << 22;
  /// Auto enumerates P_{X0 X1 K} when it fits the budget and otherwise
  /// uses the closed form.
  SimulatorPath path = SimulatorPath::Auto;
};

struct ReceiverSimulation {
  int C = 0;
  BitString Y;
  OtStrings simulated_strings;  // (S0, S1) of the simulated sender
  OtStrings sender_output;      // from ROT_B
  ReceiverView adversary;
  ReceiverTrace trace;
  BitString x;
  BitString b;  // bases of the simulated sender
  std::size_t unknown_in_one = 0;
  std::size_t simulator_qubits = 0;
};

/// The receiver simulator. It plays the honest sender itself, runs the
/// strategy, and picks C = f(X0, X1, K) by min-entropy splitting with beta
/// = 0. alpha and f depend only on the strategy and params, so they are
/// fixed at construction.
///
/// For measure/store strategies, given K = (B, bases, outcomes) every
/// position the strategy did not measure in the right basis is uniform and
/// independent, so P(x1 | k) = 2^-u1 with u1 the number of such positions
/// among b_i = 1. The structured path uses that closed form (any n); the
/// enumerated path builds P_{X0 X1 K J} explicitly and calls split_choice.
class ReceiverSimulator {
 public:
  /// Throws std::invalid_argument for strategies without a classical
  /// description, EnumerationBudgetExceeded when the enumerated path is
  /// forced and too large.
  ReceiverSimulator(const AdversaryStrategy &strategy, const SecurityParams &params,
                    const ReceiverSimulatorOptions &options = {});

  double alpha() const { return alpha_; }
  double threshold() const { return threshold_; }
  SimulatorPath path() const { return path_; }
  /// Number of rows of the enumerated table (0 on the structured path).
  std::size_t table_rows() const { return table_rows_; }

  /// f(x0, x1, k) for a simulated run.
  int choose(const BitString &x, const BasisString &b, const ReceiverTrace &trace) const;
  ReceiverSimulation run(Rng &rng) const;

 private:
  AdversaryStrategy strategy_;
  SecurityParams params_;
  double alpha_ = 0;
  double threshold_ = 1;
  SimulatorPath path_ = SimulatorPath::Structured;
  std::size_t table_rows_ = 0;
  std::optional<SplitResult> split_;
};

/// One-shot wrapper around ReceiverSimulator.
ReceiverSimulation simulate_receiver(const AdversaryStrategy &strategy, const SecurityParams &params, Rng &rng,
                                     const ReceiverSimulatorOptions &options = {});

/// Two BQS-OT instances with roles swapped: Alice sends in the first and
/// receives in the second. `bob` is honest_receiver() or
/// reflection_attacker().
struct ReflectionRun {
  OtStrings first_sender_output;
  OtChoice second_receiver_output;
  bool y_in_first = false;
  std::size_t attacker_qubits = 0;
  Transcript transcript;
};
ReflectionRun run_reflection_pair(const SecurityParams &params, const AdversaryStrategy &bob, Rng &rng,
                                  const ProtocolOptions &options = {}, std::uint64_t trial = 0);

/// OT from one ROT: B sends d = c' ^ c, A sends m_i = x_i ^ x'_{i^d},
/// B outputs m_c ^ y'. Throws std::invalid_argument on length mismatch.
struct OtFromRotResult {
  BitString y;
  int d = 0;
  OtStrings m;
  RotSample rot;
  Transcript transcript;
};
OtFromRotResult ot_from_rot(const OtStrings &x, int c, const RotSample &rot, std::uint64_t trial = 0);
OtFromRotResult run_ot_from_rot(const OtStrings &x, int c, Rng &rng, std::uint64_t trial = 0);

/// Exact output distributions, keyed by a canonical outcome string.
using ExactOutcomes = std::map<std::string, Rational>;
Rational total_variation(const ExactOutcomes &p, const ExactOutcomes &q);

/// Dishonest A in OTfromROT: its ROT input and its reply as a function of d.
struct RotSenderAdversary {
  OtStrings rot_input;
  std::function<OtStrings(int d)> respond;
};
/// Joint (d, m0, m1, y) with y the honest B's output.
ExactOutcomes ot_from_rot_real_corrupt_sender(const RotSenderAdversary &adv, int c);
ExactOutcomes ot_from_rot_ideal_corrupt_sender(const RotSenderAdversary &adv, int c);

/// Dishonest B in OTfromROT: its ROT input (c', y') and its message d.
struct RotReceiverAdversary {
  OtChoice rot_input;
  int d = 0;
};
/// Distribution of (m0, m1) seen by B.
ExactOutcomes ot_from_rot_real_corrupt_receiver(const RotReceiverAdversary &adv, const OtStrings &x);
ExactOutcomes ot_from_rot_ideal_corrupt_receiver(const RotReceiverAdversary &adv, const OtStrings &x);

/// One TOR sample: the verifier B holds the strings, the committer A holds
/// the choice.
struct TorSample {
  OtStrings verifier;
  OtChoice committer;
};
TorSample ideal_tor(std::size_t ell, Rng &rng);

/// OTtoBC over one TOR. Commit: A sends m = b ^ c. Open: A sends (b, y),
/// or nothing when a = 0; B outputs b iff x_{b ^ m} = y.
class BitCommitmentSession {
 public:
  BitCommitmentSession(std::size_t ell, Transcript &transcript);

  /// Throws std::logic_error when called twice.
  void commit(int b, const TorSample &tor);
  /// Honest opening. Throws std::logic_error before commit or after an
  /// opening.
  std::optional<int> open(int a);
  /// Arbitrary opening message (b', y').
  std::optional<int> open_with(int b, const BitString &y);

  int message() const { return m_; }
  /// Classical bits the verifier keeps between the phases.
  std::size_t verifier_state_bits() const { return 2 * ell_ + 1; }

 private:
  std::size_t ell_;
  Transcript &transcript_;
  TorSample tor_;
  int b_ = 0;
  int m_ = 0;
  bool committed_ = false;
  bool opened_ = false;
};

struct BcRun {
  std::optional<int> verifier_output;
  int b = 0;
  int m = 0;
  /// For binding_attacker: the bit it tried to open and whether it worked.
  std::optional<int> cheat_target;
  bool cheat_success = false;
  Transcript transcript;
};
/// Honest commit of b and open(a) over an ideal TOR.
BcRun run_bc(int b, int a, std::size_t ell, Rng &rng, std::uint64_t trial = 0);
/// Committer strategy Honest or BindingCheat.
BcRun run_bc(int b, int a, std::size_t ell, Rng &rng, const AdversaryStrategy &committer,
             std::uint64_t trial = 0);

/// Distribution of the commit message m over all TOR randomness
/// (ell <= 8).
ExactOutcomes bc_commit_distribution(int b, std::size_t ell);

enum class InnerImplementation { BqsTo, IdealTor };

struct ComposeOptions {
  InnerImplementation inner = InnerImplementation::BqsTo;
  ProtocolOptions protocol;
};

struct ComposeResult {
  std::optional<int> verifier_output;
  int b = 0;
  int a = 0;
  int m = 0;
  /// Whether the inner TOR delivered y = x_c.
  bool inner_correct = false;
  /// eps with ell = log2(1/eps), and the composed error 6 eps.
  double eps = 0;
  double error_budget = 0;
  /// Whether 10m <= n - 20 cbrt(n^2 log(1/eps)) - 20 log(1/eps) - 4.
  bool within_proven_bounds = false;
  /// Classical bits a simulator keeps between the commit and open phases.
  std::size_t simulator_classical_bits = 0;
  /// Qubits used by the BQS-TO simulators: all n for a corrupted sender
  /// (it waits for the bases), the adversary's m for a corrupted receiver.
  std::size_t sender_simulator_qubits = 0;
  std::size_t receiver_simulator_qubits = 0;
  Transcript transcript;
};

/// OTtoBC(BQS-TO(Q-Comm || Comm) || Comm): commit b, then open(a). The
/// inner BQS-OT runs with B as sender and A as receiver.
ComposeResult compose_bc(const SecurityParams &params, int b, int a, Rng &rng, const ComposeOptions &options = {},
                         std::uint64_t trial = 0);

}  // namespace bqs
