#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "bqs/bits.h"
#include "bqs/rng.h"

namespace bqs {

using Complex = std::complex<double>;
using Amplitudes = Eigen::VectorXcd;
using Operator = Eigen::MatrixXcd;
using Labels = std::vector<std::string>;

/// Absolute tolerance for norms, traces, unitarity and Hermiticity.
inline constexpr double kStateTolerance = 1e-9;
inline constexpr std::size_t kDefaultMaxQubits = 14;

/// Largest register simulated densely. Read at state construction.
std::size_t max_qubits();
void set_max_qubits(std::size_t n);

/// A register of labelled qubits held either as a pure state vector or a
/// density matrix. labels()[0] is the most significant bit of a basis index,
/// so |x_0 x_1 ... x_{k-1}> has index sum_i x_i 2^{k-1-i}.
///
/// A zero-qubit state is allowed; it is the scalar 1 and represents "nothing
/// retained".
class QuantumState {
 public:
  /// |0...0> on the given labels.
  static QuantumState zeros(Labels labels);
  static QuantumState pure(Labels labels, Amplitudes amplitudes);
  static QuantumState mixed(Labels labels, Operator density);
  static QuantumState empty();
  /// (|00> + |11>)/sqrt(2) on (first, second).
  static QuantumState epr_pair(const std::string &first, const std::string &second);

  bool is_pure() const { return std::holds_alternative<Amplitudes>(data_); }
  std::size_t num_qubits() const { return labels_.size(); }
  std::size_t dimension() const { return std::size_t{1} << labels_.size(); }
  const Labels &labels() const { return labels_; }
  bool has_label(const std::string &label) const;
  std::size_t position(const std::string &label) const;

  /// Throws if the state is mixed.
  const Amplitudes &amplitudes() const;
  Operator density_matrix() const;

  /// Joint state on labels() followed by other.labels(); labels must be
  /// disjoint.
  QuantumState tensor(const QuantumState &other) const;
  /// Same amplitudes under new names.
  QuantumState relabeled(Labels labels) const;
  /// Same physical state with qubits listed in `order` (a permutation of
  /// labels()).
  QuantumState reordered(const Labels &order) const;

 private:
  QuantumState(Labels labels, std::variant<Amplitudes, Operator> data)
      : labels_(std::move(labels)), data_(std::move(data)) {}

  friend QuantumState apply_unitary(const QuantumState &, const Labels &, const Operator &);
  friend QuantumState partial_trace(const QuantumState &, const Labels &);
  friend struct StateAccess;

  Labels labels_;
  std::variant<Amplitudes, Operator> data_;
};

/// Single-qubit state |x>_basis.
Amplitudes bb84_amplitudes(int x, int basis);

/// Product state |x_1>_{b_1} ... |x_n>_{b_n} on labels prefix0..prefix{n-1}.
QuantumState encode_bb84(const BitString &x, const BasisString &b,
                         const std::string &label_prefix = "q");

struct MeasurementResult {
  BitString outcome;
  QuantumState post;
};

/// Measures each target in its basis (0 = +, 1 = x), in order. The
/// post-measurement state keeps every qubit, renormalized after projection.
MeasurementResult measure(const QuantumState &state, const Labels &targets,
                          const BasisString &bases, Rng &rng);

struct MeasurementBranch {
  BitString outcome;
  double probability;
  QuantumState post;
};

/// Every outcome of `measure` with non-zero probability, in increasing
/// outcome order. Used for exact (enumerated) comparisons.
std::vector<MeasurementBranch> measurement_branches(const QuantumState &state,
                                                   const Labels &targets,
                                                   const BasisString &bases);

QuantumState apply_unitary(const QuantumState &state, const Labels &targets, const Operator &u);

/// Reduced state on the qubits not in `discard`. Always returns a density
/// matrix.
QuantumState partial_trace(const QuantumState &state, const Labels &discard);

/// Removes qubits that sit in a known computational basis state `bits`
/// (for instance right after measuring them), keeping the rest exactly. A
/// pure input stays pure.
QuantumState remove_collapsed(const QuantumState &state, const Labels &targets,
                              const BitString &bits);

/// <phi+| rho_{ab} |phi+> for the reduced state on (a, b).
double epr_fidelity(const QuantumState &state, const std::string &a, const std::string &b);

struct TeleportResult {
  /// (m1, m2): m1 from the payload qubit, m2 from the local EPR half. The
  /// receiver applies X^{m2} then Z^{m1}.
  BitString classical;
  /// The input state with payload and local half removed; the payload's
  /// content now lives on `remote` (corrections already applied).
  QuantumState state;
};

/// Teleports `payload` through the EPR pair (local, remote). The pair must
/// be (|00> + |11>)/sqrt(2) within fidelity 1 - 1e-9.
TeleportResult teleport(const QuantumState &state, const std::string &payload,
                        const std::string &local, const std::string &remote, Rng &rng);

/// Same as `teleport` but leaves the Pauli correction to the caller, as the
/// environment does in the storage-borrowing attack.
TeleportResult teleport_uncorrected(const QuantumState &state, const std::string &payload,
                                    const std::string &local, const std::string &remote, Rng &rng);

/// Applies X^{m2} Z^{m1} correction for teleport bits (m1, m2) to `target`.
QuantumState apply_teleport_correction(const QuantumState &state, const std::string &target,
                                       const BitString &classical);

struct MemoryBoundOutcome {
  Labels measured;
  BitString classical_bits;
  QuantumState retained;
};

/// Measures every qubit outside `keep` in the computational basis and drops
/// it; the remaining state on `keep` is returned. Throws
/// MemoryBoundViolation if |keep| > memory_bound.
MemoryBoundOutcome enforce_memory_bound(const QuantumState &state, const Labels &keep,
                                        std::size_t memory_bound, Rng &rng);

/// 1/2 Tr|rho - sigma|. Qubit counts must match; qubits are compared by
/// position, not label.
double trace_distance(const QuantumState &rho, const QuantumState &sigma);

/// 1/2 Tr|A| for a Hermitian matrix.
double half_trace_norm(const Operator &hermitian);

namespace gates {
Operator identity(std::size_t qubits = 1);
Operator hadamard();
Operator pauli_x();
Operator pauli_z();
/// Control is the first (most significant) qubit.
Operator cnot();
}  // namespace gates

/// A product of BB84 qubits kept classically as (x, b). Honest senders
/// produce only such states, so a protocol can send more qubits than
/// max_qubits() while anything stored or entangled is simulated densely
/// through materialize().
class Bb84Product {
 public:
  Bb84Product(BitString x, BasisString b);

  std::size_t size() const { return x_.size(); }
  /// Born-rule measurement of qubit i in `basis`.
  int measure(std::size_t i, int basis, Rng &rng) const;
  /// Dense state of the listed positions, labelled prefix<position>.
  QuantumState materialize(const std::vector<std::size_t> &positions,
                           const std::string &label_prefix = "q") const;

  // The physical preparation; only the engine (which plays the channel) and
  // tests look at these.
  const BitString &prepared_bits() const { return x_; }
  const BasisString &prepared_bases() const { return b_; }

 private:
  BitString x_;
  BasisString b_;
};

}  // namespace bqs
