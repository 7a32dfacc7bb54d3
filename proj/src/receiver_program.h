#pragma once

#include <vector>

#include "bqs/engine.h"
#include "bqs/qstate.h"

namespace bqs::detail {

// Interpreter state of a receiver strategy between steps 2 and 3.
struct ReceiverState {
    ReceiverTrace trace;
    int c = 0;
    std::vector<std::size_t> stored_positions;
    QuantumState memory = QuantumState::empty();
    // EPR attack: the environment's qubit per position and its teleport bits.
    std::vector<QuantumState> environment;
    BitString teleport_bits;
    std::size_t aux_qubits = 0;
};

// Steps 1 and 2: choose c or bases, consume the qubits as they arrive.
ReceiverState receive_qubits(const AdversaryStrategy &strategy, const Bb84Product &qubits, Rng &rng);

// Steps 3 and 4 once (b, r0, r1) is known.
ReceiverView finish_receiver(const AdversaryStrategy &strategy, ReceiverState &state, const BasisString &b,
                             const HashSeed &r0, const HashSeed &r1, Rng &rng);

// h(r, x_{|j}) with the substring zero-padded to |x| bits.
BitString hash_substring(const HashSeed &r, const BitString &x, const BasisString &b, int j);

BitString bit(int v);

}  // namespace bqs::detail
