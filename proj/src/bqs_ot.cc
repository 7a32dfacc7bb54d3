#include <map>
#include <stdexcept>

#include "bqs/engine.h"
#include "bqs/errors.h"
#include "receiver_program.h"

namespace bqs {

namespace detail {

BitString bit(int v) { return BitString{v}; }

BitString hash_substring(const HashSeed &r, const BitString &x, const BasisString &b, int j) {
    return hash(r, substring_in_basis(x, b, j).padded(x.size()));
}

ReceiverState receive_qubits(const AdversaryStrategy &strategy, const Bb84Product &qubits, Rng &rng) {
    std::size_t n = qubits.size();
    ReceiverState st;
    st.trace = {BitString(n), BitString(n), BitString(n)};
    switch (strategy.kind) {
        case StrategyKind::Honest:
        case StrategyKind::Measure: {
            bool per_qubit = strategy.kind == StrategyKind::Measure && strategy.basis_rule == BasisRule::Random;
            st.c = strategy.kind == StrategyKind::Honest ? rng.bit() : strategy.fixed_basis;
            for (std::size_t i = 0; i < n; ++i) {
                int basis = per_qubit ? rng.bit() : st.c;
                st.trace.bases.set(i, basis);
                st.trace.outcomes.set(i, qubits.measure(i, basis, rng));
            }
            break;
        }
        case StrategyKind::Store: {
            std::size_t s = std::min(strategy.store, n);
            for (std::size_t i = 0; i < n; ++i) {
                if (i < s) {
                    st.stored_positions.push_back(i);
                    st.trace.stored.set(i, 1);
                } else {
                    int basis = rng.bit();
                    st.trace.bases.set(i, basis);
                    st.trace.outcomes.set(i, qubits.measure(i, basis, rng));
                }
            }
            st.memory = qubits.materialize(st.stored_positions, "q");
            break;
        }
        case StrategyKind::EprTeleport: {
            if (strategy.aux_qubits < n) {
                throw std::invalid_argument("epr-teleport: " + std::to_string(strategy.aux_qubits) +
                                            " EPR pairs cannot carry " + std::to_string(n) + " qubits");
            }
            st.aux_qubits = strategy.aux_qubits;
            for (std::size_t i = 0; i < n; ++i) {
                auto payload = qubits.materialize({i}, "q");
                auto joint = payload.tensor(QuantumState::epr_pair("a", "e"));
                auto t = teleport_uncorrected(joint, payload.labels()[0], "a", "e", rng);
                st.environment.push_back(t.state);
                st.teleport_bits = st.teleport_bits.concat(t.classical);
            }
            break;
        }
        case StrategyKind::Reflect:
        case StrategyKind::BindingCheat:
            throw std::invalid_argument("strategy '" + strategy.name + "' cannot act as a BQS-OT receiver");
    }
    return st;
}

ReceiverView finish_receiver(const AdversaryStrategy &strategy, ReceiverState &st, const BasisString &b,
                             const HashSeed &r0, const HashSeed &r1, Rng &rng) {
    std::size_t n = b.size();
    ReceiverView view;
    view.aux_qubits = st.aux_qubits;
    view.qubits_at_bound = st.memory.num_qubits();
    BitString guess_x = st.trace.outcomes;
    if (!st.stored_positions.empty()) {
        BitString bases;
        for (auto p : st.stored_positions) {
            bases.push_back(b[p]);
        }
        auto m = measure(st.memory, st.memory.labels(), BasisString(bases), rng);
        for (std::size_t k = 0; k < st.stored_positions.size(); ++k) {
            guess_x.set(st.stored_positions[k], m.outcome[k]);
        }
        st.memory = QuantumState::empty();
    }
    if (!st.environment.empty()) {
        // The environment undoes the Pauli frame and measures in the
        // revealed bases.
        for (std::size_t i = 0; i < n; ++i) {
            BitString tb{st.teleport_bits[2 * i], st.teleport_bits[2 * i + 1]};
            auto corrected = apply_teleport_correction(st.environment[i], "e", tb);
            auto m = measure(corrected, {"e"}, BasisString{b[i]}, rng);
            guess_x.set(i, m.outcome[0]);
        }
        view.teleport_bits = st.teleport_bits.size();
    }
    view.classical = st.trace.bases.concat(st.trace.outcomes)
                         .concat(st.teleport_bits)
                         .concat(b.as_bits())
                         .concat(r0.matrix())
                         .concat(r1.matrix());
    view.guess = OtStrings{hash_substring(r0, guess_x, b, 0), hash_substring(r1, guess_x, b, 1)};
    bool fixed = strategy.kind == StrategyKind::Honest ||
                 (strategy.kind == StrategyKind::Measure && strategy.basis_rule == BasisRule::Fixed);
    if (fixed) {
        view.output = OtChoice{st.c, view.guess->at(st.c)};
    }
    return view;
}

}  // namespace detail

namespace {

using detail::bit;

std::string arrow(const std::string &from, const std::string &to) { return from + "->" + to; }

BitString message_bits(const BasisString &b, const HashSeed &r0, const HashSeed &r1) {
    return b.as_bits().concat(r0.matrix()).concat(r1.matrix());
}

std::string message_event(std::size_t n, std::size_t ell) {
    return "b,r0,r1 n=" + std::to_string(n) + " ell=" + std::to_string(ell);
}

// Records the bound, then throws if the holder exceeds it.
MemoryBoundOutcome bound_point(Transcript &t, const std::string &who, const std::string &point,
                               const QuantumState &held, std::size_t limit, Rng &rng) {
    std::string what = "memory-bound " + point + " limit=" + std::to_string(limit) +
                       " held=" + std::to_string(held.num_qubits());
    if (held.num_qubits() > limit) {
        t.record("Memory", who, what + " violation");
        throw MemoryBoundViolation(who + " holds " + std::to_string(held.num_qubits()) + " qubits at " + point +
                                   ", bound " + std::to_string(limit));
    }
    auto out = enforce_memory_bound(held, held.labels(), limit, rng);
    t.record("Memory", who, out.classical_bits, what);
    return out;
}

void check_params(const SecurityParams &p) {
    p.validate();
    if (p.ell > p.n) {
        throw std::invalid_argument("BQS-OT needs ell <= n");
    }
}

}  // namespace

BqsOtResult run_bqs_ot(const SecurityParams &params, const AdversaryStrategy &receiver, Rng &rng,
                       Transcript &t, const ProtocolOptions &opt) {
    check_params(params);
    if (receiver.role != Role::Receiver) {
        throw std::invalid_argument("run_bqs_ot: strategy '" + receiver.name + "' is not a receiver");
    }
    auto n = static_cast<std::size_t>(params.n);
    auto ell = static_cast<std::size_t>(params.ell);
    const std::string &A = opt.sender;
    const std::string &B = opt.receiver;
    BqsOtResult result;
    std::int64_t declared_m = static_cast<std::int64_t>(receiver.memory);
    result.within_proven_bounds =
        params.ell <= max_ell(params.n, std::max(params.m, declared_m), params.beta, params.eps,
                              opt.variant == ModelVariant::Legacy ? BoundVariant::Main : BoundVariant::MixedAux);

    t.begin_phase(opt.phase, opt.parent);
    std::size_t aux = receiver.kind == StrategyKind::EprTeleport ? receiver.aux_qubits : 0;
    std::string aux_event = "memory-bound before-step-1 held=" + std::to_string(aux);
    if (opt.variant == ModelVariant::Refined) {
        auto beta = static_cast<std::size_t>(params.beta);
        if (aux > beta) {
            t.record("Memory", B, aux_event + " limit=" + std::to_string(beta) + " violation");
            throw MemoryBoundViolation(B + " holds " + std::to_string(aux) +
                                       " qubits of auxiliary input, beta = " + std::to_string(beta));
        }
        t.record("Memory", B, aux_event + " limit=" + std::to_string(beta));
    } else {
        t.record("Memory", B, aux_event + " not-enforced");
    }

    // Sender step 1.
    BitString x = BitString::random(n, rng);
    BasisString b = BasisString::random(n, rng);
    HashSeed r0 = sample_hash_seed(n, ell, rng);
    HashSeed r1 = sample_hash_seed(n, ell, rng);
    Bb84Product qubits(x, b);

    // Sender step 2; receiver steps 1 and 2 on arrival.
    t.next_round();
    t.record("Q-Comm", arrow(A, B),
             "qubits n=" + std::to_string(n) + " handle=" + std::to_string(t.new_handle()));
    auto state = detail::receive_qubits(receiver, qubits, rng);
    if (opt.bound_every_round) {
        bound_point(t, B, "end-of-round", state.memory, receiver.memory, rng);
    }

    // Bound before receiver step 3, then sender step 3.
    t.next_round();
    bound_point(t, B, "before-step-3", state.memory, receiver.memory, rng);
    t.record("Comm", arrow(A, B), message_bits(b, r0, r1), message_event(n, ell));
    auto view = detail::finish_receiver(receiver, state, b, r0, r1, rng);
    if (opt.bound_every_round) {
        bound_point(t, B, "end-of-round", state.memory, receiver.memory, rng);
    }

    // Sender step 5, receiver step 4.
    t.next_round();
    result.sender_output = {detail::hash_substring(r0, x, b, 0), detail::hash_substring(r1, x, b, 1)};
    t.record("Output", A, result.sender_output.x0.concat(result.sender_output.x1), "s0,s1");
    if (view.output) {
        result.receiver_output = view.output;
        t.record("Output", B, bit(view.output->c).concat(view.output->y), "c,y");
    }
    if (receiver.kind != StrategyKind::Honest) {
        t.record("Output", B, view.classical, "k_out bits=" + std::to_string(view.classical.size()));
    }
    t.end_phase(opt.phase);
    result.adversary = std::move(view);
    return result;
}

BqsOtResult run_bqs_ot(const SecurityParams &params, const AdversaryStrategy &receiver, Rng &rng,
                       const ProtocolOptions &options, std::uint64_t trial) {
    Transcript t(trial);
    auto result = run_bqs_ot(params, receiver, rng, t, options);
    result.transcript = std::move(t);
    return result;
}

namespace {

void check_sender_message(const SenderStrategy &s, std::size_t ell) {
    if (s.n == 0 || s.b.size() != s.n) {
        throw std::invalid_argument("sender message: b must have n entries");
    }
    for (const auto *r : {&s.r0, &s.r1}) {
        if (r->input_bits() != s.n || r->output_bits() != ell) {
            throw std::invalid_argument("sender message: seeds must be ell x n");
        }
    }
    for (const auto &l : s.sent_labels()) {
        if (!s.state.has_label(l)) {
            throw std::invalid_argument("sender message: state lacks qubit " + l);
        }
    }
}

}  // namespace

CorruptSenderRun run_bqs_ot_corrupt_sender(const SenderStrategy &sender, std::size_t ell, Rng &rng,
                                           std::uint64_t trial) {
    check_sender_message(sender, ell);
    CorruptSenderRun run{{}, Transcript(trial)};
    auto &t = run.transcript;
    t.begin_phase("BQS-OT");
    t.record("Memory", "B", "memory-bound before-step-1 held=0 limit=0");
    t.next_round();
    t.record("Q-Comm", "A->B", "qubits n=" + std::to_string(sender.n) + " handle=" + std::to_string(t.new_handle()));
    int c = rng.bit();
    auto m = measure(sender.state, sender.sent_labels(), BasisString::uniform(sender.n, c), rng);
    t.next_round();
    t.record("Memory", "B", "memory-bound before-step-3 limit=0 held=0");
    t.record("Comm", "A->B", message_bits(sender.b, sender.r0, sender.r1), message_event(sender.n, ell));
    t.next_round();
    run.receiver_output = {c, detail::hash_substring(c ? sender.r1 : sender.r0, m.outcome, sender.b, c)};
    t.record("Output", "B", bit(c).concat(run.receiver_output.y), "c,y");
    t.end_phase("BQS-OT");
    return run;
}

SenderSimulation simulate_sender(const SenderStrategy &sender, std::size_t ell, Rng &rng) {
    check_sender_message(sender, ell);
    // Only the sent register is measured; the strategy's own qubits stay
    // with it.
    auto m = measure(sender.state, sender.sent_labels(), sender.b, rng);
    SenderSimulation sim;
    sim.extracted = {detail::hash_substring(sender.r0, m.outcome, sender.b, 0),
                     detail::hash_substring(sender.r1, m.outcome, sender.b, 1)};
    sim.receiver_output = ideal_rot_corrupt_sender(sim.extracted, rng);
    sim.simulator_qubits = sender.n;
    return sim;
}

double sender_simulation_distance(const SenderStrategy &sender, std::size_t ell) {
    check_sender_message(sender, ell);
    auto sent = sender.sent_labels();
    bool has_retained = !sender.retained_labels().empty();
    using Key = std::pair<int, BitString>;
    std::map<Key, Operator> real;
    std::map<Key, Operator> ideal;
    auto add = [&](std::map<Key, Operator> &acc, const Key &key, double p, const QuantumState &post) {
        Operator rho = has_retained ? Operator(p * partial_trace(post, sent).density_matrix())
                                    : Operator::Constant(1, 1, Complex(p, 0));
        auto it = acc.find(key);
        if (it == acc.end()) {
            acc.emplace(key, rho);
        } else {
            it->second += rho;
        }
    };
    for (int c = 0; c < 2; ++c) {
        const HashSeed &r = c ? sender.r1 : sender.r0;
        for (const auto &br : measurement_branches(sender.state, sent, BasisString::uniform(sender.n, c))) {
            add(real, {c, detail::hash_substring(r, br.outcome, sender.b, c)}, 0.5 * br.probability, br.post);
        }
        for (const auto &br : measurement_branches(sender.state, sent, sender.b)) {
            add(ideal, {c, detail::hash_substring(r, br.outcome, sender.b, c)}, 0.5 * br.probability, br.post);
        }
    }
    double d = 0;
    for (const auto &[key, rho] : real) {
        auto it = ideal.find(key);
        d += half_trace_norm(it == ideal.end() ? rho : Operator(rho - it->second));
    }
    for (const auto &[key, sigma] : ideal) {
        if (!real.count(key)) {
            d += half_trace_norm(sigma);
        }
    }
    return d;
}

ReflectionRun run_reflection_pair(const SecurityParams &params, const AdversaryStrategy &bob, Rng &rng,
                                  const ProtocolOptions &opt, std::uint64_t trial) {
    check_params(params);
    if (bob.kind != StrategyKind::Reflect && bob.kind != StrategyKind::Honest) {
        throw std::invalid_argument("run_reflection_pair: Bob must be honest or the reflection attacker");
    }
    auto n = static_cast<std::size_t>(params.n);
    auto ell = static_cast<std::size_t>(params.ell);
    ReflectionRun run{{}, {}, false, 0, Transcript(trial)};
    auto &t = run.transcript;
    bool reflect = bob.kind == StrategyKind::Reflect;
    t.begin_phase("BQS-OT pair");
    t.record("Memory", "B", "memory-bound before-step-1 held=0" +
                                std::string(opt.variant == ModelVariant::Refined ? " limit=0" : " not-enforced"));

    // Instance 1: Alice sends.
    BitString x = BitString::random(n, rng);
    BasisString b = BasisString::random(n, rng);
    HashSeed r0 = sample_hash_seed(n, ell, rng);
    HashSeed r1 = sample_hash_seed(n, ell, rng);
    Bb84Product alice_qubits(x, b);
    run.first_sender_output = {detail::hash_substring(r0, x, b, 0), detail::hash_substring(r1, x, b, 1)};

    t.next_round();
    t.record("Q-Comm", "A->B", "instance=1 qubits n=" + std::to_string(n) + " handle=" + std::to_string(t.new_handle()));
    // Instance 2: Bob sends, either Alice's own qubits straight back or a
    // fresh honest preparation.
    std::optional<Bb84Product> bob_qubits;
    BitString bx;
    BasisString bb = b;
    HashSeed br0 = r0;
    HashSeed br1 = r1;
    std::optional<detail::ReceiverState> bob_state;
    if (reflect) {
        bob_qubits = alice_qubits;
    } else {
        bob_state = detail::receive_qubits(honest_receiver(), alice_qubits, rng);
        bx = BitString::random(n, rng);
        bb = BasisString::random(n, rng);
        br0 = sample_hash_seed(n, ell, rng);
        br1 = sample_hash_seed(n, ell, rng);
        bob_qubits = Bb84Product(bx, bb);
    }
    t.record("Q-Comm", "B->A", "instance=2 qubits n=" + std::to_string(n) + " handle=" +
                                   std::to_string(reflect ? t.new_handle() - 1 : t.new_handle()));
    auto alice_state = detail::receive_qubits(honest_receiver(), *bob_qubits, rng);

    t.next_round();
    t.record("Memory", "B", "memory-bound before-step-3 limit=" + std::to_string(params.m) + " held=0");
    t.record("Memory", "A", "memory-bound before-step-3 limit=0 held=0");
    t.record("Comm", "A->B", message_bits(b, r0, r1), "instance=1 " + message_event(n, ell));
    t.record("Comm", "B->A", message_bits(bb, br0, br1), "instance=2 " + message_event(n, ell));
    auto alice_view = detail::finish_receiver(honest_receiver(), alice_state, bb, br0, br1, rng);

    t.next_round();
    t.record("Output", "A", run.first_sender_output.x0.concat(run.first_sender_output.x1), "instance=1 s0,s1");
    if (bob_state) {
        auto bob_view = detail::finish_receiver(honest_receiver(), *bob_state, b, r0, r1, rng);
        t.record("Output", "B", bit(bob_view.output->c).concat(bob_view.output->y), "instance=1 c,y");
        t.record("Output", "B",
                 detail::hash_substring(br0, bx, bb, 0).concat(detail::hash_substring(br1, bx, bb, 1)),
                 "instance=2 s0,s1");
    }
    run.second_receiver_output = *alice_view.output;
    t.record("Output", "A", bit(run.second_receiver_output.c).concat(run.second_receiver_output.y),
             "instance=2 c,y");
    t.end_phase("BQS-OT pair");
    run.y_in_first = run.second_receiver_output.y == run.first_sender_output.x0 ||
                     run.second_receiver_output.y == run.first_sender_output.x1;
    run.attacker_qubits = 0;
    return run;
}

}  // namespace bqs
