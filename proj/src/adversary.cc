#include "bqs/adversary.h"

#include <cmath>
#include <stdexcept>

#include "bqs/errors.h"

namespace bqs {

ModelVariant parse_model_variant(const std::string &name) {
    if (name == "legacy") return ModelVariant::Legacy;
    if (name == "refined") return ModelVariant::Refined;
    throw std::invalid_argument("unknown model variant: " + name + " (expected legacy or refined)");
}

std::string to_string(ModelVariant v) { return v == ModelVariant::Legacy ? "legacy" : "refined"; }

std::string to_string(Role r) {
    switch (r) {
        case Role::Sender: return "sender";
        case Role::Receiver: return "receiver";
        case Role::Committer: return "committer";
        case Role::Verifier: return "verifier";
    }
    return "?";
}

AdversaryStrategy full_measurement_receiver(BasisRule rule, int c) {
    if (c != 0 && c != 1) {
        throw std::invalid_argument("full_measurement_receiver: c must be 0 or 1");
    }
    AdversaryStrategy s;
    s.name = rule == BasisRule::Random ? "full-measurement-random" : "full-measurement-fixed";
    s.kind = StrategyKind::Measure;
    s.basis_rule = rule;
    s.fixed_basis = c;
    return s;
}

AdversaryStrategy honest_receiver() {
    AdversaryStrategy s;
    s.name = "honest";
    s.kind = StrategyKind::Honest;
    return s;
}

AdversaryStrategy storing_receiver(std::size_t m) { return storing_receiver(m, m); }

AdversaryStrategy storing_receiver(std::size_t m, std::size_t store) {
    if (m > max_qubits()) {
        throw std::invalid_argument("storing_receiver: m = " + std::to_string(m) + " exceeds max_qubits = " +
                                    std::to_string(max_qubits()));
    }
    if (store > max_qubits()) {
        throw std::invalid_argument("storing_receiver: cannot simulate " + std::to_string(store) + " stored qubits");
    }
    AdversaryStrategy s;
    s.name = "storing";
    s.kind = StrategyKind::Store;
    s.memory = m;
    s.store = store;
    return s;
}

AdversaryStrategy epr_teleport_receiver(std::size_t env_pairs, ModelVariant variant, std::size_t beta) {
    if (env_pairs == 0) {
        throw std::invalid_argument("epr_teleport_receiver: needs at least one EPR pair");
    }
    if (variant == ModelVariant::Refined && env_pairs > beta) {
        throw StrategyRejected("epr-teleport needs " + std::to_string(env_pairs) +
                               " qubits of auxiliary input; the refined model allows beta = " + std::to_string(beta));
    }
    AdversaryStrategy s;
    s.name = "epr-teleport";
    s.kind = StrategyKind::EprTeleport;
    s.aux_qubits = env_pairs;
    s.enumerable = false;
    return s;
}

AdversaryStrategy reflection_attacker() {
    AdversaryStrategy s;
    s.name = "reflection";
    s.kind = StrategyKind::Reflect;
    s.enumerable = false;
    return s;
}

AdversaryStrategy binding_attacker() {
    AdversaryStrategy s;
    s.name = "binding";
    s.role = Role::Committer;
    s.kind = StrategyKind::BindingCheat;
    s.enumerable = false;
    return s;
}

Labels SenderStrategy::sent_labels() const {
    Labels out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back("s" + std::to_string(i));
    }
    return out;
}

Labels SenderStrategy::retained_labels() const {
    auto sent = sent_labels();
    Labels out;
    for (const auto &l : state.labels()) {
        bool is_sent = false;
        for (const auto &s : sent) {
            is_sent |= s == l;
        }
        if (!is_sent) {
            out.push_back(l);
        }
    }
    return out;
}

SenderStrategy honest_sender(std::size_t n, std::size_t ell, Rng &rng) {
    auto x = BitString::random(n, rng);
    auto b = BasisString::random(n, rng);
    auto r0 = sample_hash_seed(n, ell, rng);
    auto r1 = sample_hash_seed(n, ell, rng);
    auto s = fixed_bb84_sender(x, b, r0, r1);
    s.name = "honest";
    return s;
}

SenderStrategy fixed_bb84_sender(const BitString &x, const BasisString &b, const HashSeed &r0, const HashSeed &r1) {
    if (x.size() != b.size()) {
        throw std::invalid_argument("fixed_bb84_sender: x and b differ in length");
    }
    return SenderStrategy{"fixed-bb84", encode_bb84(x, b, "s"), x.size(), b, r0, r1};
}

SenderStrategy product_sender(const std::vector<Amplitudes> &qubits, const BasisString &b, const HashSeed &r0,
                              const HashSeed &r1) {
    if (qubits.empty() || qubits.size() != b.size()) {
        throw std::invalid_argument("product_sender: need one state per basis entry");
    }
    QuantumState state = QuantumState::empty();
    for (std::size_t i = 0; i < qubits.size(); ++i) {
        if (qubits[i].size() != 2) {
            throw std::invalid_argument("product_sender: each qubit needs two amplitudes");
        }
        Amplitudes a = qubits[i] / qubits[i].norm();
        state = state.tensor(QuantumState::pure({"s" + std::to_string(i)}, a));
    }
    return SenderStrategy{"product", state, qubits.size(), b, r0, r1};
}

SenderStrategy epr_sender(std::size_t n, std::size_t ell, Rng &rng) {
    if (2 * n > max_qubits()) {
        throw std::invalid_argument("epr_sender: 2n exceeds max_qubits");
    }
    QuantumState state = QuantumState::empty();
    for (std::size_t i = 0; i < n; ++i) {
        state = state.tensor(QuantumState::epr_pair("s" + std::to_string(i), "k" + std::to_string(i)));
    }
    auto b = BasisString::random(n, rng);
    auto r0 = sample_hash_seed(n, ell, rng);
    auto r1 = sample_hash_seed(n, ell, rng);
    return SenderStrategy{"epr", state, n, b, r0, r1};
}

}  // namespace bqs
