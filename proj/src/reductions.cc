#include <cmath>
#include <stdexcept>

#include "bqs/engine.h"
#include "bqs/errors.h"

namespace bqs {

namespace {

BitString bit(int v) { return BitString{v}; }

void check_bit(int v, const char *what) {
    if (v != 0 && v != 1) {
        throw std::invalid_argument(std::string(what) + " must be 0 or 1");
    }
}

std::string outcome(const std::vector<std::pair<std::string, BitString>> &fields) {
    std::string s;
    for (const auto &[name, value] : fields) {
        if (!s.empty()) {
            s += ",";
        }
        s += name + "=" + value.to_string();
    }
    return s;
}

// All 2^ell strings of length ell.
std::vector<BitString> all_strings(std::size_t ell) {
    if (ell > 16) {
        throw std::invalid_argument("exact enumeration limited to ell <= 16");
    }
    std::vector<BitString> out;
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << ell); ++v) {
        out.push_back(BitString::from_uint(v, ell));
    }
    return out;
}

}  // namespace

OtFromRotResult ot_from_rot(const OtStrings &x, int c, const RotSample &rot, std::uint64_t trial) {
    check_bit(c, "c");
    std::size_t ell = x.x0.size();
    if (x.x1.size() != ell || rot.strings.x0.size() != ell || rot.strings.x1.size() != ell ||
        rot.choice.y.size() != ell) {
        throw std::invalid_argument("OTfromROT: x0, x1 and the ROT strings must all have the same length");
    }
    OtFromRotResult r;
    r.rot = rot;
    r.transcript = Transcript(trial);
    auto &t = r.transcript;
    t.begin_phase("OTfromROT");
    t.record("Input", "A", x.x0.concat(x.x1), "x0,x1");
    t.record("Input", "B", bit(c), "c");
    t.record("Ideal", "ROT->A", rot.strings.x0.concat(rot.strings.x1), "x'0,x'1");
    t.record("Ideal", "ROT->B", bit(rot.choice.c).concat(rot.choice.y), "c',y'");
    t.next_round();
    r.d = rot.choice.c ^ c;
    t.record("Comm", "B->A", bit(r.d), "d");
    t.next_round();
    r.m = {x.x0 ^ rot.strings.at(r.d), x.x1 ^ rot.strings.at(1 ^ r.d)};
    t.record("Comm", "A->B", r.m.x0.concat(r.m.x1), "m0,m1");
    t.next_round();
    r.y = r.m.at(c) ^ rot.choice.y;
    t.record("Output", "B", r.y, "y");
    t.end_phase("OTfromROT");
    return r;
}

OtFromRotResult run_ot_from_rot(const OtStrings &x, int c, Rng &rng, std::uint64_t trial) {
    if (x.x0.size() != x.x1.size()) {
        throw std::invalid_argument("OTfromROT: x0 and x1 differ in length");
    }
    return ot_from_rot(x, c, ideal_rot(x.x0.size(), rng), trial);
}

Rational total_variation(const ExactOutcomes &p, const ExactOutcomes &q) {
    Rational sum = 0;
    for (const auto &[k, v] : p) {
        auto it = q.find(k);
        Rational diff = it == q.end() ? v : v - it->second;
        sum += diff < 0 ? Rational(-diff) : diff;
    }
    for (const auto &[k, v] : q) {
        if (!p.count(k)) {
            sum += v;
        }
    }
    return sum / 2;
}

ExactOutcomes ot_from_rot_real_corrupt_sender(const RotSenderAdversary &adv, int c) {
    check_bit(c, "c");
    ExactOutcomes out;
    for (int cp = 0; cp < 2; ++cp) {
        int d = cp ^ c;
        auto m = adv.respond(d);
        BitString y = m.at(c) ^ adv.rot_input.at(cp);
        out[outcome({{"d", bit(d)}, {"m0", m.x0}, {"m1", m.x1}, {"y", y}})] += Rational(1, 2);
    }
    return out;
}

ExactOutcomes ot_from_rot_ideal_corrupt_sender(const RotSenderAdversary &adv, int c) {
    check_bit(c, "c");
    ExactOutcomes out;
    for (int d = 0; d < 2; ++d) {
        auto m = adv.respond(d);
        // The simulator turns the reply into OT inputs.
        OtStrings x{m.x0 ^ adv.rot_input.at(d), m.x1 ^ adv.rot_input.at(1 ^ d)};
        BitString y = ideal_ot(x, c);
        out[outcome({{"d", bit(d)}, {"m0", m.x0}, {"m1", m.x1}, {"y", y}})] += Rational(1, 2);
    }
    return out;
}

ExactOutcomes ot_from_rot_real_corrupt_receiver(const RotReceiverAdversary &adv, const OtStrings &x) {
    std::size_t ell = x.x0.size();
    auto strings = all_strings(ell);
    Rational w(1, static_cast<long long>(strings.size()));
    ExactOutcomes out;
    for (const auto &r : strings) {
        OtStrings xp = adv.rot_input.c == 0 ? OtStrings{adv.rot_input.y, r} : OtStrings{r, adv.rot_input.y};
        OtStrings m{x.x0 ^ xp.at(adv.d), x.x1 ^ xp.at(1 ^ adv.d)};
        out[outcome({{"m0", m.x0}, {"m1", m.x1}})] += w;
    }
    return out;
}

ExactOutcomes ot_from_rot_ideal_corrupt_receiver(const RotReceiverAdversary &adv, const OtStrings &x) {
    std::size_t ell = x.x0.size();
    auto strings = all_strings(ell);
    Rational w(1, static_cast<long long>(strings.size()));
    int c = adv.rot_input.c ^ adv.d;
    BitString known = ideal_ot(x, c) ^ adv.rot_input.y;
    ExactOutcomes out;
    for (const auto &r : strings) {
        OtStrings m = c == 0 ? OtStrings{known, r} : OtStrings{r, known};
        out[outcome({{"m0", m.x0}, {"m1", m.x1}})] += w;
    }
    return out;
}

TorSample ideal_tor(std::size_t ell, Rng &rng) {
    auto s = ideal_rot(ell, rng);
    return {s.strings, s.choice};
}

BitCommitmentSession::BitCommitmentSession(std::size_t ell, Transcript &transcript)
    : ell_(ell), transcript_(transcript) {
    if (ell == 0) {
        throw std::invalid_argument("BC: ell must be positive");
    }
}

void BitCommitmentSession::commit(int b, const TorSample &tor) {
    check_bit(b, "b");
    if (committed_) {
        throw std::logic_error("BC: commit called twice");
    }
    if (tor.verifier.x0.size() != ell_ || tor.verifier.x1.size() != ell_ || tor.committer.y.size() != ell_) {
        throw std::invalid_argument("BC: TOR strings must have ell bits");
    }
    tor_ = tor;
    b_ = b;
    m_ = b ^ tor.committer.c;
    committed_ = true;
    transcript_.next_round();
    transcript_.record("Comm", "A->B", bit(m_), "commit m");
}

std::optional<int> BitCommitmentSession::open(int a) {
    check_bit(a, "a");
    if (!committed_) {
        throw std::logic_error("BC: open before commit");
    }
    if (a == 0) {
        if (opened_) {
            throw std::logic_error("BC: opened twice");
        }
        opened_ = true;
        transcript_.next_round();
        transcript_.record("Comm", "A->B", "open bottom");
        transcript_.record("Output", "B", "bottom");
        return std::nullopt;
    }
    return open_with(b_, tor_.committer.y);
}

std::optional<int> BitCommitmentSession::open_with(int b, const BitString &y) {
    check_bit(b, "b");
    if (!committed_) {
        throw std::logic_error("BC: open before commit");
    }
    if (opened_) {
        throw std::logic_error("BC: opened twice");
    }
    opened_ = true;
    transcript_.next_round();
    transcript_.record("Comm", "A->B", bit(b).concat(y), "open b,y");
    std::optional<int> out;
    if (y.size() == ell_ && tor_.verifier.at(b ^ m_) == y) {
        out = b;
        transcript_.record("Output", "B", bit(b), "b");
    } else {
        transcript_.record("Output", "B", "bottom");
    }
    return out;
}

BcRun run_bc(int b, int a, std::size_t ell, Rng &rng, std::uint64_t trial) {
    return run_bc(b, a, ell, rng, AdversaryStrategy{"honest", Role::Committer}, trial);
}

BcRun run_bc(int b, int a, std::size_t ell, Rng &rng, const AdversaryStrategy &committer, std::uint64_t trial) {
    check_bit(b, "b");
    check_bit(a, "a");
    if (committer.role != Role::Committer ||
        (committer.kind != StrategyKind::Honest && committer.kind != StrategyKind::BindingCheat)) {
        throw std::invalid_argument("run_bc: committer must be honest or the binding attacker");
    }
    BcRun run;
    run.b = b;
    run.transcript = Transcript(trial);
    auto &t = run.transcript;
    t.begin_phase("OTtoBC.commit");
    auto tor = ideal_tor(ell, rng);
    t.record("Ideal", "TOR->B", tor.verifier.x0.concat(tor.verifier.x1), "x0,x1");
    t.record("Ideal", "TOR->A", bit(tor.committer.c).concat(tor.committer.y), "c,y");
    BitCommitmentSession session(ell, t);
    session.commit(b, tor);
    run.m = session.message();
    t.end_phase("OTtoBC.commit");
    t.begin_phase("OTtoBC.open");
    if (committer.kind == StrategyKind::BindingCheat) {
        // Opening 1 - (c ^ m) needs x_{1-c}, which A never saw.
        int target = 1 ^ tor.committer.c ^ run.m;
        run.cheat_target = target;
        run.verifier_output = session.open_with(target, BitString::random(ell, rng));
        run.cheat_success = run.verifier_output == target;
    } else {
        run.verifier_output = session.open(a);
    }
    t.end_phase("OTtoBC.open");
    return run;
}

ExactOutcomes bc_commit_distribution(int b, std::size_t ell) {
    check_bit(b, "b");
    if (ell == 0 || ell > 8) {
        throw std::invalid_argument("bc_commit_distribution: need 1 <= ell <= 8");
    }
    auto strings = all_strings(ell);
    Rational w(1, static_cast<long long>(2 * strings.size() * strings.size()));
    ExactOutcomes out;
    for (const auto &x0 : strings) {
        for (const auto &x1 : strings) {
            for (int c = 0; c < 2; ++c) {
                Transcript t;
                BitCommitmentSession s(ell, t);
                s.commit(b, {{x0, x1}, {c, c ? x1 : x0}});
                out["m=" + std::to_string(s.message())] += w;
            }
        }
    }
    return out;
}

ComposeResult compose_bc(const SecurityParams &params, int b, int a, Rng &rng, const ComposeOptions &options,
                         std::uint64_t trial) {
    params.validate();
    check_bit(b, "b");
    check_bit(a, "a");
    auto ell = static_cast<std::size_t>(params.ell);
    ComposeResult r;
    r.b = b;
    r.a = a;
    r.transcript = Transcript(trial);
    auto &t = r.transcript;
    r.eps = std::ldexp(1.0, -static_cast<int>(params.ell));
    r.error_budget = composed_bc_error(r.eps);
    r.within_proven_bounds = 10.0 * static_cast<double>(params.m) <=
                             ell_budget(static_cast<double>(params.n), r.eps) - 8.0 * static_cast<double>(params.ell);

    t.begin_phase("OTtoBC.commit");
    TorSample tor;
    if (options.inner == InnerImplementation::BqsTo) {
        ProtocolOptions inner = options.protocol;
        inner.sender = "B";
        inner.receiver = "A";
        inner.phase = "BQS-TO";
        inner.parent = "OTtoBC.commit";
        auto ot = run_bqs_ot(params, honest_receiver(), rng, t, inner);
        tor = {ot.sender_output, *ot.receiver_output};
    } else {
        tor = ideal_tor(ell, rng);
        t.record("Ideal", "TOR->B", tor.verifier.x0.concat(tor.verifier.x1), "x0,x1");
        t.record("Ideal", "TOR->A", bit(tor.committer.c).concat(tor.committer.y), "c,y");
    }
    r.inner_correct = tor.committer.y == tor.verifier.at(tor.committer.c);
    BitCommitmentSession session(ell, t);
    session.commit(b, tor);
    r.m = session.message();
    r.simulator_classical_bits = session.verifier_state_bits();
    t.record("Memory", "sim", "classical-between-phases bits=" + std::to_string(r.simulator_classical_bits));
    t.end_phase("OTtoBC.commit");

    t.begin_phase("OTtoBC.open");
    r.verifier_output = session.open(a);
    t.end_phase("OTtoBC.open");

    r.sender_simulator_qubits = static_cast<std::size_t>(params.n);
    r.receiver_simulator_qubits = static_cast<std::size_t>(params.m);
    return r;
}

}  // namespace bqs
