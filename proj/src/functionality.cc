#include "bqs/functionality.h"

#include <stdexcept>

namespace bqs {

FunctionalityKind parse_functionality(const std::string &name) {
    if (name == "ROT" || name == "rot") return FunctionalityKind::ROT;
    if (name == "TOR" || name == "tor") return FunctionalityKind::TOR;
    if (name == "OT" || name == "ot") return FunctionalityKind::OT;
    if (name == "BC" || name == "bc") return FunctionalityKind::BC;
    throw std::invalid_argument("unknown functionality: " + name);
}

std::string to_string(FunctionalityKind k) {
    switch (k) {
        case FunctionalityKind::ROT: return "ROT";
        case FunctionalityKind::TOR: return "TOR";
        case FunctionalityKind::OT: return "OT";
        case FunctionalityKind::BC: return "BC";
    }
    return "?";
}

std::string to_string(Corruption c) {
    switch (c) {
        case Corruption::None: return "none";
        case Corruption::A: return "A";
        case Corruption::B: return "B";
    }
    return "?";
}

namespace {

void check_bit(int v, const char *what) {
    if (v != 0 && v != 1) {
        throw std::invalid_argument(std::string(what) + " must be 0 or 1");
    }
}

void check_strings(const OtStrings &s, std::size_t ell) {
    if (s.x0.size() != ell || s.x1.size() != ell) {
        throw std::invalid_argument("strings must have ell = " + std::to_string(ell) + " bits");
    }
}

void check_choice(const OtChoice &ch, std::size_t ell) {
    check_bit(ch.c, "c");
    if (ch.y.size() != ell) {
        throw std::invalid_argument("y must have ell = " + std::to_string(ell) + " bits");
    }
}

}  // namespace

RotSample ideal_rot(std::size_t ell, Rng &rng) {
    RotSample s;
    s.strings.x0 = BitString::random(ell, rng);
    s.strings.x1 = BitString::random(ell, rng);
    s.choice.c = rng.bit();
    s.choice.y = s.strings.at(s.choice.c);
    return s;
}

OtChoice ideal_rot_corrupt_sender(const OtStrings &strings, Rng &rng) {
    if (strings.x0.size() != strings.x1.size()) {
        throw std::invalid_argument("x0 and x1 differ in length");
    }
    int c = rng.bit();
    return {c, strings.at(c)};
}

OtStrings ideal_rot_corrupt_receiver(const OtChoice &choice, std::size_t ell, Rng &rng) {
    check_choice(choice, ell);
    BitString other = BitString::random(ell, rng);
    return choice.c == 0 ? OtStrings{choice.y, other} : OtStrings{other, choice.y};
}

BitString ideal_ot(const OtStrings &strings, int c) {
    check_bit(c, "c");
    if (strings.x0.size() != strings.x1.size()) {
        throw std::invalid_argument("x0 and x1 differ in length");
    }
    return strings.at(c);
}

void IdealBitCommitment::commit(int b) {
    check_bit(b, "b");
    if (committed_) {
        throw std::logic_error("BC: commit called twice");
    }
    b_ = b;
    committed_ = true;
}

std::optional<int> IdealBitCommitment::open(int a) {
    check_bit(a, "a");
    if (!committed_) {
        throw std::logic_error("BC: open before commit");
    }
    if (opened_) {
        throw std::logic_error("BC: open called twice");
    }
    opened_ = true;
    if (a == 1) {
        return b_;
    }
    return std::nullopt;
}

IdealOutputs run_ideal(const FunctionalitySpec &spec, const IdealInputs &in, Rng &rng) {
    IdealOutputs out;
    auto reject = [&](bool bad, const std::string &what) {
        if (bad) {
            throw std::invalid_argument(to_string(spec.kind) + " with corruption " + to_string(spec.corruption) +
                                        ": " + what);
        }
    };
    switch (spec.kind) {
        case FunctionalityKind::ROT:
        case FunctionalityKind::TOR: {
            reject(in.c || in.b || in.a, "takes no c, b or a input");
            // For ROT A holds the strings; TOR swaps the roles.
            Corruption string_holder = spec.kind == FunctionalityKind::ROT ? Corruption::A : Corruption::B;
            if (spec.corruption == Corruption::None) {
                reject(in.strings || in.choice, "the honest variant takes no inputs");
                auto s = ideal_rot(spec.ell, rng);
                out.strings = s.strings;
                out.choice = s.choice;
            } else if (spec.corruption == string_holder) {
                reject(!in.strings || in.choice, "needs exactly the strings input");
                check_strings(*in.strings, spec.ell);
                out.strings = *in.strings;
                out.choice = ideal_rot_corrupt_sender(*in.strings, rng);
            } else {
                reject(!in.choice || in.strings, "needs exactly the (c, y) input");
                check_choice(*in.choice, spec.ell);
                out.choice = *in.choice;
                out.strings = ideal_rot_corrupt_receiver(*in.choice, spec.ell, rng);
            }
            break;
        }
        case FunctionalityKind::OT: {
            reject(!in.strings || !in.c || in.choice || in.b || in.a, "needs exactly strings and c");
            check_strings(*in.strings, spec.ell);
            check_bit(*in.c, "c");
            out.strings = *in.strings;
            out.choice = OtChoice{*in.c, ideal_ot(*in.strings, *in.c)};
            break;
        }
        case FunctionalityKind::BC: {
            reject(!in.b || !in.a || in.strings || in.choice || in.c, "needs exactly b and a");
            IdealBitCommitment bc;
            bc.commit(*in.b);
            out.bc_output = bc.open(*in.a);
            break;
        }
    }
    return out;
}

}  // namespace bqs
