#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "bqs/engine.h"
#include "bqs/errors.h"
#include "receiver_program.h"

namespace bqs {

namespace {

bool random_bases(const AdversaryStrategy &s) {
    return s.kind == StrategyKind::Store || (s.kind == StrategyKind::Measure && s.basis_rule == BasisRule::Random);
}

std::size_t stored_count(const AdversaryStrategy &s, std::size_t n) {
    return s.kind == StrategyKind::Store ? std::min(s.store, n) : 0;
}

// Rows of the enumerated P_{X0 X1 K}: per measured position x, b and the
// basis range over their values and a wrong-basis outcome doubles the row
// count; per stored position only x and b vary.
double enumerated_rows(const AdversaryStrategy &s, std::size_t n) {
    std::size_t st = stored_count(s, n);
    double measured = n - st;
    if (random_bases(s)) {
        return std::pow(12.0, measured) * std::pow(4.0, st);
    }
    double rows = std::pow(6.0, measured) * std::pow(4.0, st);
    return s.kind == StrategyKind::Honest ? 2 * rows : rows;
}

// Smallest t with sum_u P(u) max(0, 1 - t 2^u) <= eps, where within group u
// every cell has P(x | k) = 2^-u.
double structured_cap(const std::vector<double> &pu, double eps) {
    std::vector<std::size_t> us;
    for (std::size_t u = 0; u < pu.size(); ++u) {
        if (pu[u] > 0) {
            us.push_back(u);
        }
    }
    double a = 0;
    double w = 0;
    for (std::size_t k = 0; k < us.size(); ++k) {
        a += pu[us[k]];
        w += pu[us[k]] * std::ldexp(1.0, static_cast<int>(us[k]));
        double hi = std::ldexp(1.0, -static_cast<int>(us[k]));
        double lo = k + 1 < us.size() ? std::ldexp(1.0, -static_cast<int>(us[k + 1])) : 0.0;
        // On [lo, hi] the cost is a - t w; it grows as t falls.
        double t = (a - eps) / w;
        if (a - lo * w > eps || k + 1 == us.size()) {
            return std::clamp(t, lo, hi);
        }
    }
    return 1.0;
}

std::vector<double> unknown_distribution(std::size_t n, std::size_t stored) {
    // u = stored + Binomial(n - stored, 1/2): every measured position is in
    // the wrong basis with probability 1/2, whatever the basis rule.
    std::size_t k = n - stored;
    std::vector<double> pu(n + 1, 0.0);
    for (std::size_t j = 0; j <= k; ++j) {
        double logc = std::lgamma(k + 1.0) - std::lgamma(j + 1.0) - std::lgamma(k - j + 1.0);
        pu[stored + j] = std::exp(logc - static_cast<double>(k) * std::log(2.0));
    }
    return pu;
}

std::uint64_t key_k(const BasisString &b, const ReceiverTrace &tr, std::size_t n) {
    return (b.as_bits().to_uint() << (2 * n)) | (tr.bases.to_uint() << n) | tr.outcomes.to_uint();
}

JointDistribution enumerate_view(const AdversaryStrategy &s, std::size_t n) {
    std::size_t st = stored_count(s, n);
    std::uint64_t side = std::uint64_t{1} << n;
    DistributionBuilder<double> builder({{"X0", side}, {"X1", side}, {"K", std::uint64_t{1} << (3 * n)}, {"J", 1}});
    bool per_qubit = random_bases(s);
    std::vector<int> cs;
    if (s.kind == StrategyKind::Honest) {
        cs = {0, 1};
    } else {
        cs = {s.kind == StrategyKind::Measure ? s.fixed_basis : 0};
    }
    double base = std::ldexp(1.0, -2 * static_cast<int>(n)) / static_cast<double>(cs.size());
    for (int c : cs) {
        std::function<void(std::size_t, std::uint64_t, std::size_t, std::uint64_t, std::size_t, std::uint64_t,
                           std::uint64_t, std::uint64_t, double)>
            walk = [&](std::size_t i, std::uint64_t x0, std::size_t k0, std::uint64_t x1, std::size_t k1,
                       std::uint64_t bb, std::uint64_t th, std::uint64_t out, double p) {
                if (i == n) {
                    std::uint64_t v0 = x0 << (n - k0);
                    std::uint64_t v1 = x1 << (n - k1);
                    std::uint64_t k = (bb << (2 * n)) | (th << n) | out;
                    std::uint64_t vals[] = {v0, v1, k, 0};
                    builder.add(std::span<const std::uint64_t>(vals, 4), p);
                    return;
                }
                for (int xi = 0; xi < 2; ++xi) {
                    for (int bi = 0; bi < 2; ++bi) {
                        auto nx0 = bi == 0 ? (x0 << 1) | xi : x0;
                        auto nx1 = bi == 1 ? (x1 << 1) | xi : x1;
                        auto nk0 = k0 + (bi == 0);
                        auto nk1 = k1 + (bi == 1);
                        auto nb = (bb << 1) | bi;
                        if (i < st) {
                            walk(i + 1, nx0, nk0, nx1, nk1, nb, th << 1, out << 1, p);
                            continue;
                        }
                        for (int th_i = 0; th_i < 2; ++th_i) {
                            double pth = 1.0;
                            if (per_qubit) {
                                pth = 0.5;
                            } else if (th_i != c) {
                                continue;
                            }
                            if (th_i == bi) {
                                walk(i + 1, nx0, nk0, nx1, nk1, nb, (th << 1) | th_i, (out << 1) | xi, p * pth);
                            } else {
                                for (int o = 0; o < 2; ++o) {
                                    walk(i + 1, nx0, nk0, nx1, nk1, nb, (th << 1) | th_i, (out << 1) | o,
                                         p * pth * 0.5);
                                }
                            }
                        }
                    }
                }
            };
        walk(0, 0, 0, 0, 0, 0, 0, 0, base);
    }
    return builder.build();
}

}  // namespace

ReceiverSimulator::ReceiverSimulator(const AdversaryStrategy &strategy, const SecurityParams &params,
                                     const ReceiverSimulatorOptions &options)
    : strategy_(strategy), params_(params) {
    params.validate();
    bool classical = strategy.kind == StrategyKind::Honest || strategy.kind == StrategyKind::Measure ||
                     strategy.kind == StrategyKind::Store;
    if (!classical || !strategy.enumerable) {
        throw std::invalid_argument("receiver simulator: strategy '" + strategy.name +
                                    "' has no classical description to split on");
    }
    auto n = static_cast<std::size_t>(params.n);
    if (strategy.kind == StrategyKind::Store && stored_count(strategy, n) > strategy.memory) {
        throw MemoryBoundViolation("receiver simulator: strategy stores " + std::to_string(strategy.store) +
                                   " qubits with declared m = " + std::to_string(strategy.memory));
    }
    double eps = options.eps.value_or(params.eps);
    double rows = enumerated_rows(strategy, n);
    bool fits = n <= 12 && rows <= static_cast<double>(options.row_budget);
    if (options.path == SimulatorPath::Enumerated && !fits) {
        throw EnumerationBudgetExceeded("receiver simulator: P_{X0 X1 K} has about " + std::to_string(rows) +
                                        " rows at n = " + std::to_string(n) + ", budget " +
                                        std::to_string(options.row_budget));
    }
    path_ = options.path == SimulatorPath::Auto ? (fits ? SimulatorPath::Enumerated : SimulatorPath::Structured)
                                                : options.path;
    if (path_ == SimulatorPath::Enumerated) {
        auto d = enumerate_view(strategy, n);
        table_rows_ = d.support_size();
        alpha_ = smooth_min_entropy(d, {"X0", "X1"}, {"K", "J"}, eps);
        threshold_ = std::exp2(-alpha_ / 2);
        split_ = alpha_ > 0 ? split_choice(d, alpha_, 0.0) : split_with_threshold(d, threshold_);
        threshold_ = split_->threshold;
    } else {
        auto pu = unknown_distribution(n, stored_count(strategy, n));
        alpha_ = -std::log2(structured_cap(pu, eps));
        threshold_ = std::exp2(-alpha_ / 2);
    }
}

int ReceiverSimulator::choose(const BitString &x, const BasisString &b, const ReceiverTrace &trace) const {
    std::size_t n = x.size();
    if (split_) {
        auto x0 = substring_in_basis(x, b, 0).padded(n).to_uint();
        auto x1 = substring_in_basis(x, b, 1).padded(n).to_uint();
        return split_->c(x0, x1, key_k(b, trace, n));
    }
    std::size_t u1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        u1 += b[i] == 1 && (trace.stored[i] == 1 || trace.bases[i] != b[i]);
    }
    return std::ldexp(1.0, -static_cast<int>(u1)) >= threshold_ ? 1 : 0;
}

ReceiverSimulation ReceiverSimulator::run(Rng &rng) const {
    auto n = static_cast<std::size_t>(params_.n);
    auto ell = static_cast<std::size_t>(params_.ell);
    ReceiverSimulation sim;
    // The simulator plays the sender itself.
    sim.x = BitString::random(n, rng);
    BasisString b = BasisString::random(n, rng);
    sim.b = b.as_bits();
    HashSeed r0 = sample_hash_seed(n, ell, rng);
    HashSeed r1 = sample_hash_seed(n, ell, rng);
    Bb84Product qubits(sim.x, b);
    auto state = detail::receive_qubits(strategy_, qubits, rng);
    sim.trace = state.trace;
    sim.simulator_qubits = state.memory.num_qubits();
    for (std::size_t i = 0; i < n; ++i) {
        sim.unknown_in_one += b[i] == 1 && (sim.trace.stored[i] == 1 || sim.trace.bases[i] != b[i]);
    }
    sim.C = choose(sim.x, b, sim.trace);
    sim.simulated_strings = {detail::hash_substring(r0, sim.x, b, 0), detail::hash_substring(r1, sim.x, b, 1)};
    sim.Y = sim.simulated_strings.at(sim.C);
    sim.sender_output = ideal_rot_corrupt_receiver({sim.C, sim.Y}, ell, rng);
    sim.adversary = detail::finish_receiver(strategy_, state, b, r0, r1, rng);
    return sim;
}

ReceiverSimulation simulate_receiver(const AdversaryStrategy &strategy, const SecurityParams &params, Rng &rng,
                                     const ReceiverSimulatorOptions &options) {
    return ReceiverSimulator(strategy, params, options).run(rng);
}

}  // namespace bqs
