#include "bqs/qstate.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "bqs/errors.h"

namespace bqs {

namespace {

std::atomic<std::size_t> g_max_qubits{kDefaultMaxQubits};

void check_size(std::size_t n) {
    if (n > max_qubits()) {
        throw std::invalid_argument("register of " + std::to_string(n) +
                                    " qubits exceeds max_qubits = " + std::to_string(max_qubits()));
    }
}

void check_distinct(const Labels &labels) {
    std::set<std::string> seen(labels.begin(), labels.end());
    if (seen.size() != labels.size()) {
        throw std::invalid_argument("duplicate qubit label");
    }
}

// Index bookkeeping for splitting a register into (rest, targets).
struct Split {
    std::vector<std::size_t> target_offsets;  // indexed by target bits, MSB = targets[0]
    std::vector<std::size_t> rest_offsets;    // indexed by rest bits, MSB = first rest qubit
};

Split split_register(std::size_t num_qubits, const std::vector<std::size_t> &target_positions) {
    std::vector<bool> is_target(num_qubits, false);
    for (auto p : target_positions) {
        is_target[p] = true;
    }
    std::vector<std::size_t> rest_positions;
    for (std::size_t p = 0; p < num_qubits; ++p) {
        if (!is_target[p]) {
            rest_positions.push_back(p);
        }
    }
    auto offsets = [num_qubits](const std::vector<std::size_t> &positions) {
        std::size_t k = positions.size();
        std::vector<std::size_t> out(std::size_t{1} << k, 0);
        for (std::size_t v = 0; v < out.size(); ++v) {
            std::size_t full = 0;
            for (std::size_t j = 0; j < k; ++j) {
                if ((v >> (k - 1 - j)) & 1u) {
                    full |= std::size_t{1} << (num_qubits - 1 - positions[j]);
                }
            }
            out[v] = full;
        }
        return out;
    };
    return Split{offsets(target_positions), offsets(rest_positions)};
}

std::vector<std::size_t> positions_of(const QuantumState &state, const Labels &targets) {
    std::vector<std::size_t> positions;
    positions.reserve(targets.size());
    for (const auto &t : targets) {
        positions.push_back(state.position(t));
    }
    std::set<std::size_t> unique(positions.begin(), positions.end());
    if (unique.size() != positions.size()) {
        throw std::invalid_argument("duplicate target qubit");
    }
    return positions;
}

double max_abs(const Operator &m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace

// Constructs states without re-validating invariants that hold by
// construction inside this file.
struct StateAccess {
    static QuantumState make(Labels labels, Amplitudes a) {
        return QuantumState(std::move(labels), std::move(a));
    }
    static QuantumState make(Labels labels, Operator rho) {
        return QuantumState(std::move(labels), std::move(rho));
    }
    static const std::variant<Amplitudes, Operator> &data(const QuantumState &s) { return s.data_; }
};

std::size_t max_qubits() { return g_max_qubits.load(); }

void set_max_qubits(std::size_t n) {
    if (n == 0 || n > 24) {
        throw std::invalid_argument("max_qubits must be in [1, 24]");
    }
    g_max_qubits.store(n);
}

QuantumState QuantumState::zeros(Labels labels) {
    check_size(labels.size());
    check_distinct(labels);
    Amplitudes a = Amplitudes::Zero(std::size_t{1} << labels.size());
    a(0) = 1.0;
    return QuantumState(std::move(labels), std::move(a));
}

QuantumState QuantumState::pure(Labels labels, Amplitudes amplitudes) {
    check_size(labels.size());
    check_distinct(labels);
    if (static_cast<std::size_t>(amplitudes.size()) != (std::size_t{1} << labels.size())) {
        throw std::invalid_argument("amplitude vector length does not match qubit count");
    }
    if (std::abs(amplitudes.norm() - 1.0) > kStateTolerance) {
        throw std::invalid_argument("state vector is not normalized");
    }
    return QuantumState(std::move(labels), std::move(amplitudes));
}

QuantumState QuantumState::mixed(Labels labels, Operator density) {
    check_size(labels.size());
    check_distinct(labels);
    auto dim = static_cast<Eigen::Index>(std::size_t{1} << labels.size());
    if (density.rows() != dim || density.cols() != dim) {
        throw std::invalid_argument("density matrix dimension does not match qubit count");
    }
    if (max_abs(density - density.adjoint()) > kStateTolerance) {
        throw std::invalid_argument("density matrix is not Hermitian");
    }
    if (std::abs(density.trace().real() - 1.0) > kStateTolerance) {
        throw std::invalid_argument("density matrix trace is not 1");
    }
    Eigen::SelfAdjointEigenSolver<Operator> solver(density, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -kStateTolerance) {
        throw std::invalid_argument("density matrix has a negative eigenvalue");
    }
    return QuantumState(std::move(labels), std::move(density));
}

QuantumState QuantumState::empty() {
    Amplitudes a(1);
    a(0) = 1.0;
    return QuantumState({}, std::move(a));
}

QuantumState QuantumState::epr_pair(const std::string &first, const std::string &second) {
    Amplitudes a = Amplitudes::Zero(4);
    a(0) = a(3) = 1.0 / std::numbers::sqrt2;
    return pure({first, second}, std::move(a));
}

bool QuantumState::has_label(const std::string &label) const {
    return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

std::size_t QuantumState::position(const std::string &label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) {
        throw std::invalid_argument("unknown qubit label: " + label);
    }
    return static_cast<std::size_t>(it - labels_.begin());
}

const Amplitudes &QuantumState::amplitudes() const {
    if (!is_pure()) {
        throw std::logic_error("amplitudes() on a mixed state");
    }
    return std::get<Amplitudes>(data_);
}

Operator QuantumState::density_matrix() const {
    if (is_pure()) {
        const auto &a = std::get<Amplitudes>(data_);
        return a * a.adjoint();
    }
    return std::get<Operator>(data_);
}

QuantumState QuantumState::tensor(const QuantumState &other) const {
    Labels labels = labels_;
    labels.insert(labels.end(), other.labels_.begin(), other.labels_.end());
    check_size(labels.size());
    check_distinct(labels);
    if (is_pure() && other.is_pure()) {
        const auto &a = amplitudes();
        const auto &b = other.amplitudes();
        Amplitudes out(a.size() * b.size());
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            out.segment(i * b.size(), b.size()) = a(i) * b;
        }
        return QuantumState(std::move(labels), std::move(out));
    }
    Operator a = density_matrix();
    Operator b = other.density_matrix();
    Operator out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return QuantumState(std::move(labels), std::move(out));
}

QuantumState QuantumState::relabeled(Labels labels) const {
    if (labels.size() != labels_.size()) {
        throw std::invalid_argument("relabeled: label count mismatch");
    }
    check_distinct(labels);
    return QuantumState(std::move(labels), data_);
}

QuantumState QuantumState::reordered(const Labels &order) const {
    if (order.size() != labels_.size()) {
        throw std::invalid_argument("reordered: not a permutation of the labels");
    }
    auto positions = positions_of(*this, order);
    // With every qubit a target and no rest qubits, target_offsets maps an
    // index in the new order to the index in the old order.
    auto split = split_register(labels_.size(), positions);
    const auto &map = split.target_offsets;
    if (is_pure()) {
        const auto &a = amplitudes();
        Amplitudes out(a.size());
        for (std::size_t v = 0; v < map.size(); ++v) {
            out(v) = a(map[v]);
        }
        return QuantumState(order, std::move(out));
    }
    const auto &rho = std::get<Operator>(data_);
    Operator out(rho.rows(), rho.cols());
    for (std::size_t i = 0; i < map.size(); ++i) {
        for (std::size_t j = 0; j < map.size(); ++j) {
            out(i, j) = rho(map[i], map[j]);
        }
    }
    return QuantumState(order, std::move(out));
}

Amplitudes bb84_amplitudes(int x, int basis) {
    Amplitudes a(2);
    if (basis == 0) {
        a << (x == 0 ? 1.0 : 0.0), (x == 0 ? 0.0 : 1.0);
    } else {
        double s = 1.0 / std::numbers::sqrt2;
        a << s, (x == 0 ? s : -s);
    }
    return a;
}

QuantumState encode_bb84(const BitString &x, const BasisString &b, const std::string &label_prefix) {
    if (x.size() != b.size()) {
        throw std::invalid_argument("encode_bb84: |x| != |b|");
    }
    check_size(x.size());
    Labels labels;
    Amplitudes state(1);
    state(0) = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        labels.push_back(label_prefix + std::to_string(i));
        Amplitudes q = bb84_amplitudes(x[i], b[i]);
        Amplitudes next(state.size() * 2);
        for (Eigen::Index k = 0; k < state.size(); ++k) {
            next(2 * k) = state(k) * q(0);
            next(2 * k + 1) = state(k) * q(1);
        }
        state = std::move(next);
    }
    return StateAccess::make(std::move(labels), std::move(state));
}

QuantumState apply_unitary(const QuantumState &state, const Labels &targets, const Operator &u) {
    auto positions = positions_of(state, targets);
    auto dim = static_cast<Eigen::Index>(std::size_t{1} << targets.size());
    if (u.rows() != dim || u.cols() != dim) {
        throw std::invalid_argument("unitary dimension does not match target count");
    }
    if (max_abs(u.adjoint() * u - Operator::Identity(dim, dim)) > kStateTolerance) {
        throw std::invalid_argument("matrix is not unitary");
    }
    auto split = split_register(state.num_qubits(), positions);
    auto apply_to_vector = [&](auto &&get, auto &&put) {
        Amplitudes v(dim);
        for (auto rest : split.rest_offsets) {
            for (Eigen::Index t = 0; t < dim; ++t) {
                v(t) = get(rest + split.target_offsets[t]);
            }
            Amplitudes w = u * v;
            for (Eigen::Index t = 0; t < dim; ++t) {
                put(rest + split.target_offsets[t], w(t));
            }
        }
    };
    if (state.is_pure()) {
        Amplitudes a = state.amplitudes();
        apply_to_vector([&](std::size_t i) { return a(i); }, [&](std::size_t i, Complex z) { a(i) = z; });
        return QuantumState(state.labels_, std::move(a));
    }
    Operator rho = std::get<Operator>(state.data_);
    // rho -> U rho, column by column; then (U (U rho)^dagger)^dagger.
    for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index col = 0; col < rho.cols(); ++col) {
            apply_to_vector([&](std::size_t i) { return rho(i, col); },
                            [&](std::size_t i, Complex z) { rho(i, col) = z; });
        }
        rho = rho.adjoint().eval();
    }
    return QuantumState(state.labels_, std::move(rho));
}

QuantumState partial_trace(const QuantumState &state, const Labels &discard) {
    auto discard_positions = positions_of(state, discard);
    if (discard.size() >= state.num_qubits() && state.num_qubits() > 0) {
        throw std::invalid_argument("partial_trace: cannot discard every qubit");
    }
    auto split = split_register(state.num_qubits(), discard_positions);
    Labels kept;
    for (const auto &l : state.labels()) {
        if (std::find(discard.begin(), discard.end(), l) == discard.end()) {
            kept.push_back(l);
        }
    }
    auto keep_dim = static_cast<Eigen::Index>(split.rest_offsets.size());
    auto drop_dim = static_cast<Eigen::Index>(split.target_offsets.size());
    Operator reduced = Operator::Zero(keep_dim, keep_dim);
    if (state.is_pure()) {
        const auto &a = state.amplitudes();
        Operator psi(keep_dim, drop_dim);
        for (Eigen::Index i = 0; i < keep_dim; ++i) {
            for (Eigen::Index d = 0; d < drop_dim; ++d) {
                psi(i, d) = a(split.rest_offsets[i] + split.target_offsets[d]);
            }
        }
        reduced = psi * psi.adjoint();
    } else {
        const auto &rho = std::get<Operator>(state.data_);
        for (Eigen::Index i = 0; i < keep_dim; ++i) {
            for (Eigen::Index j = 0; j < keep_dim; ++j) {
                Complex sum = 0;
                for (Eigen::Index d = 0; d < drop_dim; ++d) {
                    sum += rho(split.rest_offsets[i] + split.target_offsets[d],
                               split.rest_offsets[j] + split.target_offsets[d]);
                }
                reduced(i, j) = sum;
            }
        }
    }
    return QuantumState(std::move(kept), std::move(reduced));
}

namespace {

// Probability of reading 0 on `target` in the computational basis. Both
// outcome weights are summed directly so that a near-impossible outcome gets
// a near-zero probability instead of a rounding residue of 1 - p0.
double probability_zero(const QuantumState &state, std::size_t target) {
    std::size_t mask = std::size_t{1} << (state.num_qubits() - 1 - target);
    double w[2] = {0, 0};
    if (state.is_pure()) {
        const auto &a = state.amplitudes();
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            w[(static_cast<std::size_t>(i) & mask) != 0] += std::norm(a(i));
        }
    } else {
        Operator rho = state.density_matrix();
        for (Eigen::Index i = 0; i < rho.rows(); ++i) {
            w[(static_cast<std::size_t>(i) & mask) != 0] += std::max(0.0, rho(i, i).real());
        }
    }
    return w[0] / (w[0] + w[1]);
}

QuantumState project_computational(const QuantumState &state, std::size_t target, int outcome,
                                   double probability) {
    std::size_t mask = std::size_t{1} << (state.num_qubits() - 1 - target);
    auto keeps = [&](Eigen::Index i) {
        bool one = (static_cast<std::size_t>(i) & mask) != 0;
        return one == (outcome == 1);
    };
    if (state.is_pure()) {
        Amplitudes a = state.amplitudes();
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            if (!keeps(i)) {
                a(i) = 0;
            }
        }
        a /= std::sqrt(probability);
        return StateAccess::make(state.labels(), std::move(a));
    }
    Operator rho = state.density_matrix();
    for (Eigen::Index i = 0; i < rho.rows(); ++i) {
        for (Eigen::Index j = 0; j < rho.cols(); ++j) {
            if (!keeps(i) || !keeps(j)) {
                rho(i, j) = 0;
            }
        }
    }
    rho /= probability;
    return StateAccess::make(state.labels(), std::move(rho));
}

void check_measurement_args(const QuantumState &state, const Labels &targets, const BasisString &bases) {
    if (targets.size() != bases.size()) {
        throw std::invalid_argument("measure: one basis per target required");
    }
    positions_of(state, targets);
    if (state.is_pure() && std::abs(state.amplitudes().norm() - 1.0) > kStateTolerance) {
        throw std::invalid_argument("measure: state is not normalized");
    }
}

}  // namespace

MeasurementResult measure(const QuantumState &state, const Labels &targets, const BasisString &bases,
                          Rng &rng) {
    check_measurement_args(state, targets, bases);
    QuantumState current = state;
    BitString outcome;
    for (std::size_t k = 0; k < targets.size(); ++k) {
        const auto &label = targets[k];
        if (bases[k] == 1) {
            current = apply_unitary(current, {label}, gates::hadamard());
        }
        std::size_t pos = current.position(label);
        double p0 = probability_zero(current, pos);
        int bit = rng.uniform() < p0 ? 0 : 1;
        current = project_computational(current, pos, bit, bit == 0 ? p0 : 1.0 - p0);
        if (bases[k] == 1) {
            current = apply_unitary(current, {label}, gates::hadamard());
        }
        outcome.push_back(bit);
    }
    return {std::move(outcome), std::move(current)};
}

std::vector<MeasurementBranch> measurement_branches(const QuantumState &state, const Labels &targets,
                                                    const BasisString &bases) {
    check_measurement_args(state, targets, bases);
    std::vector<MeasurementBranch> branches{{BitString(), 1.0, state}};
    for (std::size_t k = 0; k < targets.size(); ++k) {
        std::vector<MeasurementBranch> next;
        for (auto &branch : branches) {
            QuantumState rotated = bases[k] == 1 ? apply_unitary(branch.post, {targets[k]}, gates::hadamard())
                                                 : branch.post;
            std::size_t pos = rotated.position(targets[k]);
            double p0 = probability_zero(rotated, pos);
            for (int bit = 0; bit < 2; ++bit) {
                double p = bit == 0 ? p0 : 1.0 - p0;
                if (p <= 1e-15) {
                    continue;
                }
                QuantumState post = project_computational(rotated, pos, bit, p);
                if (bases[k] == 1) {
                    post = apply_unitary(post, {targets[k]}, gates::hadamard());
                }
                BitString outcome = branch.outcome;
                outcome.push_back(bit);
                next.push_back({std::move(outcome), branch.probability * p, std::move(post)});
            }
        }
        branches = std::move(next);
    }
    return branches;
}

QuantumState remove_collapsed(const QuantumState &state, const Labels &targets, const BitString &bits) {
    if (targets.size() != bits.size()) {
        throw std::invalid_argument("remove_collapsed: one bit per target required");
    }
    if (targets.empty()) {
        return state;
    }
    auto positions = positions_of(state, targets);
    auto split = split_register(state.num_qubits(), positions);
    std::size_t fixed = split.target_offsets[bits.to_uint()];
    Labels kept;
    for (const auto &l : state.labels()) {
        if (std::find(targets.begin(), targets.end(), l) == targets.end()) {
            kept.push_back(l);
        }
    }
    auto dim = static_cast<Eigen::Index>(split.rest_offsets.size());
    if (state.is_pure()) {
        const auto &a = state.amplitudes();
        Amplitudes out(dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            out(i) = a(split.rest_offsets[i] + fixed);
        }
        if (std::abs(out.norm() - 1.0) > 1e-7) {
            throw std::invalid_argument("remove_collapsed: qubits are not in the stated basis state");
        }
        out.normalize();
        return StateAccess::make(std::move(kept), std::move(out));
    }
    Operator rho = state.density_matrix();
    Operator out(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            out(i, j) = rho(split.rest_offsets[i] + fixed, split.rest_offsets[j] + fixed);
        }
    }
    double tr = out.trace().real();
    if (std::abs(tr - 1.0) > 1e-7) {
        throw std::invalid_argument("remove_collapsed: qubits are not in the stated basis state");
    }
    out /= tr;
    return StateAccess::make(std::move(kept), std::move(out));
}

double epr_fidelity(const QuantumState &state, const std::string &a, const std::string &b) {
    Labels others;
    for (const auto &l : state.labels()) {
        if (l != a && l != b) {
            others.push_back(l);
        }
    }
    QuantumState pair = others.empty() ? state : partial_trace(state, others);
    pair = pair.reordered({a, b});
    Operator rho = pair.density_matrix();
    Amplitudes phi = Amplitudes::Zero(4);
    phi(0) = phi(3) = 1.0 / std::numbers::sqrt2;
    return (phi.adjoint() * rho * phi)(0, 0).real();
}

TeleportResult teleport_uncorrected(const QuantumState &state, const std::string &payload,
                                    const std::string &local, const std::string &remote, Rng &rng) {
    if (payload == local || payload == remote || local == remote) {
        throw std::invalid_argument("teleport: payload, local and remote must be distinct");
    }
    state.position(payload);
    // Entanglement between the payload and the pair would make the pair's
    // reduced state mixed, so this also rules out reusing a half as payload.
    if (epr_fidelity(state, local, remote) < 1.0 - kStateTolerance) {
        throw std::invalid_argument("teleport: (local, remote) is not a maximally entangled pair");
    }
    QuantumState s = apply_unitary(state, {payload, local}, gates::cnot());
    s = apply_unitary(s, {payload}, gates::hadamard());
    auto m = measure(s, {payload, local}, BasisString{0, 0}, rng);
    QuantumState rest = remove_collapsed(m.post, {payload, local}, m.outcome);
    return {m.outcome, std::move(rest)};
}

QuantumState apply_teleport_correction(const QuantumState &state, const std::string &target,
                                       const BitString &classical) {
    if (classical.size() != 2) {
        throw std::invalid_argument("teleport correction needs two bits");
    }
    QuantumState s = state;
    if (classical[1] == 1) {
        s = apply_unitary(s, {target}, gates::pauli_x());
    }
    if (classical[0] == 1) {
        s = apply_unitary(s, {target}, gates::pauli_z());
    }
    return s;
}

TeleportResult teleport(const QuantumState &state, const std::string &payload, const std::string &local,
                        const std::string &remote, Rng &rng) {
    auto result = teleport_uncorrected(state, payload, local, remote, rng);
    result.state = apply_teleport_correction(result.state, remote, result.classical);
    return result;
}

MemoryBoundOutcome enforce_memory_bound(const QuantumState &state, const Labels &keep,
                                        std::size_t memory_bound, Rng &rng) {
    positions_of(state, keep);
    if (keep.size() > memory_bound) {
        throw MemoryBoundViolation("memory bound: asked to keep " + std::to_string(keep.size()) +
                                   " qubits with a bound of " + std::to_string(memory_bound));
    }
    Labels measured;
    for (const auto &l : state.labels()) {
        if (std::find(keep.begin(), keep.end(), l) == keep.end()) {
            measured.push_back(l);
        }
    }
    if (measured.empty()) {
        return {{}, BitString(), state};
    }
    auto m = measure(state, measured, BasisString(BitString(measured.size())), rng);
    QuantumState retained = remove_collapsed(m.post, measured, m.outcome);
    return {std::move(measured), std::move(m.outcome), std::move(retained)};
}

double half_trace_norm(const Operator &hermitian) {
    Eigen::SelfAdjointEigenSolver<Operator> solver(hermitian, Eigen::EigenvaluesOnly);
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

double trace_distance(const QuantumState &rho, const QuantumState &sigma) {
    if (rho.num_qubits() != sigma.num_qubits()) {
        throw std::invalid_argument("trace_distance: dimension mismatch");
    }
    if (rho.is_pure() && sigma.is_pure()) {
        // sqrt(1 - |<a|b>|^2), written as |a - e^{i phi} b|^2 (1 + |<a|b>|) / 2
        // with the global phase aligned, to avoid cancellation for close states.
        const auto &a = rho.amplitudes();
        const auto &b = sigma.amplitudes();
        Complex ov = b.dot(a);
        double mag = std::abs(ov);
        if (mag < 1e-300) {
            return 1.0;
        }
        double gap = (a - b * (ov / mag)).squaredNorm();
        return std::clamp(std::sqrt(gap * (1 + mag) / 2), 0.0, 1.0);
    }
    double d = half_trace_norm(rho.density_matrix() - sigma.density_matrix());
    return std::clamp(d, 0.0, 1.0);
}

namespace gates {

Operator identity(std::size_t qubits) {
    auto dim = static_cast<Eigen::Index>(std::size_t{1} << qubits);
    return Operator::Identity(dim, dim);
}

Operator hadamard() {
    Operator h(2, 2);
    double s = 1.0 / std::numbers::sqrt2;
    h << s, s, s, -s;
    return h;
}

Operator pauli_x() {
    Operator x(2, 2);
    x << 0, 1, 1, 0;
    return x;
}

Operator pauli_z() {
    Operator z(2, 2);
    z << 1, 0, 0, -1;
    return z;
}

Operator cnot() {
    Operator c = Operator::Zero(4, 4);
    c(0, 0) = c(1, 1) = c(2, 3) = c(3, 2) = 1;
    return c;
}

}  // namespace gates

Bb84Product::Bb84Product(BitString x, BasisString b) : x_(std::move(x)), b_(std::move(b)) {
    if (x_.size() != b_.size()) {
        throw std::invalid_argument("Bb84Product: |x| != |b|");
    }
}

int Bb84Product::measure(std::size_t i, int basis, Rng &rng) const {
    if (i >= size()) {
        throw std::out_of_range("Bb84Product::measure: no such qubit");
    }
    // Same basis reproduces the encoded bit; the conjugate basis gives
    // |<y_c|x_b>|^2 = 1/2 for both outcomes.
    return basis == b_[i] ? x_[i] : rng.bit();
}

QuantumState Bb84Product::materialize(const std::vector<std::size_t> &positions,
                                      const std::string &label_prefix) const {
    if (positions.empty()) {
        return QuantumState::empty();
    }
    BitString xs;
    BitString bs;
    for (auto p : positions) {
        xs.push_back(x_[p]);
        bs.push_back(b_[p]);
    }
    auto state = encode_bb84(xs, BasisString(bs), label_prefix);
    Labels labels;
    for (auto p : positions) {
        labels.push_back(label_prefix + std::to_string(p));
    }
    return state.relabeled(std::move(labels));
}

}  // namespace bqs
