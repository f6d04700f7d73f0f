#include "vqls/circuits.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace vqls {

namespace {

void check_system_gates(const std::vector<Gate>& gates, int n_system, const char* what) {
    for (const Gate& g : gates) {
        for (int q : g.qubits) {
            if (q < 0 || q >= n_system) {
                throw std::invalid_argument(std::string(what) + ": gate leaves the system register");
            }
        }
        if (g.control >= n_system) {
            throw std::invalid_argument(std::string(what) + ": gate leaves the system register");
        }
    }
}

Gate shifted(Gate g, int offset) {
    for (int& q : g.qubits) {
        q += offset;
    }
    if (g.control >= 0) {
        g.control += offset;
    }
    return g;
}

Gate with_ancilla_control(Gate g, int ancilla) {
    switch (g.kind) {
        case GateKind::PAULI:
        case GateKind::ORACLE:
        case GateKind::REFLECT0:
            break;
        default:
            throw std::invalid_argument("hadamard_test: gate kind cannot take an ancilla control");
    }
    if (g.control >= 0) {
        throw std::invalid_argument("hadamard_test: controlled gate already has a control");
    }
    g.control = ancilla;
    return g;
}

// Shots drawn under an active noise model are spread over this many
// independently sampled trajectories. Physical executions draw a fresh noise
// realization every shot; batching is a stratified stand-in that keeps the
// estimate's noise average unbiased while bounding any single trajectory's
// influence to 1/kNoiseTrajectories of the estimate (one correlated batch
// can otherwise invert a whole expectation value).
constexpr long kNoiseTrajectories = 16;

double ancilla_estimate(int n_qubits, const std::vector<Gate>& circuit, int ancilla,
                        const EvalBackend& backend, std::mt19937_64& rng) {
    Statevector state(n_qubits);
    if (backend.mode == EvalMode::Exact) {
        run_circuit(state, circuit, nullptr, rng);
        return 2.0 * state.bit_probability(ancilla, 0) - 1.0;
    }
    const NoiseModel* noise =
        backend.noise.has_value() && !backend.noise->all_zero() ? &*backend.noise : nullptr;
    if (noise == nullptr) {
        run_circuit(state, circuit, nullptr, rng);
        std::map<std::string, long> counts =
            measure_shots(state, {ancilla}, backend.shots, rng, 0.0);
        const long n0 = counts.count("0") ? counts.at("0") : 0;
        const long n1 = counts.count("1") ? counts.at("1") : 0;
        return static_cast<double>(n0 - n1) / static_cast<double>(backend.shots);
    }
    const long batches = std::min(backend.shots, kNoiseTrajectories);
    long remaining = backend.shots;
    long diff = 0;
    for (long b = 0; b < batches; ++b) {
        const long batch_shots = remaining / (batches - b);
        remaining -= batch_shots;
        Statevector trajectory(n_qubits);
        run_circuit(trajectory, circuit, noise, rng);
        std::map<std::string, long> counts =
            measure_shots(trajectory, {ancilla}, batch_shots, rng, noise->p_readout);
        const long n0 = counts.count("0") ? counts.at("0") : 0;
        const long n1 = counts.count("1") ? counts.at("1") : 0;
        diff += n0 - n1;
    }
    return static_cast<double>(diff) / static_cast<double>(backend.shots);
}

} // namespace

Gate amplitude_oracle(const std::vector<Cd>& b, std::vector<int> qubits) {
    const std::size_t dim = std::size_t{1} << qubits.size();
    if (qubits.empty() || b.size() != dim) {
        throw std::invalid_argument("amplitude_oracle: b must have 2^qubits entries");
    }
    Eigen::VectorXcd col(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
        col(static_cast<Eigen::Index>(i)) = b[i];
    }
    const double nrm = col.norm();
    if (nrm < 1e-15) {
        throw std::runtime_error("amplitude_oracle: zero vector");
    }
    col /= nrm;

    // Householder QR of the single column yields a full unitary whose first
    // column is col up to a unit-modulus factor r; rescaling that column by r
    // pins it to col exactly and keeps the matrix unitary.
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(col);
    Eigen::MatrixXcd q = qr.householderQ();
    const Cd r = (q.adjoint() * col)(0);
    q.col(0) *= r;

    auto flat = std::make_shared<std::vector<Cd>>(dim * dim);
    for (std::size_t row = 0; row < dim; ++row) {
        for (std::size_t c = 0; c < dim; ++c) {
            (*flat)[row * dim + c] =
                q(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(c));
        }
    }
    return Gate::oracle(std::move(flat), std::move(qubits));
}

Gate oracle_adjoint(const Gate& g) {
    if (g.kind != GateKind::ORACLE || !g.matrix) {
        throw std::invalid_argument("oracle_adjoint: not an oracle gate");
    }
    const std::size_t dim = std::size_t{1} << g.qubits.size();
    auto flat = std::make_shared<std::vector<Cd>>(dim * dim);
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            (*flat)[r * dim + c] = std::conj((*g.matrix)[c * dim + r]);
        }
    }
    Gate out = g;
    out.matrix = std::move(flat);
    return out;
}

void run_circuit(Statevector& state, const std::vector<Gate>& circuit, const NoiseModel* noise,
                 std::mt19937_64& rng) {
    const bool noisy = noise != nullptr && !noise->all_zero();
    for (const Gate& g : circuit) {
        state.apply(g);
        if (noisy) {
            for (const std::vector<int>& event : gate_noise_events(g)) {
                apply_gate_noise(state, event, *noise, rng);
            }
        }
    }
}

double hadamard_test(int n_system, const std::vector<Gate>& state_prep,
                     const std::vector<Gate>& controlled_unitary, HadamardPart part,
                     const EvalBackend& backend, std::mt19937_64& rng) {
    check_system_gates(state_prep, n_system, "hadamard_test");
    check_system_gates(controlled_unitary, n_system, "hadamard_test");
    const int ancilla = n_system;

    std::vector<Gate> circuit;
    circuit.push_back(Gate::h(ancilla));
    if (part == HadamardPart::Imag) {
        circuit.push_back(Gate::sdg(ancilla));
    }
    circuit.insert(circuit.end(), state_prep.begin(), state_prep.end());
    for (const Gate& g : controlled_unitary) {
        circuit.push_back(with_ancilla_control(g, ancilla));
    }
    circuit.push_back(Gate::h(ancilla));

    return ancilla_estimate(n_system + 1, circuit, ancilla, backend, rng);
}

double swap_test(int n_system, const std::vector<Gate>& psi_prep, const std::vector<Gate>& b_prep,
                 const EvalBackend& backend, std::mt19937_64& rng) {
    check_system_gates(psi_prep, n_system, "swap_test");
    check_system_gates(b_prep, n_system, "swap_test");
    const int ancilla = 2 * n_system;

    std::vector<Gate> circuit = psi_prep;
    for (const Gate& g : b_prep) {
        circuit.push_back(shifted(g, n_system));
    }
    circuit.push_back(Gate::h(ancilla));
    for (int q = 0; q < n_system; ++q) {
        circuit.push_back(Gate::cswap(ancilla, q, q + n_system));
    }
    circuit.push_back(Gate::h(ancilla));

    const double est = ancilla_estimate(2 * n_system + 1, circuit, ancilla, backend, rng);
    return std::clamp(est, 0.0, 1.0);
}

} // namespace vqls
