#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "vqls/pauli.hpp"

namespace vqls {

using Cd = std::complex<double>;

enum class GateKind {
    RX,
    RY,
    RZ,
    H,
    SDG,
    CZ,
    CNOT,
    CSWAP,
    PAULI,    // Pauli string over listed qubits, optionally controlled
    ORACLE,   // dense unitary over listed qubits, optionally controlled
    REFLECT0, // 2|0..0><0..0| - I over listed qubits, optionally controlled
};

/// One circuit operation. `qubits` is the ordered target list; for PAULI the
/// i-th label symbol acts on qubits[i], for ORACLE qubits[0] is the most
/// significant bit of the sub-register index. `control` (when >= 0) applies
/// the gate only on basis states where that qubit is 1; only PAULI, ORACLE
/// and REFLECT0 accept a control.
struct Gate {
    GateKind kind;
    std::vector<int> qubits;
    double angle = 0.0;
    PauliString pauli_string;
    std::shared_ptr<const std::vector<Cd>> matrix; // row-major, dim 2^qubits.size()
    int control = -1;

    static Gate rx(int q, double angle) { return {GateKind::RX, {q}, angle, {}, nullptr, -1}; }
    static Gate ry(int q, double angle) { return {GateKind::RY, {q}, angle, {}, nullptr, -1}; }
    static Gate rz(int q, double angle) { return {GateKind::RZ, {q}, angle, {}, nullptr, -1}; }
    static Gate h(int q) { return {GateKind::H, {q}, 0.0, {}, nullptr, -1}; }
    static Gate sdg(int q) { return {GateKind::SDG, {q}, 0.0, {}, nullptr, -1}; }
    static Gate cz(int a, int b) { return {GateKind::CZ, {a, b}, 0.0, {}, nullptr, -1}; }
    static Gate cnot(int control, int target) {
        return {GateKind::CNOT, {control, target}, 0.0, {}, nullptr, -1};
    }
    static Gate cswap(int control, int a, int b) {
        return {GateKind::CSWAP, {control, a, b}, 0.0, {}, nullptr, -1};
    }
    static Gate pauli(PauliString p, std::vector<int> qubits, int control = -1) {
        return {GateKind::PAULI, std::move(qubits), 0.0, std::move(p), nullptr, control};
    }
    static Gate oracle(std::shared_ptr<const std::vector<Cd>> m, std::vector<int> qubits,
                       int control = -1) {
        return {GateKind::ORACLE, std::move(qubits), 0.0, {}, std::move(m), control};
    }
    static Gate reflect0(std::vector<int> qubits, int control = -1) {
        return {GateKind::REFLECT0, std::move(qubits), 0.0, {}, nullptr, control};
    }
};

/// Dense 2^n-amplitude register. Qubit 0 is the most significant bit of a
/// basis index. Gates are applied by stride iteration over the amplitude
/// array; no 2^n x 2^n matrices are formed (ORACLE carries its own dense
/// block over its targets only).
class Statevector {
public:
    explicit Statevector(int n_qubits);

    int n_qubits() const { return n_; }
    std::uint64_t dim() const { return std::uint64_t{1} << n_; }
    const std::vector<Cd>& amplitudes() const { return amps_; }
    std::vector<Cd>& amplitudes() { return amps_; }

    double norm() const;
    void normalize(); // throws std::runtime_error on a zero vector
    Cd overlap(const Statevector& other) const; // <this|other>

    /// Marginal probability that `qubit` reads `value`.
    double bit_probability(int qubit, int value) const;

    /// Marginal distribution over the listed qubits; entry k corresponds to
    /// the outcome string whose first character is qubits[0]'s bit.
    std::vector<double> marginal(const std::vector<int>& qubits) const;

    void apply(const Gate& g);
    void apply(const std::vector<Gate>& circuit);

private:
    void apply_single(const Cd m[4], int qubit);
    std::uint64_t bit(int qubit) const;
    void check_targets(const Gate& g) const;

    int n_;
    std::vector<Cd> amps_;
};

/// State with amplitudes proportional to `amps` (normalized copy). Throws
/// std::invalid_argument unless the size is a power of two >= 2, and
/// std::runtime_error on a zero vector.
Statevector prepare_amplitude_state(const std::vector<Cd>& amps);

/// Samples `shots` outcomes of the listed qubits from the state's marginal
/// distribution. Each sampled bit is independently flipped with probability
/// `readout_error`. Keys are bit strings ordered like `qubits`; only observed
/// outcomes appear. Throws std::invalid_argument on an empty qubit list,
/// duplicate qubits, or shots < 1.
std::map<std::string, long> measure_shots(const Statevector& state, const std::vector<int>& qubits,
                                          long shots, std::mt19937_64& rng,
                                          double readout_error = 0.0);
std::map<std::string, long> measure_shots(const Statevector& state, const std::vector<int>& qubits,
                                          long shots, std::uint64_t rng_seed,
                                          double readout_error = 0.0);

} // namespace vqls
