#pragma once

#include <optional>
#include <random>
#include <vector>

#include "vqls/noise.hpp"
#include "vqls/statevector.hpp"

namespace vqls {

enum class EvalMode { Exact, Shots };
enum class HadamardPart { Real, Imag };

/// How expectation values are obtained. EXACT reads probabilities straight
/// off the statevector and ignores shots and noise; SHOTS runs one noisy
/// trajectory per circuit and samples the ancilla.
struct EvalBackend {
    EvalMode mode = EvalMode::Exact;
    long shots = 10000;
    std::optional<NoiseModel> noise;
    std::uint64_t rng_seed = 0;
};

/// Dense unitary gate whose first column is b/‖b‖ (completed to a unitary by
/// QR), so applying it to |0..0> prepares amplitudes proportional to b.
/// Throws std::invalid_argument unless b has 2^qubits.size() entries, and
/// std::runtime_error for a zero b.
Gate amplitude_oracle(const std::vector<Cd>& b, std::vector<int> qubits);

/// Conjugate transpose of an ORACLE gate (same targets and control).
Gate oracle_adjoint(const Gate& g);

/// Applies the circuit, inserting one trajectory-noise step after every gate
/// event when `noise` is a non-trivial model (nullptr or all-zero: pure run,
/// rng untouched).
void run_circuit(Statevector& state, const std::vector<Gate>& circuit, const NoiseModel* noise,
                 std::mt19937_64& rng);

/// Estimates Re or Im of <phi|W|phi> with |phi> = state_prep|0>, W given as a
/// gate sequence to be controlled on the ancilla (qubit n_system). Circuit:
/// H on ancilla, S-dagger for the imaginary part, state prep, controlled W,
/// H, ancilla readout; estimate = P(0) - P(1). The controlled gates must
/// arrive uncontrolled and of a kind that accepts a control.
double hadamard_test(int n_system, const std::vector<Gate>& state_prep,
                     const std::vector<Gate>& controlled_unitary, HadamardPart part,
                     const EvalBackend& backend, std::mt19937_64& rng);

/// Overlap |<b|psi>|^2 of the two prepared states via the Fredkin-gate swap
/// test on 2n+1 qubits: P(ancilla=0) = (1 + overlap)/2, returned as
/// 2 P(0) - 1 clamped to [0, 1]. Only the ancilla is read out.
double swap_test(int n_system, const std::vector<Gate>& psi_prep, const std::vector<Gate>& b_prep,
                 const EvalBackend& backend, std::mt19937_64& rng);

} // namespace vqls
