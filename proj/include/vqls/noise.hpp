#pragma once

#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "vqls/statevector.hpp"

namespace vqls {

/// Stochastic error parameters for SHOTS-mode trajectories.
///   p1, p2    depolarizing probability after a 1-qubit / wider gate event
///   p_decay   per-target relaxation-toward-|0> probability after a gate event
///   p_readout per-bit measurement flip probability
/// A default-constructed model is noiseless.
struct NoiseModel {
    double p1 = 0.0;
    double p2 = 0.0;
    double p_decay = 0.0;
    double p_readout = 0.0;

    bool all_zero() const { return p1 == 0.0 && p2 == 0.0 && p_decay == 0.0 && p_readout == 0.0; }

    /// Profile used by the benchmark runs when noise is requested without an
    /// explicit config. Magnitudes sit at the optimistic end of near-term
    /// hardware so that cost floors stay below the usual convergence
    /// threshold of 0.1 on 4-qubit instances.
    static NoiseModel default_profile() { return {2e-4, 2e-3, 1e-4, 5e-3}; }
};

/// Reads {"p1","p2","p_decay","p_readout"}; missing keys default to 0.
/// Throws std::invalid_argument on a probability outside [0,1].
NoiseModel load_noise_model(const nlohmann::json& config);
NoiseModel load_noise_model_file(const std::string& path);
nlohmann::json noise_model_to_json(const NoiseModel& model);

/// Noise event groups for a gate, one group per error location:
/// plain gates give one group of their qubits, a Pauli-string gate gives one
/// group per non-identity symbol (paired with the control when present), an
/// oracle or reflection gives a single group of everything it touches.
std::vector<std::vector<int>> gate_noise_events(const Gate& g);

struct GateCount {
    long n1 = 0; // 1-qubit events
    long n2 = 0; // 2-qubit-or-wider events
};

/// Counts error locations by arity over a whole circuit.
GateCount charge_gate_count(const std::vector<Gate>& circuit);

/// One trajectory step after a noisy gate: with probability p1 (single
/// target) or p2 (wider), applies a uniformly random non-identity Pauli over
/// the targets; then each target independently relaxes toward |0> with
/// probability p_decay. Draws nothing from rng for probabilities that are 0,
/// so an all-zero model leaves both the state and the rng stream untouched.
void apply_gate_noise(Statevector& state, const std::vector<int>& targets, const NoiseModel& model,
                      std::mt19937_64& rng);

} // namespace vqls
