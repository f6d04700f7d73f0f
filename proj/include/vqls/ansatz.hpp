#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vqls/statevector.hpp"

namespace vqls {

enum class RotationAxis { X, Y, Z };
enum class EntanglerLayout { CZ_LINEAR, CZ_ALTERNATING };

/// Layered hardware-efficient ansatz: each layer is one rotation sublayer
/// (one single-axis rotation per qubit) followed by one CZ entangler
/// sublayer. Parameter count is n_qubits * n_layers.
struct AnsatzSpec {
    int n_qubits = 1;
    int n_layers = 0;
    RotationAxis axis = RotationAxis::Y;
    EntanglerLayout entangler = EntanglerLayout::CZ_ALTERNATING;

    int param_count() const { return n_qubits * n_layers; }
};

/// Raised by append_layer when the ansatz already sits at the layer cap.
struct LayerCapReached : std::runtime_error {
    LayerCapReached() : std::runtime_error("ansatz layer cap reached") {}
};

/// Emits the gate sequence of V(theta). Angles are consumed layer by layer,
/// within a layer in qubit order. CZ_ALTERNATING pairs (0,1),(2,3),... on
/// even layer indices and (1,2),(3,4),... on odd ones; CZ_LINEAR always pairs
/// neighbours (0,1),(1,2),... Single-qubit registers get no entanglers.
std::vector<Gate> build_circuit(const AnsatzSpec& spec, const std::vector<double>& params);

/// Default static layer count and dynamic layer cap: floor(2^n / n), at least 1.
int d_min(int n_qubits);

/// Grows the ansatz by one layer whose new angles are all zero, so the
/// encoded state is unchanged except for the appended entangler sublayer.
/// A non-negative layer_cap makes the call throw LayerCapReached once
/// spec.n_layers == layer_cap; a negative cap disables the check.
std::pair<AnsatzSpec, std::vector<double>> append_layer(const AnsatzSpec& spec,
                                                        std::vector<double> params,
                                                        int layer_cap = -1);

/// Seeded uniform draw of all angles in [0, 2pi). Angles come out layer by
/// layer, so specs differing only in depth share their leading layers' draws
/// for the same seed.
std::vector<double> initial_parameters(const AnsatzSpec& spec, std::uint64_t seed);

nlohmann::json ansatz_spec_to_json(const AnsatzSpec& spec);
AnsatzSpec ansatz_spec_from_json(const nlohmann::json& j);

} // namespace vqls
