#include "vqls/ansatz.hpp"

#include <cmath>
#include <random>
#include <string>

namespace vqls {

namespace {

void check_spec(const AnsatzSpec& spec) {
    if (spec.n_qubits < 1) {
        throw std::invalid_argument("ansatz needs at least one qubit");
    }
    if (spec.n_layers < 0) {
        throw std::invalid_argument("negative layer count");
    }
}

Gate rotation(RotationAxis axis, int qubit, double angle) {
    switch (axis) {
    case RotationAxis::X:
        return Gate::rx(qubit, angle);
    case RotationAxis::Y:
        return Gate::ry(qubit, angle);
    case RotationAxis::Z:
        return Gate::rz(qubit, angle);
    }
    throw std::logic_error("unreachable");
}

} // namespace

std::vector<Gate> build_circuit(const AnsatzSpec& spec, const std::vector<double>& params) {
    check_spec(spec);
    if (static_cast<int>(params.size()) != spec.param_count()) {
        throw std::invalid_argument("parameter count does not match ansatz");
    }
    const int n = spec.n_qubits;
    std::vector<Gate> circuit;
    circuit.reserve(static_cast<std::size_t>(spec.n_layers) * (2 * n));
    for (int layer = 0; layer < spec.n_layers; ++layer) {
        for (int q = 0; q < n; ++q) {
            circuit.push_back(rotation(spec.axis, q, params[static_cast<std::size_t>(layer) * n + q]));
        }
        if (n < 2) {
            continue;
        }
        const int first = (spec.entangler == EntanglerLayout::CZ_ALTERNATING)
                              ? (layer % 2)
                              : 0;
        const int stride = (spec.entangler == EntanglerLayout::CZ_ALTERNATING) ? 2 : 1;
        for (int q = first; q + 1 < n; q += stride) {
            circuit.push_back(Gate::cz(q, q + 1));
        }
    }
    return circuit;
}

int d_min(int n_qubits) {
    if (n_qubits < 1 || n_qubits > 30) {
        throw std::invalid_argument("qubit count out of range");
    }
    const long long floored = (1LL << n_qubits) / n_qubits;
    return static_cast<int>(floored < 1 ? 1 : floored);
}

std::pair<AnsatzSpec, std::vector<double>> append_layer(const AnsatzSpec& spec,
                                                        std::vector<double> params,
                                                        int layer_cap) {
    check_spec(spec);
    if (static_cast<int>(params.size()) != spec.param_count()) {
        throw std::invalid_argument("parameter count does not match ansatz");
    }
    if (layer_cap >= 0 && spec.n_layers >= layer_cap) {
        throw LayerCapReached();
    }
    AnsatzSpec grown = spec;
    grown.n_layers += 1;
    params.resize(params.size() + static_cast<std::size_t>(spec.n_qubits), 0.0);
    return {grown, std::move(params)};
}

std::vector<double> initial_parameters(const AnsatzSpec& spec, std::uint64_t seed) {
    check_spec(spec);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    std::vector<double> params(static_cast<std::size_t>(spec.param_count()));
    for (double& p : params) {
        p = angle(rng);
    }
    return params;
}

namespace {

std::string axis_name(RotationAxis axis) {
    switch (axis) {
    case RotationAxis::X:
        return "X";
    case RotationAxis::Y:
        return "Y";
    case RotationAxis::Z:
        return "Z";
    }
    throw std::logic_error("unreachable");
}

RotationAxis axis_from(const std::string& name) {
    if (name == "X") return RotationAxis::X;
    if (name == "Y") return RotationAxis::Y;
    if (name == "Z") return RotationAxis::Z;
    throw std::invalid_argument("unknown rotation axis: " + name);
}

} // namespace

nlohmann::json ansatz_spec_to_json(const AnsatzSpec& spec) {
    return {{"n", spec.n_qubits},
            {"d", spec.n_layers},
            {"axis", axis_name(spec.axis)},
            {"entangler", spec.entangler == EntanglerLayout::CZ_LINEAR ? "CZ_LINEAR"
                                                                       : "CZ_ALTERNATING"}};
}

AnsatzSpec ansatz_spec_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw std::invalid_argument("ansatz spec must be a JSON object");
    }
    AnsatzSpec spec;
    spec.n_qubits = j.at("n").get<int>();
    spec.n_layers = j.at("d").get<int>();
    spec.axis = axis_from(j.value("axis", "Y"));
    const std::string ent = j.value("entangler", "CZ_ALTERNATING");
    if (ent == "CZ_LINEAR") {
        spec.entangler = EntanglerLayout::CZ_LINEAR;
    } else if (ent == "CZ_ALTERNATING") {
        spec.entangler = EntanglerLayout::CZ_ALTERNATING;
    } else {
        throw std::invalid_argument("unknown entangler layout: " + ent);
    }
    check_spec(spec);
    return spec;
}

} // namespace vqls
