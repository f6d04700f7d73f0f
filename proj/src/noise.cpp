#include "vqls/noise.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace vqls {

namespace {

double read_prob(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) {
        return 0.0;
    }
    const double v = j.at(key).get<double>();
    if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument(std::string("load_noise_model: ") + key + " outside [0,1]");
    }
    return v;
}

} // namespace

NoiseModel load_noise_model(const nlohmann::json& config) {
    if (!config.is_object()) {
        throw std::invalid_argument("load_noise_model: config must be a JSON object");
    }
    NoiseModel m;
    m.p1 = read_prob(config, "p1");
    m.p2 = read_prob(config, "p2");
    m.p_decay = read_prob(config, "p_decay");
    m.p_readout = read_prob(config, "p_readout");
    return m;
}

NoiseModel load_noise_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("load_noise_model_file: cannot open " + path);
    }
    nlohmann::json j;
    in >> j;
    return load_noise_model(j);
}

nlohmann::json noise_model_to_json(const NoiseModel& model) {
    return {{"p1", model.p1},
            {"p2", model.p2},
            {"p_decay", model.p_decay},
            {"p_readout", model.p_readout}};
}

std::vector<std::vector<int>> gate_noise_events(const Gate& g) {
    switch (g.kind) {
        case GateKind::RX:
        case GateKind::RY:
        case GateKind::RZ:
        case GateKind::H:
        case GateKind::SDG:
        case GateKind::CZ:
        case GateKind::CNOT:
        case GateKind::CSWAP:
            return {g.qubits};
        case GateKind::PAULI: {
            // One location per non-identity symbol; a control rides along on
            // each (the string compiles to that many controlled-Pauli gates).
            std::vector<std::vector<int>> events;
            for (std::size_t s = 0; s < g.qubits.size(); ++s) {
                if (g.pauli_string.symbol(static_cast<int>(s)) == 'I') continue;
                if (g.control >= 0) {
                    events.push_back({g.control, g.qubits[s]});
                } else {
                    events.push_back({g.qubits[s]});
                }
            }
            return events;
        }
        case GateKind::ORACLE:
        case GateKind::REFLECT0: {
            std::vector<int> group = g.qubits;
            if (g.control >= 0) {
                group.push_back(g.control);
            }
            return {std::move(group)};
        }
    }
    return {};
}

GateCount charge_gate_count(const std::vector<Gate>& circuit) {
    GateCount count;
    for (const Gate& g : circuit) {
        for (const std::vector<int>& event : gate_noise_events(g)) {
            if (event.size() == 1) {
                ++count.n1;
            } else {
                ++count.n2;
            }
        }
    }
    return count;
}

namespace {

void relax_toward_zero(Statevector& state, int qubit) {
    const double p0 = state.bit_probability(qubit, 0);
    std::vector<Cd>& amps = state.amplitudes();
    const std::uint64_t mask = std::uint64_t{1} << (state.n_qubits() - 1 - qubit);
    if (p0 > 1e-15) {
        const double scale = 1.0 / std::sqrt(p0);
        for (std::uint64_t i = 0; i < state.dim(); ++i) {
            if (i & mask) {
                amps[i] = Cd(0.0, 0.0);
            } else {
                amps[i] *= scale;
            }
        }
    } else {
        // The qubit is (numerically) in |1>; relaxation lands it in |0>.
        state.apply(Gate::pauli(PauliString("X"), {qubit}));
    }
}

} // namespace

void apply_gate_noise(Statevector& state, const std::vector<int>& targets, const NoiseModel& model,
                      std::mt19937_64& rng) {
    if (targets.empty() || model.all_zero()) {
        return;
    }
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const double p_pauli = targets.size() == 1 ? model.p1 : model.p2;
    if (p_pauli > 0.0 && uniform(rng) < p_pauli) {
        const std::uint64_t n_strings = std::uint64_t{1} << (2 * targets.size());
        std::uniform_int_distribution<std::uint64_t> pick(1, n_strings - 1);
        const std::uint64_t code = pick(rng);
        static const char kSymbols[4] = {'I', 'X', 'Y', 'Z'};
        std::string label(targets.size(), 'I');
        for (std::size_t s = 0; s < targets.size(); ++s) {
            label[s] = kSymbols[(code >> (2 * (targets.size() - 1 - s))) & 3];
        }
        state.apply(Gate::pauli(PauliString(label), targets));
    }
    if (model.p_decay > 0.0) {
        for (int q : targets) {
            if (uniform(rng) < model.p_decay) {
                relax_toward_zero(state, q);
            }
        }
    }
}

} // namespace vqls
