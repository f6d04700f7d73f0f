#include "vqls/statevector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vqls {

namespace {

constexpr double kZeroNorm = 1e-15;

bool is_power_of_two(std::size_t v) {
    return v > 0 && (v & (v - 1)) == 0;
}

} // namespace

Statevector::Statevector(int n_qubits) : n_(n_qubits) {
    if (n_ < 1 || n_ > 24) {
        throw std::invalid_argument("Statevector: qubit count out of range");
    }
    amps_.assign(std::size_t{1} << n_, Cd(0.0, 0.0));
    amps_[0] = Cd(1.0, 0.0);
}

std::uint64_t Statevector::bit(int qubit) const {
    return std::uint64_t{1} << (n_ - 1 - qubit);
}

double Statevector::norm() const {
    double s = 0.0;
    for (const Cd& a : amps_) {
        s += std::norm(a);
    }
    return std::sqrt(s);
}

void Statevector::normalize() {
    const double nrm = norm();
    if (nrm < kZeroNorm) {
        throw std::runtime_error("Statevector: cannot normalize a zero vector");
    }
    for (Cd& a : amps_) {
        a /= nrm;
    }
}

Cd Statevector::overlap(const Statevector& other) const {
    if (other.n_ != n_) {
        throw std::invalid_argument("overlap: register sizes differ");
    }
    Cd s(0.0, 0.0);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        s += std::conj(amps_[i]) * other.amps_[i];
    }
    return s;
}

double Statevector::bit_probability(int qubit, int value) const {
    if (qubit < 0 || qubit >= n_) {
        throw std::invalid_argument("bit_probability: qubit out of range");
    }
    const std::uint64_t mask = bit(qubit);
    double p = 0.0;
    for (std::uint64_t i = 0; i < dim(); ++i) {
        if (((i & mask) != 0) == (value != 0)) {
            p += std::norm(amps_[i]);
        }
    }
    return p;
}

std::vector<double> Statevector::marginal(const std::vector<int>& qubits) const {
    if (qubits.empty()) {
        throw std::invalid_argument("marginal: empty qubit list");
    }
    std::vector<std::uint64_t> masks;
    for (int q : qubits) {
        if (q < 0 || q >= n_) {
            throw std::invalid_argument("marginal: qubit out of range");
        }
        masks.push_back(bit(q));
    }
    const std::size_t k = qubits.size();
    std::vector<double> probs(std::size_t{1} << k, 0.0);
    for (std::uint64_t i = 0; i < dim(); ++i) {
        std::uint64_t outcome = 0;
        for (std::size_t b = 0; b < k; ++b) {
            if (i & masks[b]) {
                outcome |= std::uint64_t{1} << (k - 1 - b);
            }
        }
        probs[outcome] += std::norm(amps_[i]);
    }
    return probs;
}

void Statevector::check_targets(const Gate& g) const {
    std::vector<int> all = g.qubits;
    if (g.control >= 0) {
        all.push_back(g.control);
    }
    for (int q : all) {
        if (q < 0 || q >= n_) {
            throw std::invalid_argument("apply: qubit index out of range");
        }
    }
    std::vector<int> sorted = all;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw std::invalid_argument("apply: duplicate qubit in gate");
    }
    const std::size_t arity = g.qubits.size();
    switch (g.kind) {
        case GateKind::RX:
        case GateKind::RY:
        case GateKind::RZ:
        case GateKind::H:
        case GateKind::SDG:
            if (arity != 1 || g.control >= 0) {
                throw std::invalid_argument("apply: single-qubit gate needs exactly one target");
            }
            break;
        case GateKind::CZ:
        case GateKind::CNOT:
            if (arity != 2 || g.control >= 0) {
                throw std::invalid_argument("apply: two-qubit gate needs exactly two targets");
            }
            break;
        case GateKind::CSWAP:
            if (arity != 3 || g.control >= 0) {
                throw std::invalid_argument("apply: CSWAP needs control plus two targets");
            }
            break;
        case GateKind::PAULI:
            if (arity == 0 || g.pauli_string.n_qubits() != static_cast<int>(arity)) {
                throw std::invalid_argument("apply: Pauli label width differs from target count");
            }
            break;
        case GateKind::ORACLE:
            if (arity == 0 || !g.matrix ||
                g.matrix->size() != (std::size_t{1} << (2 * arity))) {
                throw std::invalid_argument("apply: oracle matrix size differs from target count");
            }
            break;
        case GateKind::REFLECT0:
            if (arity == 0) {
                throw std::invalid_argument("apply: REFLECT0 needs at least one target");
            }
            break;
    }
}

void Statevector::apply_single(const Cd m[4], int qubit) {
    const std::uint64_t mask = bit(qubit);
    for (std::uint64_t i = 0; i < dim(); ++i) {
        if (i & mask) continue;
        const std::uint64_t j = i | mask;
        const Cd a = amps_[i];
        const Cd b = amps_[j];
        amps_[i] = m[0] * a + m[1] * b;
        amps_[j] = m[2] * a + m[3] * b;
    }
}

void Statevector::apply(const Gate& g) {
    check_targets(g);
    switch (g.kind) {
        case GateKind::RX: {
            const double c = std::cos(g.angle / 2.0), s = std::sin(g.angle / 2.0);
            const Cd m[4] = {Cd(c, 0), Cd(0, -s), Cd(0, -s), Cd(c, 0)};
            apply_single(m, g.qubits[0]);
            return;
        }
        case GateKind::RY: {
            const double c = std::cos(g.angle / 2.0), s = std::sin(g.angle / 2.0);
            const Cd m[4] = {Cd(c, 0), Cd(-s, 0), Cd(s, 0), Cd(c, 0)};
            apply_single(m, g.qubits[0]);
            return;
        }
        case GateKind::RZ: {
            const Cd e0 = std::polar(1.0, -g.angle / 2.0), e1 = std::polar(1.0, g.angle / 2.0);
            const Cd m[4] = {e0, Cd(0, 0), Cd(0, 0), e1};
            apply_single(m, g.qubits[0]);
            return;
        }
        case GateKind::H: {
            const double r = 1.0 / std::sqrt(2.0);
            const Cd m[4] = {Cd(r, 0), Cd(r, 0), Cd(r, 0), Cd(-r, 0)};
            apply_single(m, g.qubits[0]);
            return;
        }
        case GateKind::SDG: {
            const Cd m[4] = {Cd(1, 0), Cd(0, 0), Cd(0, 0), Cd(0, -1)};
            apply_single(m, g.qubits[0]);
            return;
        }
        case GateKind::CZ: {
            const std::uint64_t both = bit(g.qubits[0]) | bit(g.qubits[1]);
            for (std::uint64_t i = 0; i < dim(); ++i) {
                if ((i & both) == both) amps_[i] = -amps_[i];
            }
            return;
        }
        case GateKind::CNOT: {
            const std::uint64_t c = bit(g.qubits[0]), t = bit(g.qubits[1]);
            for (std::uint64_t i = 0; i < dim(); ++i) {
                if ((i & c) && !(i & t)) std::swap(amps_[i], amps_[i | t]);
            }
            return;
        }
        case GateKind::CSWAP: {
            const std::uint64_t c = bit(g.qubits[0]), a = bit(g.qubits[1]), b = bit(g.qubits[2]);
            for (std::uint64_t i = 0; i < dim(); ++i) {
                if ((i & c) && (i & a) && !(i & b)) std::swap(amps_[i], amps_[(i ^ a) | b]);
            }
            return;
        }
        case GateKind::PAULI: {
            // Remap the label onto the full register, then act like apply_pauli
            // restricted to the control branch.
            std::uint64_t flip = 0, phase_mask = 0;
            int y_count = 0;
            for (std::size_t s = 0; s < g.qubits.size(); ++s) {
                const std::uint64_t m = bit(g.qubits[s]);
                switch (g.pauli_string.symbol(static_cast<int>(s))) {
                    case 'X': flip |= m; break;
                    case 'Y': flip |= m; phase_mask |= m; ++y_count; break;
                    case 'Z': phase_mask |= m; break;
                    default: break;
                }
            }
            const Cd iy = (y_count & 3) == 0   ? Cd(1, 0)
                          : (y_count & 3) == 1 ? Cd(0, 1)
                          : (y_count & 3) == 2 ? Cd(-1, 0)
                                               : Cd(0, -1);
            const std::uint64_t cmask = g.control >= 0 ? bit(g.control) : 0;
            auto phase = [&](std::uint64_t k) {
                return (std::popcount(k & phase_mask) & 1) ? -iy : iy;
            };
            for (std::uint64_t i = 0; i < dim(); ++i) {
                if ((i & cmask) != cmask) continue;
                const std::uint64_t j = i ^ flip;
                if (j == i) {
                    amps_[i] *= phase(i);
                } else if (i < j) {
                    const Cd tmp = amps_[i];
                    amps_[i] = phase(j) * amps_[j];
                    amps_[j] = phase(i) * tmp;
                }
            }
            return;
        }
        case GateKind::ORACLE: {
            const std::size_t k = g.qubits.size();
            const std::uint64_t sub_dim = std::uint64_t{1} << k;
            std::uint64_t tmask = 0;
            std::vector<std::uint64_t> offset(sub_dim, 0);
            for (std::size_t s = 0; s < k; ++s) {
                tmask |= bit(g.qubits[s]);
            }
            for (std::uint64_t j = 0; j < sub_dim; ++j) {
                for (std::size_t s = 0; s < k; ++s) {
                    if (j & (std::uint64_t{1} << (k - 1 - s))) {
                        offset[j] |= bit(g.qubits[s]);
                    }
                }
            }
            const std::uint64_t cmask = g.control >= 0 ? bit(g.control) : 0;
            const std::vector<Cd>& m = *g.matrix;
            std::vector<Cd> sub(sub_dim);
            for (std::uint64_t base = 0; base < dim(); ++base) {
                if (base & tmask) continue;
                if ((base & cmask) != cmask) continue;
                for (std::uint64_t j = 0; j < sub_dim; ++j) {
                    sub[j] = amps_[base | offset[j]];
                }
                for (std::uint64_t r = 0; r < sub_dim; ++r) {
                    Cd acc(0, 0);
                    const Cd* row = m.data() + r * sub_dim;
                    for (std::uint64_t j = 0; j < sub_dim; ++j) {
                        acc += row[j] * sub[j];
                    }
                    amps_[base | offset[r]] = acc;
                }
            }
            return;
        }
        case GateKind::REFLECT0: {
            std::uint64_t tmask = 0;
            for (int q : g.qubits) {
                tmask |= bit(q);
            }
            const std::uint64_t cmask = g.control >= 0 ? bit(g.control) : 0;
            for (std::uint64_t i = 0; i < dim(); ++i) {
                if ((i & cmask) != cmask) continue;
                if (i & tmask) amps_[i] = -amps_[i];
            }
            return;
        }
    }
    throw std::logic_error("apply: unhandled gate kind");
}

void Statevector::apply(const std::vector<Gate>& circuit) {
    for (const Gate& g : circuit) {
        apply(g);
    }
}

Statevector prepare_amplitude_state(const std::vector<Cd>& amps) {
    if (amps.size() < 2 || !is_power_of_two(amps.size())) {
        throw std::invalid_argument("prepare_amplitude_state: size must be a power of two >= 2");
    }
    int n = 0;
    while ((std::size_t{1} << n) < amps.size()) ++n;
    Statevector state(n);
    state.amplitudes() = amps;
    state.normalize();
    return state;
}

std::map<std::string, long> measure_shots(const Statevector& state, const std::vector<int>& qubits,
                                          long shots, std::mt19937_64& rng, double readout_error) {
    if (shots < 1) {
        throw std::invalid_argument("measure_shots: shots must be positive");
    }
    if (readout_error < 0.0 || readout_error > 1.0) {
        throw std::invalid_argument("measure_shots: readout error outside [0,1]");
    }
    std::vector<int> sorted = qubits;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw std::invalid_argument("measure_shots: duplicate qubit");
    }
    std::vector<double> probs = state.marginal(qubits); // validates the list
    const std::size_t k = qubits.size();

    // Per-bit independent readout flips commute with sampling: flipping each
    // sampled bit with probability r is the same as sampling from the
    // confusion-transformed distribution.
    if (readout_error > 0.0) {
        for (std::size_t b = 0; b < k; ++b) {
            const std::size_t mask = std::size_t{1} << (k - 1 - b);
            for (std::size_t o = 0; o < probs.size(); ++o) {
                if (o & mask) continue;
                const double p0 = probs[o], p1 = probs[o | mask];
                probs[o] = (1.0 - readout_error) * p0 + readout_error * p1;
                probs[o | mask] = readout_error * p0 + (1.0 - readout_error) * p1;
            }
        }
    }

    std::map<std::string, long> counts;
    long remaining = shots;
    double tail = 1.0;
    for (std::size_t o = 0; o < probs.size() && remaining > 0; ++o) {
        long c;
        if (o + 1 == probs.size()) {
            c = remaining;
        } else {
            double p = tail > 1e-300 ? probs[o] / tail : 1.0;
            p = std::clamp(p, 0.0, 1.0);
            c = std::binomial_distribution<long>(remaining, p)(rng);
        }
        if (c > 0) {
            std::string key(k, '0');
            for (std::size_t b = 0; b < k; ++b) {
                if (o & (std::size_t{1} << (k - 1 - b))) key[b] = '1';
            }
            counts[key] = c;
        }
        remaining -= c;
        tail -= probs[o];
    }
    return counts;
}

std::map<std::string, long> measure_shots(const Statevector& state, const std::vector<int>& qubits,
                                          long shots, std::uint64_t rng_seed,
                                          double readout_error) {
    std::mt19937_64 rng(rng_seed);
    return measure_shots(state, qubits, shots, rng, readout_error);
}

} // namespace vqls
