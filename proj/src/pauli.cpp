#include "vqls/pauli.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace vqls {

namespace {

const std::complex<double> kImag(0.0, 1.0);

std::complex<double> i_power(int k) {
    switch (k & 3) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

} // namespace

PauliString::PauliString(std::string label) : label_(std::move(label)) {
    if (label_.empty()) {
        throw std::invalid_argument("PauliString: empty label");
    }
    if (label_.size() > 32) {
        throw std::invalid_argument("PauliString: more than 32 qubits");
    }
    const int n = n_qubits();
    for (int q = 0; q < n; ++q) {
        const std::uint64_t bit = std::uint64_t{1} << (n - 1 - q);
        switch (label_[static_cast<std::size_t>(q)]) {
            case 'I':
                break;
            case 'X':
                flip_mask_ |= bit;
                break;
            case 'Y':
                flip_mask_ |= bit;
                phase_mask_ |= bit;
                ++y_count_;
                break;
            case 'Z':
                phase_mask_ |= bit;
                break;
            default:
                throw std::invalid_argument("PauliString: symbol outside IXYZ in '" + label_ + "'");
        }
    }
}

int PauliString::weight() const {
    int w = 0;
    for (char c : label_) {
        if (c != 'I') ++w;
    }
    return w;
}

std::complex<double> PauliString::basis_phase(std::uint64_t k) const {
    // Per qubit: Y contributes i on bit 0 and -i on bit 1, Z contributes -1 on
    // bit 1. Folding the bit-dependent signs together gives
    // i^{#Y} * (-1)^{popcount(k & (Y|Z positions))}.
    std::complex<double> phase = i_power(y_count_);
    if (std::popcount(k & phase_mask_) & 1) {
        phase = -phase;
    }
    return phase;
}

Eigen::MatrixXcd PauliString::dense() const {
    const std::uint64_t dim = std::uint64_t{1} << n_qubits();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                                static_cast<Eigen::Index>(dim));
    for (std::uint64_t c = 0; c < dim; ++c) {
        m(static_cast<Eigen::Index>(c ^ flip_mask_), static_cast<Eigen::Index>(c)) = basis_phase(c);
    }
    return m;
}

namespace {

bool is_power_of_two(Eigen::Index v) {
    return v > 0 && (v & (v - 1)) == 0;
}

int log2_dim(Eigen::Index v) {
    int n = 0;
    while ((Eigen::Index{1} << n) < v) ++n;
    return n;
}

std::string label_from_code(std::uint64_t code, int n) {
    static const char kSymbols[4] = {'I', 'X', 'Y', 'Z'};
    std::string label(static_cast<std::size_t>(n), 'I');
    for (int q = 0; q < n; ++q) {
        label[static_cast<std::size_t>(q)] = kSymbols[(code >> (2 * (n - 1 - q))) & 3];
    }
    return label;
}

} // namespace

PauliDecomposition decompose(const Eigen::MatrixXcd& a, double drop_tol) {
    if (a.rows() != a.cols() || !is_power_of_two(a.rows())) {
        throw std::invalid_argument("decompose: matrix must be square with power-of-two dimension");
    }
    const int n = log2_dim(a.rows());
    const std::uint64_t dim = std::uint64_t{1} << n;
    const std::uint64_t n_strings = std::uint64_t{1} << (2 * n);

    PauliDecomposition out;
    out.n_qubits = n;
    // Enumerating codes in increasing order visits labels lexicographically,
    // since per-qubit codes 0..3 map to I<X<Y<Z.
    for (std::uint64_t code = 0; code < n_strings; ++code) {
        PauliString p(label_from_code(code, n));
        // Tr(P A) = sum_c basis_phase(c) A(c, c ^ flip): P has one nonzero
        // entry per column, so the trace touches each column once.
        std::complex<double> tr = 0.0;
        for (std::uint64_t c = 0; c < dim; ++c) {
            tr += p.basis_phase(c) * a(static_cast<Eigen::Index>(c),
                                       static_cast<Eigen::Index>(c ^ p.flip_mask()));
        }
        const std::complex<double> coeff = tr / static_cast<double>(dim);
        if (std::abs(coeff) > drop_tol) {
            out.terms.push_back({coeff, std::move(p)});
        }
    }
    if (out.terms.empty()) {
        throw std::runtime_error("decompose: empty decomposition (zero matrix)");
    }
    return out;
}

Eigen::MatrixXcd reconstruct(const PauliDecomposition& decomp) {
    const std::uint64_t dim = std::uint64_t{1} << decomp.n_qubits;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                                static_cast<Eigen::Index>(dim));
    for (const PauliTerm& term : decomp.terms) {
        if (term.pauli.n_qubits() != decomp.n_qubits) {
            throw std::invalid_argument("reconstruct: term width differs from n_qubits");
        }
        for (std::uint64_t c = 0; c < dim; ++c) {
            m(static_cast<Eigen::Index>(c ^ term.pauli.flip_mask()),
              static_cast<Eigen::Index>(c)) += term.coeff * term.pauli.basis_phase(c);
        }
    }
    return m;
}

void apply_pauli(const PauliString& p, std::vector<std::complex<double>>& state) {
    const std::uint64_t dim = std::uint64_t{1} << p.n_qubits();
    if (state.size() != dim) {
        throw std::invalid_argument("apply_pauli: state size does not match string width");
    }
    const std::uint64_t flip = p.flip_mask();
    if (flip == 0) {
        for (std::uint64_t k = 0; k < dim; ++k) {
            state[k] *= p.basis_phase(k);
        }
        return;
    }
    for (std::uint64_t k = 0; k < dim; ++k) {
        const std::uint64_t j = k ^ flip;
        if (k < j) {
            const std::complex<double> tmp = state[k];
            state[k] = p.basis_phase(j) * state[j];
            state[j] = p.basis_phase(k) * tmp;
        }
    }
}

nlohmann::json decomposition_to_json(const PauliDecomposition& decomp) {
    nlohmann::json terms = nlohmann::json::array();
    for (const PauliTerm& term : decomp.terms) {
        terms.push_back({{"re", term.coeff.real()},
                         {"im", term.coeff.imag()},
                         {"pauli", term.pauli.label()}});
    }
    return {{"n", decomp.n_qubits}, {"terms", std::move(terms)}};
}

PauliDecomposition decomposition_from_json(const nlohmann::json& j) {
    PauliDecomposition out;
    out.n_qubits = j.at("n").get<int>();
    for (const nlohmann::json& t : j.at("terms")) {
        PauliTerm term;
        term.coeff = {t.at("re").get<double>(), t.at("im").get<double>()};
        term.pauli = PauliString(t.at("pauli").get<std::string>());
        if (term.pauli.n_qubits() != out.n_qubits) {
            throw std::invalid_argument("decomposition_from_json: term width differs from n");
        }
        out.terms.push_back(std::move(term));
    }
    return out;
}

} // namespace vqls
