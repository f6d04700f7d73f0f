#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace vqls {

/// Tensor product of single-qubit Pauli operators, written as a label over
/// the alphabet {I,X,Y,Z}. The leftmost symbol acts on qubit 0, and qubit 0
/// is the most significant bit of a computational-basis index. This ordering
/// is used everywhere in the library.
///
/// Acting on a basis state, a Pauli string permutes at most one pair of
/// amplitudes: P|k> = basis_phase(k) |k ^ flip_mask()>.
class PauliString {
public:
    PauliString() = default;

    /// Throws std::invalid_argument on an empty label or a symbol outside IXYZ.
    explicit PauliString(std::string label);

    int n_qubits() const { return static_cast<int>(label_.size()); }
    const std::string& label() const { return label_; }
    char symbol(int qubit) const { return label_.at(static_cast<std::size_t>(qubit)); }

    /// Number of non-identity symbols.
    int weight() const;
    bool is_identity() const { return weight() == 0; }

    /// Number of Y symbols; the string is a real matrix iff this is even.
    int y_count() const { return y_count_; }

    /// Bit mask of the X/Y positions (qubit 0 = most significant of n bits).
    std::uint64_t flip_mask() const { return flip_mask_; }

    /// Phase picked up by basis state |k>: P|k> = basis_phase(k) |k ^ flip_mask()>.
    std::complex<double> basis_phase(std::uint64_t k) const;

    /// Dense 2^n x 2^n matrix.
    Eigen::MatrixXcd dense() const;

    bool operator==(const PauliString& other) const { return label_ == other.label_; }

private:
    std::string label_;
    std::uint64_t flip_mask_ = 0;  // X and Y positions
    std::uint64_t phase_mask_ = 0; // Y and Z positions, sign = (-1)^popcount(k & phase_mask_)
    int y_count_ = 0;              // leading factor i^y_count_
};

struct PauliTerm {
    std::complex<double> coeff;
    PauliString pauli;
};

/// Weighted sum of Pauli strings representing a 2^n x 2^n operator.
/// Terms are unique by label and sorted lexicographically (the order
/// decompose() produces).
struct PauliDecomposition {
    int n_qubits = 0;
    std::vector<PauliTerm> terms;
};

/// Expands A over the Pauli basis: A = sum_l c_l P_l with c_l = Tr(P_l A)/2^n.
/// Terms with |c_l| <= drop_tol are omitted. Throws std::invalid_argument if A
/// is not square with power-of-two dimension, and std::runtime_error if no
/// term survives (the zero matrix has no decomposition).
PauliDecomposition decompose(const Eigen::MatrixXcd& a, double drop_tol = 1e-12);

/// Dense matrix of a decomposition. The empty decomposition reconstructs to
/// the zero matrix.
Eigen::MatrixXcd reconstruct(const PauliDecomposition& decomp);

/// In-place action of a Pauli string on a 2^n amplitude vector.
/// Throws std::invalid_argument on a size mismatch.
void apply_pauli(const PauliString& p, std::vector<std::complex<double>>& state);

/// JSON form: {"n": int, "terms": [{"re": float, "im": float, "pauli": str}]}.
nlohmann::json decomposition_to_json(const PauliDecomposition& decomp);
PauliDecomposition decomposition_from_json(const nlohmann::json& j);

} // namespace vqls
