#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>
#include <json.hpp>

#include "vqls/pauli.hpp"

namespace vqls {

struct ProblemMeta {
    double condition_number = 1.0;
    double sparsity = 0.0;
    std::uint64_t seed = 0;
};

/// A linear-system instance A x = b at qubit scale: A is 2^n x 2^n and kept
/// both dense and as a Pauli decomposition, b has unit norm.
struct SLEProblem {
    int n_qubits = 1;
    Eigen::MatrixXcd A;
    PauliDecomposition decomposition;
    Eigen::VectorXcd b;
    ProblemMeta meta;
};

/// Seeded instance generator with controlled conditioning.
///
/// target_sparsity == 0 selects the dense family: A = Q D Q^T with Q a random
/// orthogonal matrix and D log-spaced in [1, target_kappa], so the eigenvalue
/// ratio equals target_kappa exactly. A positive target selects the sparse
/// family: a random symmetric pattern holding exactly the requested zero
/// count (when parity permits; otherwise the nearest feasible count), with a
/// spectral shift tuning the eigenvalue ratio onto the target. Throws
/// std::runtime_error when the (kappa, sparsity) request stays unreachable
/// after bounded retries.
SLEProblem generate_sle(int n_qubits, double target_kappa, double target_sparsity,
                        std::uint64_t seed);

/// Variant with a short Pauli expansion: A = sum_j w_j P_j + lambda I over
/// n_terms random {I,X,Z} strings, shifted so the eigenvalue ratio hits
/// target_kappa exactly. Keeps circuit-mode cost evaluation affordable, since
/// its price grows quadratically with the number of decomposition terms.
SLEProblem generate_pauli_sle(int n_qubits, double target_kappa, std::uint64_t seed,
                              int n_terms = 4);

/// Ratio of extreme eigenvalue magnitudes for normal matrices, of extreme
/// singular values otherwise. Throws on singular input.
double condition_number(const Eigen::MatrixXcd& A);

/// Fraction of exactly-zero entries.
double sparsity(const Eigen::MatrixXcd& A);

/// Gaussian elimination with partial pivoting; relative residual below 1e-10
/// or it throws.
Eigen::VectorXcd classical_solve(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& b);

/// Squared overlap of the normalized vectors; scale invariant by
/// construction. Throws on a zero vector.
double fidelity(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v);

nlohmann::json problem_to_json(const SLEProblem& problem);
SLEProblem problem_from_json(const nlohmann::json& j);

} // namespace vqls
