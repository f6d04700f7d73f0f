#include "vqls/problems.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <utility>

namespace vqls {

namespace {

using Cd = std::complex<double>;

constexpr int kMaxAttempts = 100;

int checked_dim(int n_qubits) {
    if (n_qubits < 1 || n_qubits > 8) {
        throw std::invalid_argument("problem generation supports 1 to 8 qubits");
    }
    return 1 << n_qubits;
}

Eigen::MatrixXd random_orthogonal(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd g(dim, dim);
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            g(r, c) = gauss(rng);
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    // Fix the column signs so the factorization is canonical.
    for (int c = 0; c < dim; ++c) {
        if (qr.matrixQR()(c, c) < 0) {
            q.col(c) = -q.col(c);
        }
    }
    return q;
}

Eigen::VectorXcd random_unit_vector(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXcd v(dim);
    double norm2 = 0.0;
    do {
        for (int i = 0; i < dim; ++i) {
            v(i) = Cd(gauss(rng), 0.0);
        }
        norm2 = v.squaredNorm();
    } while (norm2 < 1e-12);
    return v / std::sqrt(norm2);
}

// Eigenvalue window of a real symmetric matrix.
std::pair<double, double> symmetric_extremes(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    const Eigen::VectorXd& ev = solver.eigenvalues();
    return {ev(0), ev(ev.size() - 1)};
}

// Shift making the eigenvalue ratio of (m + shift I) equal target exactly;
// the shifted spectrum is strictly positive.
double ratio_shift(double lo, double hi, double target) {
    return (hi - target * lo) / (target - 1.0);
}

void finalize(SLEProblem& p, std::uint64_t seed) {
    p.meta.seed = seed;
    p.meta.condition_number = condition_number(p.A);
    p.meta.sparsity = sparsity(p.A);
    p.decomposition = decompose(p.A);
}

SLEProblem dense_instance(int n_qubits, double target_kappa, std::uint64_t seed) {
    const int dim = checked_dim(n_qubits);
    std::mt19937_64 rng(seed);
    SLEProblem p;
    p.n_qubits = n_qubits;
    if (target_kappa == 1.0) {
        p.A = Eigen::MatrixXcd::Identity(dim, dim);
    } else {
        Eigen::MatrixXd q = random_orthogonal(dim, rng);
        Eigen::VectorXd d(dim);
        for (int i = 0; i < dim; ++i) {
            d(i) = std::pow(target_kappa, static_cast<double>(i) / (dim - 1));
        }
        p.A = (q * d.asDiagonal() * q.transpose()).cast<Cd>();
    }
    p.b = random_unit_vector(dim, rng);
    finalize(p, seed);
    return p;
}

SLEProblem sparse_instance(int n_qubits, double target_kappa, double target_sparsity,
                           std::uint64_t seed) {
    const int dim = checked_dim(n_qubits);
    const long total = static_cast<long>(dim) * dim;
    long zeros = std::lround(target_sparsity * static_cast<double>(total));
    long nonzeros = total - zeros;
    if (nonzeros < dim) {
        throw std::runtime_error("sparsity target leaves no room for a nonsingular diagonal");
    }
    if ((nonzeros - dim) % 2 != 0) {
        ++nonzeros; // nearest symmetric-feasible zero count
    }
    const long pair_count = (nonzeros - dim) / 2;

    if (target_kappa == 1.0) {
        // Ratio 1 forces a multiple of the identity, which pins the sparsity.
        if (pair_count != 0) {
            throw std::runtime_error("unit eigenvalue ratio is incompatible with off-diagonal fill");
        }
        std::mt19937_64 rng(seed);
        SLEProblem p;
        p.n_qubits = n_qubits;
        p.A = Eigen::MatrixXcd::Identity(dim, dim);
        p.b = random_unit_vector(dim, rng);
        finalize(p, seed);
        return p;
    }

    std::mt19937_64 rng(seed);
    std::vector<std::pair<int, int>> all_pairs;
    all_pairs.reserve(static_cast<std::size_t>(dim) * (dim - 1) / 2);
    for (int r = 0; r < dim; ++r) {
        for (int c = r + 1; c < dim; ++c) {
            all_pairs.emplace_back(r, c);
        }
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        std::shuffle(all_pairs.begin(), all_pairs.end(), rng);
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
        for (int i = 0; i < dim; ++i) {
            a(i, i) = 1.0 + unit(rng);
        }
        for (long k = 0; k < pair_count; ++k) {
            auto [r, c] = all_pairs[static_cast<std::size_t>(k)];
            const double magnitude = 0.1 + 0.4 * unit(rng);
            const double value = unit(rng) < 0.5 ? -magnitude : magnitude;
            a(r, c) = value;
            a(c, r) = value;
        }
        auto [lo, hi] = symmetric_extremes(a);
        if (hi - lo < 1e-9) {
            continue; // flat spectrum cannot be stretched onto the target
        }
        a.diagonal().array() += ratio_shift(lo, hi, target_kappa);
        SLEProblem p;
        p.n_qubits = n_qubits;
        p.A = a.cast<Cd>();
        p.b = random_unit_vector(dim, rng);
        finalize(p, seed);
        return p;
    }
    throw std::runtime_error("sparse instance generation exhausted its retries");
}

} // namespace

SLEProblem generate_sle(int n_qubits, double target_kappa, double target_sparsity,
                        std::uint64_t seed) {
    checked_dim(n_qubits);
    if (target_kappa < 1.0) {
        throw std::invalid_argument("eigenvalue-ratio target must be at least 1");
    }
    if (target_sparsity < 0.0 || target_sparsity >= 1.0) {
        throw std::invalid_argument("sparsity target must lie in [0, 1)");
    }
    if (target_sparsity == 0.0) {
        return dense_instance(n_qubits, target_kappa, seed);
    }
    return sparse_instance(n_qubits, target_kappa, target_sparsity, seed);
}

SLEProblem generate_pauli_sle(int n_qubits, double target_kappa, std::uint64_t seed,
                              int n_terms) {
    const int dim = checked_dim(n_qubits);
    if (target_kappa < 1.0) {
        throw std::invalid_argument("eigenvalue-ratio target must be at least 1");
    }
    double max_labels = std::pow(3.0, n_qubits) - 1.0;
    if (n_terms < 1 || static_cast<double>(n_terms) > max_labels) {
        throw std::invalid_argument("term count out of range for the qubit count");
    }

    std::mt19937_64 rng(seed);
    if (target_kappa == 1.0) {
        SLEProblem p;
        p.n_qubits = n_qubits;
        p.A = Eigen::MatrixXcd::Identity(dim, dim);
        p.b = random_unit_vector(dim, rng);
        finalize(p, seed);
        return p;
    }

    std::uniform_int_distribution<int> symbol(0, 2);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const char alphabet[3] = {'I', 'X', 'Z'};

    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        std::set<std::string> labels;
        while (static_cast<int>(labels.size()) < n_terms) {
            std::string label(static_cast<std::size_t>(n_qubits), 'I');
            for (char& ch : label) {
                ch = alphabet[symbol(rng)];
            }
            if (label.find_first_not_of('I') != std::string::npos) {
                labels.insert(label);
            }
        }
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
        for (const std::string& label : labels) {
            const double magnitude = 0.1 + 0.9 * unit(rng);
            const double weight = unit(rng) < 0.5 ? -magnitude : magnitude;
            a += weight * PauliString(label).dense().real();
        }
        auto [lo, hi] = symmetric_extremes(a);
        if (hi - lo < 1e-9) {
            continue;
        }
        a.diagonal().array() += ratio_shift(lo, hi, target_kappa);
        SLEProblem p;
        p.n_qubits = n_qubits;
        p.A = a.cast<Cd>();
        p.b = random_unit_vector(dim, rng);
        finalize(p, seed);
        return p;
    }
    throw std::runtime_error("short-expansion instance generation exhausted its retries");
}

double condition_number(const Eigen::MatrixXcd& A) {
    if (A.rows() == 0 || A.rows() != A.cols()) {
        throw std::invalid_argument("square nonempty matrix required");
    }
    const double scale = A.norm();
    if (scale == 0.0) {
        throw std::runtime_error("zero matrix is singular");
    }
    double largest = 0.0;
    double smallest = 0.0;
    if ((A - A.adjoint()).norm() <= 1e-12 * scale) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(A);
        largest = solver.eigenvalues().cwiseAbs().maxCoeff();
        smallest = solver.eigenvalues().cwiseAbs().minCoeff();
    } else if ((A * A.adjoint() - A.adjoint() * A).norm() <= 1e-10 * scale * scale) {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(A);
        largest = solver.eigenvalues().cwiseAbs().maxCoeff();
        smallest = solver.eigenvalues().cwiseAbs().minCoeff();
    } else {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
        largest = svd.singularValues().maxCoeff();
        smallest = svd.singularValues().minCoeff();
    }
    if (smallest <= 1e-13 * largest) {
        throw std::runtime_error("matrix is singular to working precision");
    }
    return largest / smallest;
}

double sparsity(const Eigen::MatrixXcd& A) {
    long zeros = 0;
    for (Eigen::Index c = 0; c < A.cols(); ++c) {
        for (Eigen::Index r = 0; r < A.rows(); ++r) {
            if (A(r, c) == Cd(0.0, 0.0)) {
                ++zeros;
            }
        }
    }
    return static_cast<double>(zeros) / (static_cast<double>(A.rows()) * A.cols());
}

Eigen::VectorXcd classical_solve(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& b) {
    if (A.rows() != A.cols() || A.rows() != b.size() || A.rows() == 0) {
        throw std::invalid_argument("dimension mismatch");
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    Eigen::VectorXcd x = lu.solve(b);
    const double b_norm = b.norm();
    const double residual = (A * x - b).norm();
    if (!x.allFinite() || residual > 1e-10 * (b_norm > 0.0 ? b_norm : 1.0)) {
        throw std::runtime_error("elimination failed: matrix singular or too ill-conditioned");
    }
    return x;
}

double fidelity(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) {
    if (u.size() != v.size()) {
        throw std::invalid_argument("dimension mismatch");
    }
    const double nu = u.squaredNorm();
    const double nv = v.squaredNorm();
    if (nu == 0.0 || nv == 0.0) {
        throw std::invalid_argument("fidelity of a zero vector is undefined");
    }
    return std::norm(u.dot(v)) / (nu * nv);
}

namespace {

nlohmann::json complex_to_json(const Cd& z) {
    return {{"re", z.real()}, {"im", z.imag()}};
}

Cd complex_from_json(const nlohmann::json& j) {
    return {j.at("re").get<double>(), j.at("im").get<double>()};
}

} // namespace

nlohmann::json problem_to_json(const SLEProblem& problem) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < problem.A.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < problem.A.cols(); ++c) {
            row.push_back(complex_to_json(problem.A(r, c)));
        }
        rows.push_back(std::move(row));
    }
    nlohmann::json b = nlohmann::json::array();
    for (Eigen::Index i = 0; i < problem.b.size(); ++i) {
        b.push_back(complex_to_json(problem.b(i)));
    }
    return {{"n", problem.n_qubits},
            {"A", std::move(rows)},
            {"b", std::move(b)},
            {"meta",
             {{"kappa", problem.meta.condition_number},
              {"sparsity", problem.meta.sparsity},
              {"seed", problem.meta.seed}}}};
}

SLEProblem problem_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw std::invalid_argument("problem file must be a JSON object");
    }
    SLEProblem p;
    p.n_qubits = j.at("n").get<int>();
    const int dim = checked_dim(p.n_qubits);
    const nlohmann::json& rows = j.at("A");
    if (!rows.is_array() || static_cast<int>(rows.size()) != dim) {
        throw std::invalid_argument("matrix row count does not match the qubit count");
    }
    p.A.resize(dim, dim);
    for (int r = 0; r < dim; ++r) {
        const nlohmann::json& row = rows.at(static_cast<std::size_t>(r));
        if (!row.is_array() || static_cast<int>(row.size()) != dim) {
            throw std::invalid_argument("matrix row length does not match the qubit count");
        }
        for (int c = 0; c < dim; ++c) {
            p.A(r, c) = complex_from_json(row.at(static_cast<std::size_t>(c)));
        }
    }
    const nlohmann::json& b = j.at("b");
    if (!b.is_array() || static_cast<int>(b.size()) != dim) {
        throw std::invalid_argument("vector length does not match the qubit count");
    }
    p.b.resize(dim);
    for (int i = 0; i < dim; ++i) {
        p.b(i) = complex_from_json(b.at(static_cast<std::size_t>(i)));
    }
    const nlohmann::json& meta = j.at("meta");
    p.meta.condition_number = meta.at("kappa").get<double>();
    p.meta.sparsity = meta.at("sparsity").get<double>();
    p.meta.seed = meta.at("seed").get<std::uint64_t>();
    p.decomposition = decompose(p.A);
    return p;
}

} // namespace vqls
