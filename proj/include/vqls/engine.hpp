#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

#include "vqls/ansatz.hpp"
#include "vqls/circuits.hpp"
#include "vqls/problems.hpp"

namespace vqls {

enum class OptimizerMode { ASA, ADA };

struct OptimizerConfig {
    OptimizerMode mode = OptimizerMode::ASA;
    double step_size = 0.05;
    double d_t = 0.1;          // convergence threshold on the cost
    long max_iterations = 6400;
    double sp = 0.0;           // layer-switching threshold (dynamic mode)
    int layer_cap = 0;         // 0 selects d_min(n_qubits)
    std::uint64_t seed = 0;    // initial-angle seed
};

struct IterationRecord {
    long t = 0;
    double cost = 0.0;
    int layers = 0;
    int params = 0;
    long evals = 0;            // cost evaluations charged to this iteration
    double wall_seconds = 0.0;
};

struct RunTrace {
    std::vector<IterationRecord> records;
    bool converged = false;
    double final_cost = 1.0;
    std::vector<double> final_params;
    AnsatzSpec final_ansatz;
    long total_evals = 0;
};

/// Evaluates C = 1 - |<b|psi>|^2 / <psi|psi> with |psi> = A V(theta)|0>.
///
/// EXACT mode works on amplitudes directly: V(theta)|0> is simulated once and
/// A is applied term by term through its Pauli decomposition. SHOTS mode
/// assembles the same quantity from circuit estimates: one Hadamard-test pair
/// per decomposition pair for the denominator <x|P_l P_l'|x>, a swap test per
/// diagonal numerator entry |<b|P_l|x>|^2, and a Hadamard test of
/// P_l U R0 U^dag P_l' (U the b-preparation oracle, R0 the reflection about
/// |0...0>) for each off-diagonal numerator entry, which equals
/// 2 conj(gamma_l) gamma_l' - <x|P_l P_l'|x>. Imaginary parts are skipped
/// when coefficients, right-hand side, and circuit are all real-valued.
///
/// Costs are clamped to [0, 1]. In EXACT mode a denominator below 1e-12
/// throws std::runtime_error (the operator annihilates the trial state).
/// In SHOTS mode a non-positive denominator is a corrupted measurement,
/// not a property of the operator: the estimate is redone once and, if
/// still unusable, replaced by the pessimistic worst case (cost 1).
class CostEvaluator {
public:
    CostEvaluator(const SLEProblem& problem, AnsatzSpec ansatz, EvalBackend backend);

    double cost_global(const std::vector<double>& params);

    /// Exact gradient of the normalized cost from the parameter-shift
    /// identity. The overlap numerator and norm denominator are each
    /// frequency-1 trigonometric in every angle, so their derivatives are
    /// [f(theta_i + pi/2) - f(theta_i - pi/2)] / 2 exactly; the two are
    /// combined through the quotient rule with the unshifted pair reused
    /// from the preceding cost evaluation at the same point. Costs exactly
    /// two evaluations per parameter (plus one re-evaluation when no cost
    /// call at this point precedes it).
    std::vector<double> gradient(const std::vector<double>& params);

    const AnsatzSpec& ansatz() const { return ansatz_; }
    void set_ansatz(const AnsatzSpec& ansatz);

    /// Cumulative number of cost evaluations performed so far.
    long eval_count() const { return evals_; }

private:
    // (overlap numerator, norm denominator) of the cost ratio at one point
    std::pair<double, double> eval_terms(const std::vector<double>& params);
    std::pair<double, double> exact_terms(const std::vector<double>& params) const;
    std::pair<double, double> shots_terms(const std::vector<double>& params);
    std::pair<double, double> shots_terms_sampled(const std::vector<double>& params);

    const SLEProblem* problem_;
    AnsatzSpec ansatz_;
    EvalBackend backend_;
    std::mt19937_64 rng_;
    long evals_ = 0;
    bool statically_real_ = false;
    std::vector<std::complex<double>> b_amps_;
    Gate b_prep_;
    Gate b_prep_adjoint_;
    bool cache_valid_ = false;
    std::vector<double> cached_params_;
    std::pair<double, double> cached_terms_{0.0, 0.0};
};

/// One descent update: params - step * grad.
std::vector<double> gd_step(const std::vector<double>& params, const std::vector<double>& grad,
                            double step);

/// Layer-switching threshold from the target cost threshold and the expected
/// iteration budget: (1 - d_t) / n_iterd.
double choose_sp(double d_t, double n_iterd);

/// Cost threshold equivalent to a solution error epsilon at conditioning
/// kappa: (epsilon / kappa)^2.
double convergence_threshold(double epsilon, double kappa);

/// Fixed-depth optimization: layer count pinned at layer_cap (or d_min),
/// seeded uniform initial angles, gradient descent until the cost drops
/// below d_t or the iteration budget runs out.
RunTrace run_asa(const SLEProblem& problem, const OptimizerConfig& config,
                 const EvalBackend& backend);

/// Growing-depth optimization: starts at one layer; when the cost difference
/// between successive iterations falls below sp (and the cap allows), a
/// zero-initialized layer is appended before the next gradient step. An
/// append resets the difference reference, so the comparison resumes only
/// once two post-append costs exist.
RunTrace run_ada(const SLEProblem& problem, const OptimizerConfig& config,
                 const EvalBackend& backend);

/// The normalized trial solution V(theta*)|0> encoded by a finished trace.
std::vector<std::complex<double>> solution_state(const RunTrace& trace, const SLEProblem& problem);

/// One JSON object per iteration: {"t":..,"cost":..,"layers":..,"params":..}.
void write_trace_jsonl(const RunTrace& trace, std::ostream& out);
RunTrace read_trace_jsonl(std::istream& in);

} // namespace vqls
