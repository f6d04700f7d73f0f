#include "vqls/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>
#include <tuple>

#include <json.hpp>

#include "vqls/noise.hpp"

namespace vqls {

namespace {

using Cd = std::complex<double>;
using Clock = std::chrono::steady_clock;

constexpr double kDegenerateFloor = 1e-12;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

bool is_real(const Cd& z) { return std::abs(z.imag()) <= 1e-14 * std::max(1.0, std::abs(z.real())); }

std::vector<int> system_qubits(int n) {
    std::vector<int> qubits(static_cast<std::size_t>(n));
    std::iota(qubits.begin(), qubits.end(), 0);
    return qubits;
}

} // namespace

CostEvaluator::CostEvaluator(const SLEProblem& problem, AnsatzSpec ansatz, EvalBackend backend)
    : problem_(&problem), ansatz_(ansatz), backend_(backend), rng_(backend.rng_seed) {
    if (problem.n_qubits != ansatz.n_qubits) {
        throw std::invalid_argument("ansatz register does not match the problem");
    }
    if (problem.decomposition.terms.empty()) {
        throw std::invalid_argument("problem carries an empty operator decomposition");
    }
    const double b_norm = problem.b.norm();
    if (b_norm <= 0.0) {
        throw std::invalid_argument("right-hand side must be nonzero");
    }
    b_amps_.resize(static_cast<std::size_t>(problem.b.size()));
    bool b_real = true;
    for (Eigen::Index i = 0; i < problem.b.size(); ++i) {
        b_amps_[static_cast<std::size_t>(i)] = problem.b(i) / b_norm;
        b_real = b_real && is_real(b_amps_[static_cast<std::size_t>(i)]);
    }
    bool terms_real = true;
    for (const PauliTerm& term : problem.decomposition.terms) {
        terms_real = terms_real && is_real(term.coeff) && term.pauli.y_count() % 2 == 0;
    }
    statically_real_ = b_real && terms_real && ansatz_.axis == RotationAxis::Y;
    b_prep_ = amplitude_oracle(b_amps_, system_qubits(problem.n_qubits));
    b_prep_adjoint_ = oracle_adjoint(b_prep_);
}

void CostEvaluator::set_ansatz(const AnsatzSpec& ansatz) {
    if (ansatz.n_qubits != ansatz_.n_qubits) {
        throw std::invalid_argument("cannot change the register size mid-run");
    }
    if (ansatz.axis != ansatz_.axis) {
        statically_real_ = statically_real_ && ansatz.axis == RotationAxis::Y;
    }
    ansatz_ = ansatz;
    cache_valid_ = false;
}

std::pair<double, double> CostEvaluator::eval_terms(const std::vector<double>& params) {
    if (static_cast<int>(params.size()) != ansatz_.param_count()) {
        throw std::invalid_argument("parameter count does not match ansatz");
    }
    ++evals_;
    return backend_.mode == EvalMode::Exact ? exact_terms(params) : shots_terms(params);
}

double CostEvaluator::cost_global(const std::vector<double>& params) {
    const std::pair<double, double> terms = eval_terms(params);
    cached_params_ = params;
    cached_terms_ = terms;
    cache_valid_ = true;
    return clamp01(1.0 - terms.first / terms.second);
}

std::pair<double, double> CostEvaluator::exact_terms(const std::vector<double>& params) const {
    Statevector x(problem_->n_qubits);
    x.apply(build_circuit(ansatz_, params));

    const std::size_t dim = x.dim();
    std::vector<Cd> psi(dim, Cd(0.0, 0.0));
    std::vector<Cd> scratch;
    for (const PauliTerm& term : problem_->decomposition.terms) {
        scratch = x.amplitudes();
        apply_pauli(term.pauli, scratch);
        for (std::size_t i = 0; i < dim; ++i) {
            psi[i] += term.coeff * scratch[i];
        }
    }
    double denom = 0.0;
    Cd overlap(0.0, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
        denom += std::norm(psi[i]);
        overlap += std::conj(b_amps_[i]) * psi[i];
    }
    if (denom < kDegenerateFloor) {
        throw std::runtime_error("operator annihilates the trial state");
    }
    return {std::norm(overlap), denom};
}

std::pair<double, double> CostEvaluator::shots_terms(const std::vector<double>& params) {
    // A noise trajectory can flip a Hadamard-test sign and drive the sampled
    // denominator non-positive. That is a corrupted measurement, not a
    // degenerate operator: redo it once, and if it is still unusable report
    // the pessimistic worst case (cost 1) instead of a spuriously low cost.
    for (int attempt = 0; attempt < 2; ++attempt) {
        const std::pair<double, double> terms = shots_terms_sampled(params);
        if (terms.second >= kDegenerateFloor) {
            return terms;
        }
    }
    return {0.0, 1.0};
}

std::pair<double, double> CostEvaluator::shots_terms_sampled(const std::vector<double>& params) {
    const int n = problem_->n_qubits;
    const std::vector<int> sys = system_qubits(n);
    const std::vector<Gate> prep = build_circuit(ansatz_, params);
    const auto& terms = problem_->decomposition.terms;
    const int count = static_cast<int>(terms.size());

    auto pauli_gate = [&](int l) { return Gate::pauli(terms[static_cast<std::size_t>(l)].pauli, sys); };
    auto estimate = [&](const std::vector<Gate>& w) {
        const double re = hadamard_test(n, prep, w, HadamardPart::Real, backend_, rng_);
        const double im = statically_real_
                              ? 0.0
                              : hadamard_test(n, prep, w, HadamardPart::Imag, backend_, rng_);
        return Cd(re, im);
    };

    // Denominator entries <x| P_l P_l' |x>.
    Eigen::MatrixXcd beta(count, count);
    for (int l = 0; l < count; ++l) {
        for (int lp = l; lp < count; ++lp) {
            beta(l, lp) = estimate({pauli_gate(lp), pauli_gate(l)});
            beta(lp, l) = std::conj(beta(l, lp));
        }
    }

    // Numerator entries conj(gamma_l) gamma_l' with gamma_l = <b|P_l|x>.
    Eigen::MatrixXcd gamma2(count, count);
    for (int l = 0; l < count; ++l) {
        std::vector<Gate> shifted_prep = prep;
        shifted_prep.push_back(pauli_gate(l));
        gamma2(l, l) = swap_test(n, shifted_prep, {b_prep_}, backend_, rng_);
    }
    for (int l = 0; l < count; ++l) {
        for (int lp = l + 1; lp < count; ++lp) {
            // <x| P_l U R0 U^dag P_l' |x> = 2 conj(gamma_l) gamma_l' - beta_ll'
            const Cd reflected =
                estimate({pauli_gate(lp), b_prep_adjoint_, Gate::reflect0(sys), b_prep_, pauli_gate(l)});
            gamma2(l, lp) = 0.5 * (reflected + beta(l, lp));
            gamma2(lp, l) = std::conj(gamma2(l, lp));
        }
    }

    Eigen::VectorXcd coeff(count);
    for (int l = 0; l < count; ++l) {
        coeff(l) = terms[static_cast<std::size_t>(l)].coeff;
    }
    const double denom = (coeff.adjoint() * beta * coeff).value().real();
    const double numer = (coeff.adjoint() * gamma2 * coeff).value().real();
    return {numer, denom};
}

std::vector<double> CostEvaluator::gradient(const std::vector<double>& params) {
    if (static_cast<int>(params.size()) != ansatz_.param_count()) {
        throw std::invalid_argument("parameter count does not match ansatz");
    }
    if (!cache_valid_ || cached_params_ != params) {
        cost_global(params);
    }
    const double numer = cached_terms_.first;
    const double denom = cached_terms_.second;

    std::vector<double> grad(params.size());
    std::vector<double> shifted = params;
    for (std::size_t i = 0; i < params.size(); ++i) {
        shifted[i] = params[i] + M_PI / 2.0;
        const std::pair<double, double> plus = eval_terms(shifted);
        shifted[i] = params[i] - M_PI / 2.0;
        const std::pair<double, double> minus = eval_terms(shifted);
        shifted[i] = params[i];
        const double d_numer = 0.5 * (plus.first - minus.first);
        const double d_denom = 0.5 * (plus.second - minus.second);
        grad[i] = -(d_numer * denom - numer * d_denom) / (denom * denom);
    }
    return grad;
}

std::vector<double> gd_step(const std::vector<double>& params, const std::vector<double>& grad,
                            double step) {
    if (params.size() != grad.size()) {
        throw std::invalid_argument("gradient length does not match parameters");
    }
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw std::invalid_argument("step size must be positive");
    }
    std::vector<double> next(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        next[i] = params[i] - step * grad[i];
    }
    return next;
}

double choose_sp(double d_t, double n_iterd) {
    if (!(d_t > 0.0) || d_t > 1.0) {
        throw std::invalid_argument("cost threshold must lie in (0, 1]");
    }
    if (!(n_iterd >= 1.0)) {
        throw std::invalid_argument("iteration budget must be at least 1");
    }
    return (1.0 - d_t) / n_iterd;
}

double convergence_threshold(double epsilon, double kappa) {
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("error target must be positive");
    }
    if (!(kappa >= 1.0)) {
        throw std::invalid_argument("conditioning must be at least 1");
    }
    const double ratio = epsilon / kappa;
    return ratio * ratio;
}

namespace {

void validate_config(const OptimizerConfig& config, OptimizerMode expected) {
    if (config.mode != expected) {
        throw std::invalid_argument("optimizer mode does not match the entry point");
    }
    if (!(config.step_size > 0.0) || !std::isfinite(config.step_size)) {
        throw std::invalid_argument("step size must be positive");
    }
    if (!(config.d_t > 0.0) || !(config.d_t < 1.0)) {
        throw std::invalid_argument("convergence threshold must lie in (0, 1)");
    }
    if (config.max_iterations < 1) {
        throw std::invalid_argument("iteration budget must be at least 1");
    }
    if (config.layer_cap < 0) {
        throw std::invalid_argument("layer cap cannot be negative");
    }
    if (expected == OptimizerMode::ADA && (!(config.sp >= 0.0) || !std::isfinite(config.sp))) {
        throw std::invalid_argument("switching threshold must be a nonnegative number");
    }
}

RunTrace optimize(const SLEProblem& problem, const OptimizerConfig& config,
                  const EvalBackend& backend, bool dynamic) {
    const int cap = config.layer_cap > 0 ? config.layer_cap : d_min(problem.n_qubits);
    AnsatzSpec ansatz;
    ansatz.n_qubits = problem.n_qubits;
    ansatz.n_layers = dynamic ? 1 : cap;
    std::vector<double> params = initial_parameters(ansatz, config.seed);
    CostEvaluator evaluator(problem, ansatz, backend);

    RunTrace trace;
    std::optional<double> previous;
    for (long t = 0; t < config.max_iterations; ++t) {
        const auto started = Clock::now();
        const long evals_before = evaluator.eval_count();
        const double cost = evaluator.cost_global(params);
        if (cost < config.d_t) {
            trace.records.push_back({t, cost, ansatz.n_layers, ansatz.param_count(),
                                     evaluator.eval_count() - evals_before,
                                     seconds_since(started)});
            trace.converged = true;
            break;
        }
        if (dynamic) {
            if (previous && std::abs(*previous - cost) < config.sp && ansatz.n_layers < cap) {
                std::tie(ansatz, params) = append_layer(ansatz, std::move(params), cap);
                evaluator.set_ansatz(ansatz);
                previous.reset();
            } else {
                previous = cost;
            }
        }
        const std::vector<double> grad = evaluator.gradient(params);
        params = gd_step(params, grad, config.step_size);
        trace.records.push_back({t, cost, ansatz.n_layers, ansatz.param_count(),
                                 evaluator.eval_count() - evals_before, seconds_since(started)});
    }

    trace.final_cost = trace.records.back().cost;
    trace.final_params = std::move(params);
    trace.final_ansatz = ansatz;
    trace.total_evals = evaluator.eval_count();
    return trace;
}

} // namespace

RunTrace run_asa(const SLEProblem& problem, const OptimizerConfig& config,
                 const EvalBackend& backend) {
    validate_config(config, OptimizerMode::ASA);
    return optimize(problem, config, backend, false);
}

RunTrace run_ada(const SLEProblem& problem, const OptimizerConfig& config,
                 const EvalBackend& backend) {
    validate_config(config, OptimizerMode::ADA);
    return optimize(problem, config, backend, true);
}

std::vector<Cd> solution_state(const RunTrace& trace, const SLEProblem& problem) {
    AnsatzSpec spec = trace.final_ansatz;
    spec.n_qubits = problem.n_qubits;
    Statevector x(problem.n_qubits);
    x.apply(build_circuit(spec, trace.final_params));
    return x.amplitudes();
}

void write_trace_jsonl(const RunTrace& trace, std::ostream& out) {
    for (const IterationRecord& r : trace.records) {
        nlohmann::ordered_json line{
            {"t", r.t}, {"cost", r.cost}, {"layers", r.layers}, {"params", r.params}};
        out << line.dump() << '\n';
    }
}

RunTrace read_trace_jsonl(std::istream& in) {
    RunTrace trace;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const nlohmann::json j = nlohmann::json::parse(line);
        IterationRecord r;
        r.t = j.at("t").get<long>();
        r.cost = j.at("cost").get<double>();
        r.layers = j.at("layers").get<int>();
        r.params = j.at("params").get<int>();
        trace.records.push_back(r);
    }
    if (!trace.records.empty()) {
        trace.final_cost = trace.records.back().cost;
        trace.final_ansatz.n_layers = trace.records.back().layers;
    }
    return trace;
}

} // namespace vqls
