#include <doctest.h>

#include <cmath>
#include <complex>
#include <sstream>

#include "oracles.hpp"
#include "vqls/engine.hpp"

using vqls::AnsatzSpec;
using vqls::CostEvaluator;
using vqls::EvalBackend;
using vqls::EvalMode;
using vqls::OptimizerConfig;
using vqls::OptimizerMode;
using vqls::RunTrace;
using vqls::SLEProblem;
using Cd = std::complex<double>;

namespace {

SLEProblem make_problem(int n, const Eigen::MatrixXcd& a, const Eigen::VectorXcd& b) {
    SLEProblem p;
    p.n_qubits = n;
    p.A = a;
    p.decomposition = vqls::decompose(a);
    p.b = b;
    return p;
}

SLEProblem identity_problem(int n, const Eigen::VectorXcd& b) {
    const Eigen::Index dim = Eigen::Index{1} << n;
    return make_problem(n, Eigen::MatrixXcd::Identity(dim, dim), b);
}

Eigen::VectorXcd ansatz_state_dense(const AnsatzSpec& spec, const std::vector<double>& params) {
    const Eigen::Index dim = Eigen::Index{1} << spec.n_qubits;
    Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(dim);
    e0(0) = 1.0;
    return oracle::dense_circuit(vqls::build_circuit(spec, params), spec.n_qubits) * e0;
}

std::vector<double> random_angles(int count, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    std::vector<double> params(static_cast<std::size_t>(count));
    for (double& p : params) {
        p = angle(rng);
    }
    return params;
}

void check_structural_invariants(const RunTrace& trace, int cap, double d_t) {
    REQUIRE(!trace.records.empty());
    int prev_layers = trace.records.front().layers;
    long expected_t = 0;
    for (const vqls::IterationRecord& r : trace.records) {
        CHECK(r.t == expected_t);
        ++expected_t;
        CHECK(r.layers >= prev_layers);
        CHECK(r.layers - prev_layers <= 1);
        CHECK(r.layers <= cap);
        CHECK(r.params == r.layers * trace.final_ansatz.n_qubits);
        const bool terminal = trace.converged && r.t == trace.records.back().t;
        const bool appended = r.layers > prev_layers;
        if (terminal) {
            CHECK(r.evals == 1);
        } else {
            // A layer append re-primes the evaluator at the grown parameter
            // vector, costing one extra evaluation that iteration.
            CHECK(r.evals == 2 * r.params + 1 + (appended ? 1 : 0));
        }
        prev_layers = r.layers;
    }
    if (trace.converged) {
        CHECK(trace.final_cost < d_t);
    }
}

} // namespace

TEST_CASE("exact cost matches the dense formula on random instances") {
    std::mt19937_64 rng(404);
    for (int n = 1; n <= 3; ++n) {
        for (int rep = 0; rep < 4; ++rep) {
            const Eigen::Index dim = Eigen::Index{1} << n;
            Eigen::MatrixXcd a = oracle::random_matrix(dim, rng);
            Eigen::VectorXcd b = oracle::random_state(n, rng);
            SLEProblem p = make_problem(n, a, b);
            AnsatzSpec spec{n, 2};
            std::vector<double> params = random_angles(spec.param_count(), rng);

            CostEvaluator eval(p, spec, EvalBackend{});
            const double got = eval.cost_global(params);
            const double want = oracle::dense_cost(a, b, ansatz_state_dense(spec, params));
            CHECK(std::abs(got - want) < 1e-10);
            CHECK(got >= 0.0);
            CHECK(got <= 1.0);
        }
    }
}

TEST_CASE("perfect and orthogonal trial states") {
    std::mt19937_64 rng(7);
    AnsatzSpec spec{2, 2};
    std::vector<double> params = random_angles(4, rng);
    Eigen::VectorXcd encoded = ansatz_state_dense(spec, params);
    SLEProblem aligned = identity_problem(2, encoded);
    CostEvaluator eval(aligned, spec, EvalBackend{});
    CHECK(eval.cost_global(params) < 1e-12);

    Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(2);
    e1(1) = 1.0;
    SLEProblem orthogonal = identity_problem(1, e1);
    AnsatzSpec single{1, 1};
    CostEvaluator eval1(orthogonal, single, EvalBackend{});
    CHECK(eval1.cost_global({0.0}) == 1.0);
}

TEST_CASE("annihilated trial state raises the degenerate error") {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2, 2);
    a(0, 0) = 1.0; // projector onto |0>
    Eigen::VectorXcd b(2);
    b << Cd(1.0, 0.0), Cd(0.0, 0.0);
    SLEProblem p = make_problem(1, a, b);
    CostEvaluator eval(p, AnsatzSpec{1, 1}, EvalBackend{});
    CHECK_THROWS_AS(eval.cost_global({M_PI}), std::runtime_error);
}

TEST_CASE("single-qubit closed form: cost and shift-rule gradient") {
    Eigen::VectorXcd b(2);
    b << Cd(1.0, 0.0), Cd(0.0, 0.0);
    SLEProblem p = identity_problem(1, b);
    CostEvaluator eval(p, AnsatzSpec{1, 1}, EvalBackend{});
    for (double theta : {0.0, 0.3, 1.0, M_PI / 2.0, 2.2, M_PI, 5.0}) {
        const double expected = std::sin(theta / 2.0) * std::sin(theta / 2.0);
        CHECK(std::abs(eval.cost_global({theta}) - expected) < 1e-12);
        const double analytic = 0.5 * std::sin(theta);
        CHECK(std::abs(eval.gradient({theta})[0] - analytic) < 1e-12);
    }
    CHECK(eval.gradient({M_PI / 2.0})[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("gradient matches central finite differences") {
    SLEProblem p = vqls::generate_sle(4, 3.0, 0.0, 15);
    AnsatzSpec spec{4, 3};
    std::mt19937_64 rng(16);
    std::vector<double> params = random_angles(spec.param_count(), rng);
    CostEvaluator eval(p, spec, EvalBackend{});
    const std::vector<double> grad = eval.gradient(params);

    const double h = 1e-5;
    for (std::size_t i = 0; i < params.size(); ++i) {
        std::vector<double> up = params;
        std::vector<double> down = params;
        up[i] += h;
        down[i] -= h;
        const double fd = (eval.cost_global(up) - eval.cost_global(down)) / (2.0 * h);
        CHECK(std::abs(grad[i] - fd) < 1e-6);
    }
}

TEST_CASE("gradient vanishes at an exact minimum") {
    std::mt19937_64 rng(21);
    AnsatzSpec spec{2, 2};
    std::vector<double> params = random_angles(4, rng);
    SLEProblem p = identity_problem(2, ansatz_state_dense(spec, params));
    CostEvaluator eval(p, spec, EvalBackend{});
    for (double g : eval.gradient(params)) {
        CHECK(std::abs(g) < 1e-8);
    }
}

TEST_CASE("gd_step behavior") {
    CHECK(vqls::gd_step({1.0, 2.0}, {0.0, 0.0}, 0.05) == std::vector<double>{1.0, 2.0});
    std::vector<double> stepped = vqls::gd_step({1.0, 2.0}, {1.0, 0.0}, 0.05);
    CHECK(stepped[0] == doctest::Approx(0.95).epsilon(1e-15));
    CHECK(stepped[1] == 2.0);
    CHECK_THROWS_AS(vqls::gd_step({1.0}, {1.0, 2.0}, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(vqls::gd_step({1.0}, {1.0}, 0.0), std::invalid_argument);

    // 100 descent steps on the single-qubit closed form strictly reduce cost.
    Eigen::VectorXcd b(2);
    b << Cd(1.0, 0.0), Cd(0.0, 0.0);
    SLEProblem p = identity_problem(1, b);
    CostEvaluator eval(p, AnsatzSpec{1, 1}, EvalBackend{});
    std::vector<double> theta = {1.0};
    double last = eval.cost_global(theta);
    for (int i = 0; i < 100; ++i) {
        theta = vqls::gd_step(theta, eval.gradient(theta), 0.05);
        const double now = eval.cost_global(theta);
        CHECK(now < last);
        last = now;
    }
}

TEST_CASE("switching-threshold and convergence-threshold formulas") {
    CHECK(std::abs(vqls::choose_sp(0.1, 1000.0) - 0.0009) < 1e-12);
    CHECK(std::abs(vqls::choose_sp(0.1, 1800.0) - 0.0005) < 1e-12);
    CHECK(vqls::choose_sp(1.0, 50.0) == 0.0);
    CHECK_THROWS_AS(vqls::choose_sp(0.0, 100.0), std::invalid_argument);
    CHECK_THROWS_AS(vqls::choose_sp(0.1, 0.5), std::invalid_argument);

    CHECK(vqls::convergence_threshold(0.1, 10.0) == doctest::Approx(1e-4).epsilon(1e-12));
    CHECK_THROWS_AS(vqls::convergence_threshold(0.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(vqls::convergence_threshold(0.1, 0.5), std::invalid_argument);
}

TEST_CASE("static runs converge on identity systems and recover the solution") {
    for (int n = 1; n <= 3; ++n) {
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            // target kappa 1 yields the identity matrix and a random real b
            SLEProblem p = vqls::generate_sle(n, 1.0, 0.0, seed + 100 * n);
            OptimizerConfig config;
            config.mode = OptimizerMode::ASA;
            config.seed = seed;
            // 4 layers: the 2-layer minimum underparameterizes real 3-qubit
            // states (6 angles for 7 degrees of freedom) and stalls
            config.layer_cap = 4;
            RunTrace trace = vqls::run_asa(p, config, EvalBackend{});
            CHECK(trace.converged);
            CHECK(trace.final_cost < config.d_t);

            const int cap = config.layer_cap;
            for (const vqls::IterationRecord& r : trace.records) {
                CHECK(r.layers == cap); // static depth never moves
                if (r.t != trace.records.back().t || !trace.converged) {
                    CHECK(r.evals == 2 * r.params + 1);
                }
            }
            check_structural_invariants(trace, cap, config.d_t);

            Eigen::VectorXcd x(Eigen::Index{1} << n);
            const std::vector<Cd> amps = vqls::solution_state(trace, p);
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                x(i) = amps[static_cast<std::size_t>(i)];
            }
            CHECK(vqls::fidelity(x, vqls::classical_solve(p.A, p.b)) >= 0.9);
        }
    }
}

TEST_CASE("static runs mostly converge on mildly conditioned 4-qubit instances") {
    int converged = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        SLEProblem p = vqls::generate_sle(4, 2.0, 0.0, seed);
        OptimizerConfig config;
        config.mode = OptimizerMode::ASA;
        config.seed = seed;
        RunTrace trace = vqls::run_asa(p, config, EvalBackend{});
        if (trace.converged) {
            ++converged;
        }
        check_structural_invariants(trace, vqls::d_min(4), config.d_t);
    }
    CHECK(converged >= 3);
}

TEST_CASE("dynamic run with zero switching threshold equals one-layer static run") {
    SLEProblem p = vqls::generate_sle(2, 4.0, 0.0, 51);
    OptimizerConfig ada;
    ada.mode = OptimizerMode::ADA;
    ada.sp = 0.0;
    ada.seed = 3;
    ada.max_iterations = 200;
    RunTrace dynamic = vqls::run_ada(p, ada, EvalBackend{});

    OptimizerConfig asa;
    asa.mode = OptimizerMode::ASA;
    asa.layer_cap = 1;
    asa.seed = 3;
    asa.max_iterations = 200;
    RunTrace fixed = vqls::run_asa(p, asa, EvalBackend{});

    REQUIRE(dynamic.records.size() == fixed.records.size());
    for (std::size_t i = 0; i < dynamic.records.size(); ++i) {
        CHECK(dynamic.records[i].cost == fixed.records[i].cost);
        CHECK(dynamic.records[i].layers == 1);
    }
}

TEST_CASE("dynamic run with a huge switching threshold climbs to the cap") {
    SLEProblem p = vqls::generate_sle(2, 6.0, 0.0, 8);
    OptimizerConfig config;
    config.mode = OptimizerMode::ADA;
    config.sp = 10.0;
    config.layer_cap = 4;
    config.d_t = 1e-6;
    config.max_iterations = 20;
    config.seed = 1;
    RunTrace trace = vqls::run_ada(p, config, EvalBackend{});

    // An append pauses the cost comparison for one iteration, so depth grows
    // on alternating iterations: 1, 2, 2, 3, 3, 4, then capped.
    for (const vqls::IterationRecord& r : trace.records) {
        const int expected = std::min(config.layer_cap, 1 + static_cast<int>((r.t + 1) / 2));
        CHECK(r.layers == expected);
    }
    CHECK(trace.records[5].layers == config.layer_cap);
    check_structural_invariants(trace, config.layer_cap, config.d_t);
}

TEST_CASE("dynamic run on a generated instance keeps its structural invariants") {
    SLEProblem p = vqls::generate_sle(3, 8.0, 0.0, 19);
    OptimizerConfig config;
    config.mode = OptimizerMode::ADA;
    config.sp = vqls::choose_sp(config.d_t, 400.0);
    config.max_iterations = 3000;
    config.seed = 2;
    RunTrace trace = vqls::run_ada(p, config, EvalBackend{});
    check_structural_invariants(trace, vqls::d_min(3), config.d_t);

    long eval_sum = 0;
    for (const vqls::IterationRecord& r : trace.records) {
        eval_sum += r.evals;
    }
    CHECK(eval_sum == trace.total_evals);
}

TEST_CASE("exact-mode runs are deterministic") {
    SLEProblem p = vqls::generate_sle(2, 5.0, 0.0, 77);
    OptimizerConfig config;
    config.mode = OptimizerMode::ADA;
    config.sp = 1e-3;
    config.max_iterations = 300;
    config.seed = 9;
    RunTrace first = vqls::run_ada(p, config, EvalBackend{});
    RunTrace second = vqls::run_ada(p, config, EvalBackend{});

    std::ostringstream a, b;
    vqls::write_trace_jsonl(first, a);
    vqls::write_trace_jsonl(second, b);
    CHECK(a.str() == b.str());
    CHECK(first.final_params == second.final_params);
}

TEST_CASE("trace serialization format and round trip") {
    RunTrace trace;
    trace.records.push_back({0, 0.5, 1, 2, 5, 0.001});
    trace.records.push_back({1, 0.25, 2, 4, 9, 0.002});
    trace.final_cost = 0.25;

    std::ostringstream out;
    vqls::write_trace_jsonl(trace, out);
    const std::string text = out.str();
    CHECK(text == "{\"t\":0,\"cost\":0.5,\"layers\":1,\"params\":2}\n"
                  "{\"t\":1,\"cost\":0.25,\"layers\":2,\"params\":4}\n");

    std::istringstream in(text);
    RunTrace back = vqls::read_trace_jsonl(in);
    REQUIRE(back.records.size() == 2);
    CHECK(back.records[1].cost == 0.25);
    CHECK(back.records[1].layers == 2);
    CHECK(back.records[1].params == 4);
    CHECK(back.final_cost == 0.25);
}

TEST_CASE("sampled mode reproduces deterministic endpoints exactly") {
    Eigen::VectorXcd b(2);
    b << Cd(1.0, 0.0), Cd(0.0, 0.0);
    SLEProblem p = identity_problem(1, b);
    EvalBackend backend;
    backend.mode = EvalMode::Shots;
    backend.shots = 2000;

    CostEvaluator eval(p, AnsatzSpec{1, 1}, backend);
    CHECK(eval.cost_global({0.0}) == 0.0);  // trial state equals b
    CHECK(eval.cost_global({M_PI}) == 1.0); // trial state orthogonal to b
}

TEST_CASE("sampled mode tracks the exact cost within propagated three sigma") {
    SLEProblem p = vqls::generate_pauli_sle(2, 3.0, 90, 3);
    AnsatzSpec spec{2, 2};
    std::mt19937_64 rng(91);
    std::vector<double> params = random_angles(spec.param_count(), rng);

    CostEvaluator exact(p, spec, EvalBackend{});
    const double reference = exact.cost_global(params);

    const long shots = 20000;
    const double sigma = oracle::sampled_cost_sigma(p.decomposition, p.b,
                                                    ansatz_state_dense(spec, params), shots,
                                                    /*statically_real=*/true);
    REQUIRE(sigma > 0.0);

    int within = 0;
    const int trials = 12;
    for (int trial = 0; trial < trials; ++trial) {
        EvalBackend backend;
        backend.mode = EvalMode::Shots;
        backend.shots = shots;
        backend.rng_seed = static_cast<std::uint64_t>(trial);
        CostEvaluator sampled(p, spec, backend);
        const double estimate = sampled.cost_global(params);
        CHECK(estimate >= 0.0);
        CHECK(estimate <= 1.0);
        if (std::abs(estimate - reference) <= 3.0 * sigma + 1e-9) {
            ++within;
        }
    }
    CHECK(within >= trials - 1);
}

TEST_CASE("sampled mode is deterministic per backend seed") {
    SLEProblem p = vqls::generate_pauli_sle(2, 4.0, 14, 3);
    AnsatzSpec spec{2, 1};
    std::mt19937_64 rng(15);
    std::vector<double> params = random_angles(spec.param_count(), rng);

    EvalBackend backend;
    backend.mode = EvalMode::Shots;
    backend.shots = 500;
    backend.rng_seed = 4242;
    CostEvaluator one(p, spec, backend);
    CostEvaluator two(p, spec, backend);
    CHECK(one.cost_global(params) == two.cost_global(params));

    backend.rng_seed = 4243;
    CostEvaluator three(p, spec, backend);
    CHECK(one.cost_global(params) != three.cost_global(params));
}

TEST_CASE("stronger gate noise degrades the sampled cost more") {
    SLEProblem p = vqls::generate_pauli_sle(2, 3.0, 7, 3);
    OptimizerConfig config;
    config.mode = OptimizerMode::ASA;
    config.layer_cap = 2;
    config.d_t = 0.02;
    config.max_iterations = 4000;
    config.seed = 5;
    RunTrace trained = vqls::run_asa(p, config, EvalBackend{});
    REQUIRE(trained.converged);

    auto mean_cost = [&](double scale) {
        vqls::NoiseModel model;
        model.p1 = 5e-4 * scale;
        model.p2 = 5e-3 * scale;
        model.p_decay = 1e-4 * scale;
        model.p_readout = 1e-3 * scale;
        double total = 0.0;
        const int seeds = 20;
        for (int s = 0; s < seeds; ++s) {
            EvalBackend backend;
            backend.mode = EvalMode::Shots;
            backend.shots = 4000;
            backend.noise = model;
            backend.rng_seed = static_cast<std::uint64_t>(1000 + s);
            CostEvaluator eval(p, trained.final_ansatz, backend);
            total += eval.cost_global(trained.final_params);
        }
        return total / seeds;
    };

    const double weak = mean_cost(1.0);
    const double strong = mean_cost(10.0);
    CHECK(strong > weak);
    CHECK(weak >= trained.final_cost - 0.05);
}

TEST_CASE("input validation") {
    SLEProblem p = vqls::generate_sle(2, 2.0, 0.0, 1);
    CHECK_THROWS_AS(CostEvaluator(p, AnsatzSpec{3, 1}, EvalBackend{}), std::invalid_argument);

    CostEvaluator eval(p, AnsatzSpec{2, 1}, EvalBackend{});
    CHECK_THROWS_AS(eval.cost_global({0.1}), std::invalid_argument);
    CHECK_THROWS_AS(eval.gradient({0.1}), std::invalid_argument);

    OptimizerConfig config;
    config.mode = OptimizerMode::ADA;
    CHECK_THROWS_AS(vqls::run_asa(p, config, EvalBackend{}), std::invalid_argument);
    config.mode = OptimizerMode::ASA;
    config.d_t = 1.5;
    CHECK_THROWS_AS(vqls::run_asa(p, config, EvalBackend{}), std::invalid_argument);
    config.d_t = 0.1;
    config.step_size = -1.0;
    CHECK_THROWS_AS(vqls::run_asa(p, config, EvalBackend{}), std::invalid_argument);

    SLEProblem empty = p;
    empty.decomposition.terms.clear();
    CHECK_THROWS_AS(CostEvaluator(empty, AnsatzSpec{2, 1}, EvalBackend{}), std::invalid_argument);
}
