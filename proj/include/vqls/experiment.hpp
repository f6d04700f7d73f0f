#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vqls/engine.hpp"
#include "vqls/metrics.hpp"

namespace vqls {

enum class ExperimentFamily {
    QUBIT_SWEEP,    // register sizes 4..6, dense systems, random conditioning
    KAPPA_SWEEP,    // 5 qubits, 6 layers, fixed condition-number grid
    SPARSITY_SWEEP, // 4 qubits, 4 layers, sparsity grid at low conditioning
    NOISE_COMPARE,  // 4 qubits, short Pauli expansions, sampled + noisy
    SP_SWEEP,       // 4 qubits, switching-threshold grid on shared problems
    SINGLE          // one problem, one or both modes
};

std::string family_name(ExperimentFamily family);
ExperimentFamily family_from_name(const std::string& name);

/// A fully seeded batch description. Every grid point (group x replicate)
/// is reproducible from this struct alone.
struct ExperimentSpec {
    ExperimentFamily family = ExperimentFamily::SINGLE;

    std::vector<int> qubit_grid;      // QUBIT_SWEEP
    std::vector<double> kappa_grid;   // KAPPA_SWEEP / NOISE_COMPARE
    std::vector<double> sparsity_grid; // SPARSITY_SWEEP
    std::vector<double> sp_grid;      // SP_SWEEP

    int replicates = 5;
    std::uint64_t base_seed = 0;

    // Problem shape for SINGLE (and fallbacks for sweeps).
    int n_qubits = 4;
    double kappa = 1.0;
    double sparsity = 0.0;
    std::optional<std::string> problem_file; // SINGLE: load instead of generating

    // SINGLE runs one mode when set; sweeps always run the pair.
    std::optional<OptimizerMode> single_mode;

    int layer_cap = 0;      // 0 picks the family default (d_min-based)
    double d_t = 0.1;
    double step_size = 0.05;
    long max_iterations = 6400;
    double sp = -1.0;       // < 0 picks (1 - d_t) / max_iterations

    EvalBackend backend;
    int workers = 1;
    std::string out_dir;

    /// Family defaults mirroring the benchmark protocol grids.
    static ExperimentSpec defaults(ExperimentFamily family);
};

/// Outcome of one batch. Failed grid points are recorded, not fatal.
struct ExperimentResult {
    std::vector<SummaryRow> summary;
    long n_runs = 0;   // mode-runs executed or resumed
    long n_failed = 0; // grid points that threw
    std::string summary_path;
    std::string manifest_path;
};

/// Runs (or resumes) every grid point of the batch: generates or loads each
/// problem, runs paired dynamic/static optimizations with shared seeds,
/// writes per-run artifacts (problem.json, <mode>.trace.jsonl,
/// <mode>.curve.csv, <mode>.run.json), then the batch summary.csv and
/// manifest.json. A grid point whose trace files already exist and
/// hash-validate is loaded instead of re-run. Throws std::invalid_argument /
/// std::runtime_error on malformed specs or unusable output directories;
/// per-run failures are captured in the result and manifest instead.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Rebuilds summary.csv and the manifest's aggregate counts from the run
/// artifacts already present under out_dir (a completed or interrupted
/// batch). Throws std::runtime_error when no manifest is found.
ExperimentResult emit_report(const std::string& out_dir);

/// FNV-1a 64-bit content hash, as a fixed-width lowercase hex string.
std::string content_hash(const std::string& bytes);

} // namespace vqls
