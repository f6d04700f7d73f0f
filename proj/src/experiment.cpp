#include "vqls/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "vqls/ansatz.hpp"
#include "vqls/noise.hpp"
#include "vqls/problems.hpp"

namespace vqls {

namespace fs = std::filesystem;
using ordered = nlohmann::ordered_json;

namespace {

constexpr int kNoiseFamilyTerms = 4;   // short expansions keep circuit counts low
constexpr double kSparseFamilyKappa = 1.25; // middle of the 1..1.5 band
constexpr double kRandomKappaLo = 1.0;
constexpr double kRandomKappaHi = 20.0;

std::string format_g(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.10g", value);
    return buffer;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << bytes;
    if (!out) {
        throw std::runtime_error("short write to " + path.string());
    }
}

std::string mode_name(OptimizerMode mode) { return mode == OptimizerMode::ADA ? "ada" : "asa"; }

ordered backend_echo(const EvalBackend& backend) {
    ordered j;
    j["mode"] = backend.mode == EvalMode::Exact ? "exact" : "shots";
    j["shots"] = backend.shots;
    j["rng_seed"] = backend.rng_seed;
    j["noise"] = backend.noise ? ordered(noise_model_to_json(*backend.noise)) : ordered(nullptr);
    return j;
}

ordered config_echo(const OptimizerConfig& config, const EvalBackend& backend) {
    ordered j;
    j["mode"] = mode_name(config.mode);
    j["step_size"] = config.step_size;
    j["d_t"] = config.d_t;
    j["max_iterations"] = config.max_iterations;
    j["sp"] = config.sp;
    j["layer_cap"] = config.layer_cap;
    j["seed"] = config.seed;
    j["backend"] = backend_echo(backend);
    return j;
}

std::string curve_csv(const RunTrace& trace) {
    std::string out = "t,cost\n";
    char buffer[64];
    for (const IterationRecord& r : trace.records) {
        std::snprintf(buffer, sizeof(buffer), "%ld,%.17g\n", r.t, r.cost);
        out += buffer;
    }
    return out;
}

// One grid point: a (group, replicate) cell of the batch.
struct GridPoint {
    std::string group_key;
    int group_index = 0;
    int replicate = 0;
};

struct ModeOutcome {
    bool ok = false;
    bool resumed = false;
    std::string error;
    RunMetrics metrics;
    double final_cost = 1.0;
    std::string trace_hash;
};

struct JobOutcome {
    bool problem_ok = false;
    std::string error;
    std::string problem_hash;
    std::vector<std::pair<OptimizerMode, ModeOutcome>> modes;
};

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a + 0x9e3779b97f4a7c15ULL + (b << 6) + (b >> 2);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    return x;
}

double seeded_kappa(std::uint64_t seed) {
    std::mt19937_64 rng(mix_seed(seed, 0x6b61707061ULL));
    return std::uniform_real_distribution<double>(kRandomKappaLo, kRandomKappaHi)(rng);
}

class BatchRunner {
public:
    explicit BatchRunner(const ExperimentSpec& spec) : spec_(spec) { validate(); }

    ExperimentResult run() {
        prepare_directories();
        expand_grid();
        outcomes_.assign(points_.size(), JobOutcome{});

        const std::size_t width = std::min<std::size_t>(
            std::max(1, spec_.workers), std::max<std::size_t>(points_.size(), 1));
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next.fetch_add(1); i < points_.size(); i = next.fetch_add(1)) {
                outcomes_[i] = run_point(points_[i]);
            }
        };
        if (width <= 1) {
            worker();
        } else {
            std::vector<std::thread> threads;
            for (std::size_t w = 0; w < width; ++w) {
                threads.emplace_back(worker);
            }
            for (std::thread& t : threads) {
                t.join();
            }
        }
        return aggregate();
    }

private:
    void validate() const {
        if (spec_.out_dir.empty()) {
            throw std::invalid_argument("an output directory is required");
        }
        if (spec_.replicates < 1) {
            throw std::invalid_argument("replicates must be at least 1");
        }
        if (spec_.workers < 1) {
            throw std::invalid_argument("worker count must be at least 1");
        }
        if (!(spec_.d_t > 0.0) || !(spec_.d_t < 1.0)) {
            throw std::invalid_argument("convergence threshold must lie in (0, 1)");
        }
        if (spec_.backend.mode == EvalMode::Shots && spec_.backend.shots < 1) {
            throw std::invalid_argument("sampled mode needs a positive shot count");
        }
        switch (spec_.family) {
        case ExperimentFamily::QUBIT_SWEEP:
            if (spec_.qubit_grid.empty()) {
                throw std::invalid_argument("qubit sweep needs a non-empty qubit grid");
            }
            break;
        case ExperimentFamily::KAPPA_SWEEP:
        case ExperimentFamily::NOISE_COMPARE:
            if (spec_.kappa_grid.empty()) {
                throw std::invalid_argument("conditioning sweep needs a non-empty kappa grid");
            }
            break;
        case ExperimentFamily::SPARSITY_SWEEP:
            if (spec_.sparsity_grid.empty()) {
                throw std::invalid_argument("sparsity sweep needs a non-empty sparsity grid");
            }
            break;
        case ExperimentFamily::SP_SWEEP:
            if (spec_.sp_grid.empty()) {
                throw std::invalid_argument("switching sweep needs a non-empty sp grid");
            }
            break;
        case ExperimentFamily::SINGLE:
            break;
        }
    }

    void prepare_directories() {
        out_ = fs::path(spec_.out_dir);
        std::error_code ec;
        fs::create_directories(out_ / "runs", ec);
        if (ec) {
            throw std::runtime_error("cannot create output directory " + out_.string() + ": " +
                                     ec.message());
        }
        const fs::path probe = out_ / ".write_probe";
        write_file(probe, "ok");
        fs::remove(probe, ec);
    }

    void expand_grid() {
        const int reps = spec_.family == ExperimentFamily::SINGLE ? 1 : spec_.replicates;
        auto add_groups = [&](std::size_t count, auto key_of) {
            for (std::size_t g = 0; g < count; ++g) {
                for (int r = 0; r < reps; ++r) {
                    points_.push_back({key_of(g), static_cast<int>(g), r});
                }
            }
        };
        switch (spec_.family) {
        case ExperimentFamily::QUBIT_SWEEP:
            add_groups(spec_.qubit_grid.size(),
                       [&](std::size_t g) { return "n=" + std::to_string(spec_.qubit_grid[g]); });
            break;
        case ExperimentFamily::KAPPA_SWEEP:
        case ExperimentFamily::NOISE_COMPARE:
            add_groups(spec_.kappa_grid.size(),
                       [&](std::size_t g) { return "kappa=" + format_g(spec_.kappa_grid[g]); });
            break;
        case ExperimentFamily::SPARSITY_SWEEP:
            add_groups(spec_.sparsity_grid.size(),
                       [&](std::size_t g) { return "s=" + format_g(spec_.sparsity_grid[g]); });
            break;
        case ExperimentFamily::SP_SWEEP:
            add_groups(spec_.sp_grid.size(),
                       [&](std::size_t g) { return "sp=" + format_g(spec_.sp_grid[g]); });
            break;
        case ExperimentFamily::SINGLE:
            add_groups(1, [](std::size_t) { return std::string("single"); });
            break;
        }
    }

    std::uint64_t problem_seed(const GridPoint& p) const {
        // Switching-threshold cells share problems across the grid so that
        // every sp value sees the same systems.
        if (spec_.family == ExperimentFamily::SP_SWEEP ||
            spec_.family == ExperimentFamily::SINGLE) {
            return spec_.base_seed + static_cast<std::uint64_t>(p.replicate);
        }
        return spec_.base_seed + 1000003ULL * static_cast<std::uint64_t>(p.group_index + 1) +
               static_cast<std::uint64_t>(p.replicate);
    }

    SLEProblem make_problem(const GridPoint& p, std::uint64_t seed) const {
        switch (spec_.family) {
        case ExperimentFamily::QUBIT_SWEEP:
            return generate_sle(spec_.qubit_grid[static_cast<std::size_t>(p.group_index)],
                                seeded_kappa(seed), 0.0, seed);
        case ExperimentFamily::KAPPA_SWEEP:
            return generate_sle(spec_.n_qubits,
                                spec_.kappa_grid[static_cast<std::size_t>(p.group_index)], 0.0,
                                seed);
        case ExperimentFamily::SPARSITY_SWEEP:
            return generate_sle(spec_.n_qubits, spec_.kappa,
                                spec_.sparsity_grid[static_cast<std::size_t>(p.group_index)],
                                seed);
        case ExperimentFamily::NOISE_COMPARE:
            return generate_pauli_sle(spec_.n_qubits,
                                      spec_.kappa_grid[static_cast<std::size_t>(p.group_index)],
                                      seed, kNoiseFamilyTerms);
        case ExperimentFamily::SP_SWEEP:
            return generate_sle(spec_.n_qubits, seeded_kappa(seed), 0.0, seed);
        case ExperimentFamily::SINGLE:
            if (spec_.problem_file) {
                return problem_from_json(nlohmann::json::parse(read_file(*spec_.problem_file)));
            }
            return generate_sle(spec_.n_qubits, spec_.kappa, spec_.sparsity, seed);
        }
        throw std::logic_error("unreachable family");
    }

    OptimizerConfig make_config(const GridPoint& p, OptimizerMode mode, int n_qubits,
                                std::uint64_t seed) const {
        OptimizerConfig config;
        config.mode = mode;
        config.step_size = spec_.step_size;
        config.d_t = spec_.d_t;
        config.max_iterations = spec_.max_iterations;
        config.layer_cap = spec_.layer_cap > 0 ? spec_.layer_cap : d_min(n_qubits);
        config.seed = seed;
        if (mode == OptimizerMode::ADA) {
            if (spec_.family == ExperimentFamily::SP_SWEEP) {
                config.sp = spec_.sp_grid[static_cast<std::size_t>(p.group_index)];
            } else if (spec_.sp >= 0.0) {
                config.sp = spec_.sp;
            } else {
                config.sp = choose_sp(spec_.d_t, static_cast<double>(spec_.max_iterations));
            }
        }
        return config;
    }

    std::vector<OptimizerMode> modes_to_run() const {
        if (spec_.family == ExperimentFamily::SINGLE && spec_.single_mode) {
            return {*spec_.single_mode};
        }
        return {OptimizerMode::ADA, OptimizerMode::ASA};
    }

    fs::path point_dir(const GridPoint& p) const {
        return out_ / "runs" / p.group_key / ("rep" + std::to_string(p.replicate));
    }

    JobOutcome run_point(const GridPoint& p) const {
        JobOutcome outcome;
        const fs::path dir = point_dir(p);
        try {
            std::error_code ec;
            fs::create_directories(dir, ec);
            if (ec) {
                throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
            }
            const std::uint64_t seed = problem_seed(p);
            const SLEProblem problem = make_problem(p, seed);
            const std::string problem_bytes = problem_to_json(problem).dump(2) + "\n";
            outcome.problem_hash = content_hash(problem_bytes);

            const fs::path problem_path = dir / "problem.json";
            if (!fs::exists(problem_path) || read_file(problem_path) != problem_bytes) {
                write_file(problem_path, problem_bytes);
            }
            outcome.problem_ok = true;

            for (OptimizerMode mode : modes_to_run()) {
                outcome.modes.emplace_back(mode, run_mode(p, problem, mode, seed, dir,
                                                          outcome.problem_hash));
            }
        } catch (const std::exception& e) {
            outcome.error = e.what();
        }
        return outcome;
    }

    ModeOutcome run_mode(const GridPoint& p, const SLEProblem& problem, OptimizerMode mode,
                         std::uint64_t seed, const fs::path& dir,
                         const std::string& problem_hash) const {
        ModeOutcome result;
        const std::string name = mode_name(mode);
        const fs::path trace_path = dir / (name + ".trace.jsonl");
        const fs::path meta_path = dir / (name + ".run.json");
        const fs::path curve_path = dir / (name + ".curve.csv");

        EvalBackend backend = spec_.backend;
        backend.rng_seed = mix_seed(spec_.backend.rng_seed,
                                    mix_seed(seed, mode == OptimizerMode::ADA ? 1 : 2));
        const OptimizerConfig config = make_config(p, mode, problem.n_qubits, seed);
        const ordered echo = config_echo(config, backend);

        try {
            if (fs::exists(meta_path) && fs::exists(trace_path)) {
                const ordered meta = ordered::parse(read_file(meta_path));
                if (meta.value("problem_hash", "") == problem_hash &&
                    meta.contains("config") && ordered(meta.at("config")) == echo &&
                    meta.value("trace_hash", "") == content_hash(read_file(trace_path))) {
                    result.ok = true;
                    result.resumed = true;
                    result.trace_hash = meta.at("trace_hash").get<std::string>();
                    result.final_cost = meta.at("final_cost").get<double>();
                    result.metrics.trc = meta.at("trc").get<long>();
                    result.metrics.final_layers = meta.at("final_layers").get<int>();
                    result.metrics.total_iterations = meta.at("iterations").get<long>();
                    result.metrics.converged = meta.at("converged").get<bool>();
                    result.metrics.eqd_proxy = meta.at("eqd_proxy").get<long>();
                    return result;
                }
            }

            const RunTrace trace = mode == OptimizerMode::ADA ? run_ada(problem, config, backend)
                                                              : run_asa(problem, config, backend);
            std::ostringstream serialized;
            write_trace_jsonl(trace, serialized);
            const std::string trace_bytes = serialized.str();
            write_file(trace_path, trace_bytes);
            write_file(curve_path, curve_csv(trace));

            result.metrics = run_metrics(trace);
            result.final_cost = trace.final_cost;
            result.trace_hash = content_hash(trace_bytes);

            ordered meta;
            meta["mode"] = name;
            meta["group"] = p.group_key;
            meta["replicate"] = p.replicate;
            meta["config"] = echo;
            meta["converged"] = result.metrics.converged;
            meta["final_cost"] = result.final_cost;
            meta["iterations"] = result.metrics.total_iterations;
            meta["final_layers"] = result.metrics.final_layers;
            meta["trc"] = result.metrics.trc;
            meta["eqd_proxy"] = result.metrics.eqd_proxy;
            meta["total_evals"] = trace.total_evals;
            meta["problem_hash"] = problem_hash;
            meta["trace_hash"] = result.trace_hash;
            write_file(meta_path, meta.dump(2) + "\n");
            result.ok = true;
        } catch (const std::exception& e) {
            result.error = e.what();
        }
        return result;
    }

    ExperimentResult aggregate() const {
        ExperimentResult out;
        std::vector<PairedRunMetrics> pairs;
        ordered runs = ordered::array();

        for (std::size_t i = 0; i < points_.size(); ++i) {
            const GridPoint& p = points_[i];
            const JobOutcome& job = outcomes_[i];

            ordered entry;
            entry["group"] = p.group_key;
            entry["replicate"] = p.replicate;
            entry["dir"] = "runs/" + p.group_key + "/rep" + std::to_string(p.replicate);
            if (!job.problem_ok) {
                entry["status"] = "failed";
                entry["error"] = job.error;
                ++out.n_failed;
                runs.push_back(std::move(entry));
                continue;
            }
            entry["status"] = "ok";
            entry["problem_hash"] = job.problem_hash;

            ordered modes;
            bool all_ok = true;
            std::optional<RunMetrics> ada, asa;
            for (const auto& [mode, mo] : job.modes) {
                ordered m;
                if (mo.ok) {
                    m["status"] = "ok";
                    m["resumed"] = mo.resumed;
                    m["converged"] = mo.metrics.converged;
                    m["final_cost"] = mo.final_cost;
                    m["trc"] = mo.metrics.trc;
                    m["trace_hash"] = mo.trace_hash;
                    ++out.n_runs;
                    (mode == OptimizerMode::ADA ? ada : asa) = mo.metrics;
                } else {
                    m["status"] = "failed";
                    m["error"] = mo.error;
                    all_ok = false;
                    ++out.n_failed;
                }
                modes[mode_name(mode)] = std::move(m);
            }
            entry["modes"] = std::move(modes);
            runs.push_back(std::move(entry));

            if (all_ok && ada && asa) {
                pairs.push_back({p.group_key, *ada, *asa});
            } else if (all_ok && (ada || asa)) {
                singles_.push_back({p.group_key, ada ? *ada : *asa,
                                    ada ? OptimizerMode::ADA : OptimizerMode::ASA});
            }
        }

        const std::string summary = render_summary(pairs);
        const fs::path summary_path = out_ / "summary.csv";
        write_file(summary_path, summary);
        if (!pairs.empty()) {
            out.summary = summarize_batch(pairs);
        }

        ordered manifest;
        manifest["family"] = family_name(spec_.family);
        manifest["base_seed"] = spec_.base_seed;
        manifest["replicates"] = spec_.family == ExperimentFamily::SINGLE ? 1 : spec_.replicates;
        manifest["optimizer"] = spec_echo();
        manifest["backend"] = backend_echo(spec_.backend);
        manifest["runs"] = std::move(runs);
        manifest["n_runs"] = out.n_runs;
        manifest["n_failed"] = out.n_failed;
        const fs::path manifest_path = out_ / "manifest.json";
        write_file(manifest_path, manifest.dump(2) + "\n");

        out.summary_path = summary_path.string();
        out.manifest_path = manifest_path.string();
        return out;
    }

    ordered spec_echo() const {
        ordered j;
        j["d_t"] = spec_.d_t;
        j["step_size"] = spec_.step_size;
        j["max_iterations"] = spec_.max_iterations;
        j["layer_cap"] = spec_.layer_cap;
        j["sp"] = spec_.sp;
        return j;
    }

    struct SingleRun {
        std::string group_key;
        RunMetrics metrics;
        OptimizerMode mode;
    };

    std::string render_summary(const std::vector<PairedRunMetrics>& pairs) const {
        if (!pairs.empty()) {
            return summary_csv(summarize_batch(pairs));
        }
        // Header-only output, or one-sided rows for single-mode runs.
        std::string out = summary_csv({});
        for (const SingleRun& s : singles_) {
            const std::string trc = format_g(static_cast<double>(s.metrics.trc));
            const std::string layers = format_g(static_cast<double>(s.metrics.final_layers));
            const std::string iters = format_g(static_cast<double>(s.metrics.total_iterations));
            const bool ada = s.mode == OptimizerMode::ADA;
            out += s.group_key;
            out += ada ? ',' + trc + ",," + layers + ",," + iters + ",,"
                       : ",," + trc + ",," + layers + ",," + iters + ',';
            out += ',' + std::to_string(s.metrics.converged ? 1 : 0) + ",1\n";
        }
        return out;
    }

    const ExperimentSpec& spec_;
    fs::path out_;
    std::vector<GridPoint> points_;
    std::vector<JobOutcome> outcomes_;
    mutable std::vector<SingleRun> singles_;
};

} // namespace

std::string family_name(ExperimentFamily family) {
    switch (family) {
    case ExperimentFamily::QUBIT_SWEEP: return "QUBIT_SWEEP";
    case ExperimentFamily::KAPPA_SWEEP: return "KAPPA_SWEEP";
    case ExperimentFamily::SPARSITY_SWEEP: return "SPARSITY_SWEEP";
    case ExperimentFamily::NOISE_COMPARE: return "NOISE_COMPARE";
    case ExperimentFamily::SP_SWEEP: return "SP_SWEEP";
    case ExperimentFamily::SINGLE: return "SINGLE";
    }
    throw std::logic_error("unreachable family");
}

ExperimentFamily family_from_name(const std::string& name) {
    std::string lowered;
    for (char c : name) {
        lowered += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (lowered == "qubit" || lowered == "qubit_sweep") return ExperimentFamily::QUBIT_SWEEP;
    if (lowered == "kappa" || lowered == "kappa_sweep") return ExperimentFamily::KAPPA_SWEEP;
    if (lowered == "sparsity" || lowered == "sparsity_sweep") {
        return ExperimentFamily::SPARSITY_SWEEP;
    }
    if (lowered == "noise" || lowered == "noise_compare") return ExperimentFamily::NOISE_COMPARE;
    if (lowered == "sp" || lowered == "sp_sweep") return ExperimentFamily::SP_SWEEP;
    if (lowered == "single") return ExperimentFamily::SINGLE;
    throw std::invalid_argument("unknown experiment family: " + name);
}

ExperimentSpec ExperimentSpec::defaults(ExperimentFamily family) {
    ExperimentSpec spec;
    spec.family = family;
    switch (family) {
    case ExperimentFamily::QUBIT_SWEEP:
        spec.qubit_grid = {4, 5, 6};
        break;
    case ExperimentFamily::KAPPA_SWEEP:
        spec.n_qubits = 5;
        spec.kappa_grid = {1.0, 3.684, 7.899, 13.572, 20.651};
        spec.layer_cap = 6;
        break;
    case ExperimentFamily::SPARSITY_SWEEP:
        spec.n_qubits = 4;
        spec.kappa = kSparseFamilyKappa;
        spec.sparsity_grid = {0.9375, 0.875, 0.8125, 0.75};
        spec.layer_cap = 4;
        break;
    case ExperimentFamily::NOISE_COMPARE:
        spec.n_qubits = 4;
        spec.kappa_grid = {1.0, 3.684, 7.8995, 20.6519};
        spec.layer_cap = 4;
        spec.backend.mode = EvalMode::Shots;
        spec.backend.shots = 10000;
        spec.backend.noise = NoiseModel::default_profile();
        break;
    case ExperimentFamily::SP_SWEEP:
        spec.n_qubits = 4;
        spec.sp_grid = {1e-1, 1e-2, 1e-3, 1e-5};
        spec.layer_cap = 4;
        break;
    case ExperimentFamily::SINGLE:
        break;
    }
    return spec;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    BatchRunner runner(spec);
    return runner.run();
}

ExperimentResult emit_report(const std::string& out_dir) {
    const fs::path out(out_dir);
    const fs::path manifest_path = out / "manifest.json";
    if (!fs::exists(manifest_path)) {
        throw std::runtime_error("no manifest found under " + out_dir);
    }
    ordered manifest = ordered::parse(read_file(manifest_path));

    ExperimentResult result;
    std::vector<PairedRunMetrics> pairs;
    std::string singles_csv;

    for (const auto& entry : manifest.at("runs")) {
        if (entry.at("status").get<std::string>() != "ok") {
            ++result.n_failed;
            continue;
        }
        const std::string group = entry.at("group").get<std::string>();
        const fs::path dir = out / entry.at("dir").get<std::string>();
        std::optional<RunMetrics> ada, asa;
        bool all_ok = true;
        for (const auto& [name, mode_entry] : entry.at("modes").items()) {
            if (mode_entry.at("status").get<std::string>() != "ok") {
                all_ok = false;
                ++result.n_failed;
                continue;
            }
            const ordered meta = ordered::parse(read_file(dir / (name + ".run.json")));
            RunMetrics m;
            m.trc = meta.at("trc").get<long>();
            m.final_layers = meta.at("final_layers").get<int>();
            m.total_iterations = meta.at("iterations").get<long>();
            m.converged = meta.at("converged").get<bool>();
            m.eqd_proxy = meta.at("eqd_proxy").get<long>();
            ++result.n_runs;
            (name == "ada" ? ada : asa) = m;
        }
        if (all_ok && ada && asa) {
            pairs.push_back({group, *ada, *asa});
        } else if (all_ok && (ada || asa)) {
            const RunMetrics& m = ada ? *ada : *asa;
            const std::string trc = format_g(static_cast<double>(m.trc));
            const std::string layers = format_g(static_cast<double>(m.final_layers));
            const std::string iters = format_g(static_cast<double>(m.total_iterations));
            singles_csv += group;
            singles_csv += ada ? ',' + trc + ",," + layers + ",," + iters + ",,"
                               : ",," + trc + ",," + layers + ",," + iters + ',';
            singles_csv += ',' + std::to_string(m.converged ? 1 : 0) + ",1\n";
        }
    }

    std::string summary;
    if (!pairs.empty()) {
        result.summary = summarize_batch(pairs);
        summary = summary_csv(result.summary);
    } else {
        summary = summary_csv({}) + singles_csv;
    }
    const fs::path summary_path = out / "summary.csv";
    write_file(summary_path, summary);

    manifest["n_runs"] = result.n_runs;
    manifest["n_failed"] = result.n_failed;
    write_file(manifest_path, manifest.dump(2) + "\n");

    result.summary_path = summary_path.string();
    result.manifest_path = manifest_path.string();
    return result;
}

std::string content_hash(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buffer[17];
    std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(h));
    return buffer;
}

} // namespace vqls
