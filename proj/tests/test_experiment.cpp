#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vqls/experiment.hpp"
#include "vqls/problems.hpp"

namespace fs = std::filesystem;
using vqls::ExperimentFamily;
using vqls::ExperimentResult;
using vqls::ExperimentSpec;

namespace {

// Fresh scratch directory per use; removed on destruction.
struct TempDir {
    fs::path path;
    TempDir() {
        static std::atomic<int> counter{0};
        path = fs::temp_directory_path() /
               ("vqls_exp_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter.fetch_add(1)));
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(bool(in));
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string item;
    std::stringstream ss(line);
    while (std::getline(ss, item, ',')) fields.push_back(item);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) lines.push_back(line);
    return lines;
}

ExperimentSpec tiny_single(const std::string& out_dir) {
    ExperimentSpec spec = ExperimentSpec::defaults(ExperimentFamily::SINGLE);
    spec.n_qubits = 2;
    spec.kappa = 1.0; // identity system: converges fast
    spec.layer_cap = 4;
    spec.max_iterations = 800;
    spec.base_seed = 5;
    spec.out_dir = out_dir;
    return spec;
}

ExperimentSpec tiny_sp_sweep(const std::string& out_dir) {
    ExperimentSpec spec = ExperimentSpec::defaults(ExperimentFamily::SP_SWEEP);
    spec.n_qubits = 2;
    spec.sp_grid = {0.1, 0.001};
    spec.replicates = 2;
    spec.layer_cap = 3;
    spec.max_iterations = 800;
    spec.base_seed = 7;
    spec.out_dir = out_dir;
    return spec;
}

} // namespace

TEST_CASE("single-problem batch writes paired artifacts and a summary row") {
    TempDir dir;
    const ExperimentResult result = vqls::run_experiment(tiny_single(dir.str()));

    CHECK(result.n_runs == 2);
    CHECK(result.n_failed == 0);
    REQUIRE(result.summary.size() == 1);
    CHECK(result.summary[0].group_key == "single");
    CHECK(result.summary[0].n_total == 1);
    CHECK(result.summary[0].n_converged == 1); // identity system converges
    CHECK(result.summary[0].mean_trc_ada > 0.0);
    CHECK(result.summary[0].mean_trc_asa > 0.0);

    const fs::path rep = dir.path / "runs" / "single" / "rep0";
    for (const char* name : {"problem.json", "ada.trace.jsonl", "asa.trace.jsonl",
                             "ada.curve.csv", "asa.curve.csv", "ada.run.json", "asa.run.json"}) {
        CHECK_MESSAGE(fs::exists(rep / name), name);
    }
    CHECK(fs::exists(dir.path / "summary.csv"));
    CHECK(fs::exists(dir.path / "manifest.json"));

    // curve rows mirror the trace, one per iteration
    const auto curve = lines_of(slurp(rep / "ada.curve.csv"));
    const auto trace = lines_of(slurp(rep / "ada.trace.jsonl"));
    REQUIRE(curve.size() >= 2);
    CHECK(curve[0] == "t,cost");
    CHECK(curve.size() == trace.size() + 1);

    // the recorded trace hash matches the file content
    const auto meta = nlohmann::json::parse(slurp(rep / "ada.run.json"));
    CHECK(meta.at("trace_hash").get<std::string>() ==
          vqls::content_hash(slurp(rep / "ada.trace.jsonl")));
    CHECK(meta.at("problem_hash").get<std::string>() ==
          vqls::content_hash(slurp(rep / "problem.json")));
}

TEST_CASE("single-mode run renders a one-sided summary row") {
    TempDir dir;
    ExperimentSpec spec = tiny_single(dir.str());
    spec.single_mode = vqls::OptimizerMode::ASA;
    const ExperimentResult result = vqls::run_experiment(spec);

    CHECK(result.n_runs == 1);
    CHECK(result.summary.empty()); // no pairs to aggregate
    const auto lines = lines_of(slurp(dir.path / "summary.csv"));
    REQUIRE(lines.size() == 2);
    const auto fields = split_csv_line(lines[1]);
    REQUIRE(fields.size() == 10);
    CHECK(fields[0] == "single");
    CHECK(fields[1].empty());  // no dynamic-mode column
    CHECK(!fields[2].empty()); // static depth sum present
    CHECK(fields[3].empty());
    CHECK(!fields[4].empty());
    CHECK(fields[7].empty()); // no win percentage without pairs
    CHECK(fields[8] == "1");
    CHECK(fields[9] == "1");
    CHECK(!fs::exists(dir.path / "runs" / "single" / "rep0" / "ada.trace.jsonl"));
}

TEST_CASE("switching-threshold sweep shares problems across grid cells") {
    TempDir dir;
    const ExperimentResult result = vqls::run_experiment(tiny_sp_sweep(dir.str()));
    CHECK(result.n_failed == 0);
    CHECK(result.n_runs == 8); // 2 sp values x 2 replicates x 2 modes
    REQUIRE(result.summary.size() == 2);
    CHECK(result.summary[0].group_key == "sp=0.1"); // grid order preserved
    CHECK(result.summary[1].group_key == "sp=0.001");

    // same replicate, different sp cell -> byte-identical problem
    const std::string p0 = slurp(dir.path / "runs" / "sp=0.1" / "rep0" / "problem.json");
    const std::string p1 = slurp(dir.path / "runs" / "sp=0.001" / "rep0" / "problem.json");
    CHECK(p0 == p1);

    // the static side ignores sp entirely, so its runs agree across cells
    const std::string a0 = slurp(dir.path / "runs" / "sp=0.1" / "rep0" / "asa.trace.jsonl");
    const std::string a1 = slurp(dir.path / "runs" / "sp=0.001" / "rep0" / "asa.trace.jsonl");
    CHECK(a0 == a1);

    // different replicates get different problems
    const std::string q1 = slurp(dir.path / "runs" / "sp=0.1" / "rep1" / "problem.json");
    CHECK(p0 != q1);
}

TEST_CASE("identical specs reproduce byte-identical artifacts") {
    TempDir dir_a, dir_b;
    vqls::run_experiment(tiny_sp_sweep(dir_a.str()));
    vqls::run_experiment(tiny_sp_sweep(dir_b.str()));

    CHECK(slurp(dir_a.path / "summary.csv") == slurp(dir_b.path / "summary.csv"));
    CHECK(slurp(dir_a.path / "manifest.json") == slurp(dir_b.path / "manifest.json"));
    const fs::path rel = fs::path("runs") / "sp=0.001" / "rep1" / "ada.trace.jsonl";
    CHECK(slurp(dir_a.path / rel) == slurp(dir_b.path / rel));
}

TEST_CASE("a worker pool changes nothing about the results") {
    TempDir dir_a, dir_b;
    ExperimentSpec serial = tiny_sp_sweep(dir_a.str());
    ExperimentSpec pooled = tiny_sp_sweep(dir_b.str());
    pooled.workers = 3;
    vqls::run_experiment(serial);
    vqls::run_experiment(pooled);
    CHECK(slurp(dir_a.path / "summary.csv") == slurp(dir_b.path / "summary.csv"));
    CHECK(slurp(dir_a.path / "manifest.json") == slurp(dir_b.path / "manifest.json"));
}

TEST_CASE("a second invocation resumes from validated traces") {
    TempDir dir;
    const ExperimentSpec spec = tiny_single(dir.str());
    vqls::run_experiment(spec);
    const std::string summary_before = slurp(dir.path / "summary.csv");

    const ExperimentResult again = vqls::run_experiment(spec);
    CHECK(again.n_runs == 2);
    CHECK(slurp(dir.path / "summary.csv") == summary_before);
    const auto manifest = nlohmann::json::parse(slurp(dir.path / "manifest.json"));
    for (const auto& run : manifest.at("runs")) {
        for (const auto& [name, mode] : run.at("modes").items()) {
            CAPTURE(name);
            CHECK(mode.at("resumed").get<bool>());
        }
    }

    SUBCASE("a corrupted trace is re-run, not trusted") {
        const fs::path trace = dir.path / "runs" / "single" / "rep0" / "ada.trace.jsonl";
        std::ofstream(trace, std::ios::app) << "{\"junk\":1}\n";
        const ExperimentResult healed = vqls::run_experiment(spec);
        CHECK(healed.n_failed == 0);
        const auto m2 = nlohmann::json::parse(slurp(dir.path / "manifest.json"));
        CHECK_FALSE(m2.at("runs")[0].at("modes").at("ada").at("resumed").get<bool>());
        CHECK(m2.at("runs")[0].at("modes").at("asa").at("resumed").get<bool>());
        CHECK(slurp(dir.path / "summary.csv") == summary_before);
    }

    SUBCASE("a changed spec invalidates the resume") {
        ExperimentSpec changed = spec;
        changed.step_size = 0.04;
        vqls::run_experiment(changed);
        const auto m2 = nlohmann::json::parse(slurp(dir.path / "manifest.json"));
        CHECK_FALSE(m2.at("runs")[0].at("modes").at("ada").at("resumed").get<bool>());
    }
}

TEST_CASE("report rebuilds the summary from artifacts alone") {
    TempDir dir;
    vqls::run_experiment(tiny_sp_sweep(dir.str()));
    const std::string summary = slurp(dir.path / "summary.csv");
    fs::remove(dir.path / "summary.csv");

    const ExperimentResult rebuilt = vqls::emit_report(dir.str());
    CHECK(rebuilt.n_runs == 8);
    CHECK(rebuilt.n_failed == 0);
    CHECK(slurp(dir.path / "summary.csv") == summary);

    TempDir empty;
    fs::create_directories(empty.path);
    CHECK_THROWS_AS(vqls::emit_report(empty.str()), std::runtime_error);
}

TEST_CASE("a loaded problem file feeds the run") {
    TempDir dir;
    const vqls::SLEProblem problem = vqls::generate_sle(2, 1.0, 0.0, 11);
    fs::create_directories(dir.path);
    const fs::path file = dir.path / "instance.json";
    std::ofstream(file) << vqls::problem_to_json(problem).dump(2) << "\n";

    ExperimentSpec spec = tiny_single((dir.path / "out").string());
    spec.problem_file = file.string();
    const ExperimentResult result = vqls::run_experiment(spec);
    CHECK(result.n_failed == 0);
    CHECK(slurp(dir.path / "out" / "runs" / "single" / "rep0" / "problem.json") == slurp(file));
}

TEST_CASE("malformed specs are rejected up front") {
    ExperimentSpec no_out = ExperimentSpec::defaults(ExperimentFamily::SINGLE);
    CHECK_THROWS_AS(vqls::run_experiment(no_out), std::invalid_argument);

    TempDir dir;
    ExperimentSpec bad = tiny_sp_sweep(dir.str());
    bad.replicates = 0;
    CHECK_THROWS_AS(vqls::run_experiment(bad), std::invalid_argument);

    ExperimentSpec empty_grid = tiny_sp_sweep(dir.str());
    empty_grid.sp_grid.clear();
    CHECK_THROWS_AS(vqls::run_experiment(empty_grid), std::invalid_argument);

    ExperimentSpec bad_dt = tiny_single(dir.str());
    bad_dt.d_t = 0.0;
    CHECK_THROWS_AS(vqls::run_experiment(bad_dt), std::invalid_argument);

    ExperimentSpec bad_workers = tiny_single(dir.str());
    bad_workers.workers = 0;
    CHECK_THROWS_AS(vqls::run_experiment(bad_workers), std::invalid_argument);
}

TEST_CASE("family names round-trip and defaults carry the protocol grids") {
    for (ExperimentFamily f :
         {ExperimentFamily::QUBIT_SWEEP, ExperimentFamily::KAPPA_SWEEP,
          ExperimentFamily::SPARSITY_SWEEP, ExperimentFamily::NOISE_COMPARE,
          ExperimentFamily::SP_SWEEP, ExperimentFamily::SINGLE}) {
        CHECK(vqls::family_from_name(vqls::family_name(f)) == f);
    }
    CHECK(vqls::family_from_name("kappa") == ExperimentFamily::KAPPA_SWEEP);
    CHECK_THROWS_AS(vqls::family_from_name("bogus"), std::invalid_argument);

    const ExperimentSpec qubits = ExperimentSpec::defaults(ExperimentFamily::QUBIT_SWEEP);
    CHECK(qubits.qubit_grid == std::vector<int>{4, 5, 6});

    const ExperimentSpec kappa = ExperimentSpec::defaults(ExperimentFamily::KAPPA_SWEEP);
    CHECK(kappa.n_qubits == 5);
    CHECK(kappa.layer_cap == 6);
    CHECK(kappa.kappa_grid.size() == 5);
    CHECK(kappa.kappa_grid.front() == doctest::Approx(1.0));
    CHECK(kappa.kappa_grid.back() == doctest::Approx(20.651));

    const ExperimentSpec sparse = ExperimentSpec::defaults(ExperimentFamily::SPARSITY_SWEEP);
    CHECK(sparse.sparsity_grid == std::vector<double>{0.9375, 0.875, 0.8125, 0.75});

    const ExperimentSpec noisy = ExperimentSpec::defaults(ExperimentFamily::NOISE_COMPARE);
    CHECK(noisy.backend.mode == vqls::EvalMode::Shots);
    REQUIRE(bool(noisy.backend.noise));
    CHECK(noisy.kappa_grid.size() == 4);

    const ExperimentSpec sp = ExperimentSpec::defaults(ExperimentFamily::SP_SWEEP);
    CHECK(sp.sp_grid == std::vector<double>{1e-1, 1e-2, 1e-3, 1e-5});
}

TEST_CASE("content hash matches the 64-bit FNV-1a reference values") {
    CHECK(vqls::content_hash("") == "cbf29ce484222325");
    CHECK(vqls::content_hash("a") == "af63dc4c8601ec8c");
    CHECK(vqls::content_hash("foobar") == "85944171f73967e8");
    CHECK(vqls::content_hash("x") != vqls::content_hash("y"));
}
