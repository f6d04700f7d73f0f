#pragma once

#include <string>
#include <vector>

#include "vqls/engine.hpp"

namespace vqls {

/// Resource bookkeeping distilled from one optimization trace.
struct RunMetrics {
    long trc = 0;              // cumulative layer count over all iterations
    int final_layers = 0;
    long total_iterations = 0;
    bool converged = false;
    long eqd_proxy = 0;        // cumulative gate count over all iterations
};

/// Total resource cost: the sum of the per-iteration layer counts. For a
/// constant-depth trace this reduces to iterations x layers.
/// Throws std::invalid_argument on an empty trace.
long trc(const RunTrace& trace);

/// Relative deviation (trc_ada - trc_asa) / trc_ada. Negative values mean
/// the dynamic run consumed more resources than the static one.
/// Throws std::invalid_argument unless trc_ada > 0.
double artrc_deviation(double trc_ada, double trc_asa);

/// Cumulative gate count: for every iteration, the gate count of the ansatz
/// circuit at that iteration's depth (rotations plus entanglers), summed.
/// Throws std::invalid_argument on an empty trace.
long eqd_proxy(const RunTrace& trace);

/// All scalar metrics of one trace in one pass.
RunMetrics run_metrics(const RunTrace& trace);

/// One dynamic/static pair of runs sharing a problem and seed.
struct PairedRunMetrics {
    std::string group_key;
    RunMetrics ada;
    RunMetrics asa;
};

struct SummaryRow {
    std::string group_key;
    double mean_trc_ada = 0.0;
    double mean_trc_asa = 0.0;
    double mean_final_layers_ada = 0.0;
    double mean_final_layers_asa = 0.0;
    double mean_iters_ada = 0.0;
    double mean_iters_asa = 0.0;
    double pct_ada_wins = 0.0; // % of converged pairs with TRC_ADA < TRC_ASA
    long n_converged = 0;      // pairs where both runs converged
    long n_total = 0;
    bool all_unconverged = false; // no converged pair: mean fields are unset
};

/// Groups pairs by group_key (first-appearance order) and averages each
/// group's metrics over the pairs where both runs converged. A group with no
/// such pair yields a row flagged all_unconverged whose mean fields carry no
/// information. Throws std::invalid_argument on an empty input.
std::vector<SummaryRow> summarize_batch(const std::vector<PairedRunMetrics>& pairs);

/// Renders rows as CSV with a fixed header:
/// group_key, mean_trc_ada, mean_trc_asa, mean_final_layers_ada,
/// mean_final_layers_asa, mean_iters_ada, mean_iters_asa, pct_ada_wins,
/// n_converged, n_total. Flagged rows leave the mean fields empty.
std::string summary_csv(const std::vector<SummaryRow>& rows);

} // namespace vqls
