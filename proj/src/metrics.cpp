#include "vqls/metrics.hpp"

#include <cstdio>
#include <map>
#include <stdexcept>

#include "vqls/ansatz.hpp"
#include "vqls/noise.hpp"

namespace vqls {

long trc(const RunTrace& trace) {
    if (trace.records.empty()) {
        throw std::invalid_argument("cannot compute resource cost of an empty trace");
    }
    long total = 0;
    for (const IterationRecord& r : trace.records) {
        total += r.layers;
    }
    return total;
}

double artrc_deviation(double trc_ada, double trc_asa) {
    if (!(trc_ada > 0.0)) {
        throw std::invalid_argument("relative deviation needs a positive reference cost");
    }
    return (trc_ada - trc_asa) / trc_ada;
}

long eqd_proxy(const RunTrace& trace) {
    if (trace.records.empty()) {
        throw std::invalid_argument("cannot compute gate totals of an empty trace");
    }
    std::map<int, long> per_depth; // layer count -> gates in one circuit
    long total = 0;
    for (const IterationRecord& r : trace.records) {
        auto it = per_depth.find(r.layers);
        if (it == per_depth.end()) {
            AnsatzSpec spec = trace.final_ansatz;
            spec.n_layers = r.layers;
            const std::vector<double> zeros(static_cast<std::size_t>(spec.param_count()), 0.0);
            const GateCount count = charge_gate_count(build_circuit(spec, zeros));
            it = per_depth.emplace(r.layers, count.n1 + count.n2).first;
        }
        total += it->second;
    }
    return total;
}

RunMetrics run_metrics(const RunTrace& trace) {
    RunMetrics m;
    m.trc = trc(trace);
    m.final_layers = trace.records.back().layers;
    m.total_iterations = static_cast<long>(trace.records.size());
    m.converged = trace.converged;
    m.eqd_proxy = eqd_proxy(trace);
    return m;
}

std::vector<SummaryRow> summarize_batch(const std::vector<PairedRunMetrics>& pairs) {
    if (pairs.empty()) {
        throw std::invalid_argument("cannot summarize an empty batch");
    }
    std::vector<SummaryRow> rows;
    std::map<std::string, std::size_t> index;
    for (const PairedRunMetrics& pair : pairs) {
        auto it = index.find(pair.group_key);
        if (it == index.end()) {
            it = index.emplace(pair.group_key, rows.size()).first;
            rows.push_back(SummaryRow{});
            rows.back().group_key = pair.group_key;
        }
        SummaryRow& row = rows[it->second];
        ++row.n_total;
        if (!(pair.ada.converged && pair.asa.converged)) {
            continue;
        }
        ++row.n_converged;
        row.mean_trc_ada += static_cast<double>(pair.ada.trc);
        row.mean_trc_asa += static_cast<double>(pair.asa.trc);
        row.mean_final_layers_ada += static_cast<double>(pair.ada.final_layers);
        row.mean_final_layers_asa += static_cast<double>(pair.asa.final_layers);
        row.mean_iters_ada += static_cast<double>(pair.ada.total_iterations);
        row.mean_iters_asa += static_cast<double>(pair.asa.total_iterations);
        if (pair.ada.trc < pair.asa.trc) {
            row.pct_ada_wins += 1.0;
        }
    }
    for (SummaryRow& row : rows) {
        if (row.n_converged == 0) {
            row.all_unconverged = true;
            continue;
        }
        const double k = static_cast<double>(row.n_converged);
        row.mean_trc_ada /= k;
        row.mean_trc_asa /= k;
        row.mean_final_layers_ada /= k;
        row.mean_final_layers_asa /= k;
        row.mean_iters_ada /= k;
        row.mean_iters_asa /= k;
        row.pct_ada_wins = 100.0 * row.pct_ada_wins / k;
    }
    return rows;
}

namespace {

std::string format_number(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.10g", value);
    return buffer;
}

} // namespace

std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::string out = "group_key,mean_trc_ada,mean_trc_asa,mean_final_layers_ada,"
                      "mean_final_layers_asa,mean_iters_ada,mean_iters_asa,"
                      "pct_ada_wins,n_converged,n_total\n";
    for (const SummaryRow& row : rows) {
        out += row.group_key;
        if (row.all_unconverged) {
            out += ",,,,,,,";
        } else {
            out += ',' + format_number(row.mean_trc_ada);
            out += ',' + format_number(row.mean_trc_asa);
            out += ',' + format_number(row.mean_final_layers_ada);
            out += ',' + format_number(row.mean_final_layers_asa);
            out += ',' + format_number(row.mean_iters_ada);
            out += ',' + format_number(row.mean_iters_asa);
            out += ',' + format_number(row.pct_ada_wins);
        }
        out += ',' + std::to_string(row.n_converged);
        out += ',' + std::to_string(row.n_total);
        out += '\n';
    }
    return out;
}

} // namespace vqls
