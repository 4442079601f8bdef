#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "delm/exploration.hpp"
#include "delm/simapp.hpp"
#include "delm/triage.hpp"

namespace delm {

enum class Format { Json, Csv, Tsv };

Format format_from_string(const std::string& name);  // throws UnsupportedFormat

struct CoverageSummary {
    double activity_coverage_pct = 0.0;
    double method_coverage_pct = 0.0;
    std::uint64_t visited_activity_count = 0;
    std::uint64_t declared_activity_count = 0;
    std::uint64_t covered_method_count = 0;
    std::uint64_t declared_method_count = 0;
    std::uint64_t unique_state_count = 0;
    std::uint64_t crash_tp = 0;
    std::uint64_t crash_fp = 0;
    // Activities visited at runtime but absent from the manifest. These
    // widen the declared denominator rather than inflating coverage.
    std::vector<std::string> undeclared_visited;
};

// Pure fold over a report and its triage verdicts. Verdicts must correspond
// to the report's deduped crash list.
CoverageSummary summarize(const SimApp& app, const ExplorationReport& report,
                          const std::vector<TriageVerdict>& verdicts);

std::string emit_summary(const CoverageSummary& summary, Format format);

struct BenchRow {
    std::string fixture;
    std::string policy;  // random | guided | wacm | wdld | wgea
    std::uint64_t seed = 0;
    CoverageSummary summary;
    std::uint64_t interventions = 0;
};

struct ComparisonTable {
    std::vector<BenchRow> rows;

    // Best-of-seeds aggregation per (fixture, policy); 0 when absent.
    double best_activity_coverage(const std::string& fixture, const std::string& policy) const;
    double best_method_coverage(const std::string& fixture, const std::string& policy) const;
};

// Runs random, guided, and each single-ablation guided configuration for
// every seed and summarizes each cell (crashes triaged at the default
// depth). Requires at least three seeds, matching the best-of-three
// measurement protocol.
ComparisonTable compare_policies(const SimApp& app, std::uint64_t event_budget,
                                 const std::vector<std::uint64_t>& seeds);

std::string emit_table(const ComparisonTable& table, Format format);

}  // namespace delm
