#include "delm/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "delm/errors.hpp"

namespace delm {

namespace {

using nlohmann::ordered_json;

std::string fixed2(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.2f", v);
    return buffer;
}

double percentage(std::uint64_t numerator, std::uint64_t denominator) {
    if (denominator == 0) return 100.0;
    return 100.0 * static_cast<double>(numerator) / static_cast<double>(denominator);
}

const char* kTableColumns[] = {"fixture",       "policy",         "seed",
                               "activity_cov_pct", "method_cov_pct", "unique_states",
                               "crashes_tp",    "crashes_fp",     "interventions"};

std::string join_row(const std::vector<std::string>& cells, char sep) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) out += sep;
        out += cells[i];
    }
    out += '\n';
    return out;
}

ExplorationConfig cell_config(const std::string& policy, std::uint64_t budget,
                              std::uint64_t seed) {
    ExplorationConfig cfg;
    cfg.event_budget = budget;
    cfg.seed = seed;
    cfg.policy = policy == "random" ? Policy::RandomOnly : Policy::Guided;
    cfg.ablations.wacm = policy == "wacm";
    cfg.ablations.wdld = policy == "wdld";
    cfg.ablations.wgea = policy == "wgea";
    return cfg;
}

}  // namespace

Format format_from_string(const std::string& name) {
    if (name == "json") return Format::Json;
    if (name == "csv") return Format::Csv;
    if (name == "tsv") return Format::Tsv;
    throw UnsupportedFormat(name);
}

CoverageSummary summarize(const SimApp& app, const ExplorationReport& report,
                          const std::vector<TriageVerdict>& verdicts) {
    CoverageSummary summary;

    std::set<std::string> declared;
    for (const auto& activity : app.manifest.activities) declared.insert(activity.name);
    for (const auto& visited : report.visited_activities) {
        if (declared.count(visited) == 0) {
            summary.undeclared_visited.push_back(visited);
            declared.insert(visited);
        }
    }
    summary.visited_activity_count = report.visited_activities.size();
    summary.declared_activity_count = declared.size();
    summary.activity_coverage_pct =
        percentage(summary.visited_activity_count, summary.declared_activity_count);

    const auto methods = app.declared_methods();
    summary.declared_method_count = methods.size();
    summary.covered_method_count = report.covered_methods.size();
    summary.method_coverage_pct =
        percentage(summary.covered_method_count, summary.declared_method_count);

    summary.unique_state_count = report.unique_states.size();
    for (const auto& verdict : verdicts) {
        if (verdict.classification == Classification::TruePositive) {
            ++summary.crash_tp;
        } else {
            ++summary.crash_fp;
        }
    }
    return summary;
}

std::string emit_summary(const CoverageSummary& summary, Format format) {
    if (format == Format::Json) {
        ordered_json j;
        j["activity_coverage_pct"] = summary.activity_coverage_pct;
        j["method_coverage_pct"] = summary.method_coverage_pct;
        j["visited_activities"] = summary.visited_activity_count;
        j["declared_activities"] = summary.declared_activity_count;
        j["covered_methods"] = summary.covered_method_count;
        j["declared_methods"] = summary.declared_method_count;
        j["unique_states"] = summary.unique_state_count;
        j["crashes_tp"] = summary.crash_tp;
        j["crashes_fp"] = summary.crash_fp;
        j["undeclared_visited"] = summary.undeclared_visited;
        return j.dump(2) + "\n";
    }
    const char sep = format == Format::Csv ? ',' : '\t';
    std::string out = join_row({"activity_cov_pct", "method_cov_pct", "unique_states",
                                "crashes_tp", "crashes_fp"},
                               sep);
    out += join_row({fixed2(summary.activity_coverage_pct), fixed2(summary.method_coverage_pct),
                     std::to_string(summary.unique_state_count), std::to_string(summary.crash_tp),
                     std::to_string(summary.crash_fp)},
                    sep);
    return out;
}

double ComparisonTable::best_activity_coverage(const std::string& fixture,
                                               const std::string& policy) const {
    double best = 0.0;
    for (const auto& row : rows) {
        if (row.fixture == fixture && row.policy == policy) {
            best = std::max(best, row.summary.activity_coverage_pct);
        }
    }
    return best;
}

double ComparisonTable::best_method_coverage(const std::string& fixture,
                                             const std::string& policy) const {
    double best = 0.0;
    for (const auto& row : rows) {
        if (row.fixture == fixture && row.policy == policy) {
            best = std::max(best, row.summary.method_coverage_pct);
        }
    }
    return best;
}

ComparisonTable compare_policies(const SimApp& app, std::uint64_t event_budget,
                                 const std::vector<std::uint64_t>& seeds) {
    if (seeds.size() < 3) {
        throw Error("compare_policies needs at least 3 seeds (best-of-three protocol)");
    }
    const LaunchPlan plan = prepare_launch_plan(app);
    static const char* kPolicies[] = {"random", "guided", "wacm", "wdld", "wgea"};

    ComparisonTable table;
    for (const char* policy : kPolicies) {
        for (std::uint64_t seed : seeds) {
            const ExplorationConfig cfg = cell_config(policy, event_budget, seed);
            const ExplorationReport report = explore(app, cfg, plan.launchers, plan.static_atg);

            std::vector<TriageVerdict> verdicts;
            for (const auto& crash : dedupe(report.crashes)) {
                verdicts.push_back(classify(app, crash, kDefaultTriageDepth));
            }

            BenchRow row;
            row.fixture = app.name;
            row.policy = policy;
            row.seed = seed;
            row.summary = summarize(app, report, verdicts);
            row.interventions = report.interventions.size();
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

std::string emit_table(const ComparisonTable& table, Format format) {
    if (format == Format::Json) {
        ordered_json rows = ordered_json::array();
        for (const auto& row : table.rows) {
            ordered_json r;
            r["fixture"] = row.fixture;
            r["policy"] = row.policy;
            r["seed"] = row.seed;
            r["activity_cov_pct"] = row.summary.activity_coverage_pct;
            r["method_cov_pct"] = row.summary.method_coverage_pct;
            r["unique_states"] = row.summary.unique_state_count;
            r["crashes_tp"] = row.summary.crash_tp;
            r["crashes_fp"] = row.summary.crash_fp;
            r["interventions"] = row.interventions;
            rows.push_back(std::move(r));
        }
        return rows.dump(2) + "\n";
    }
    const char sep = format == Format::Csv ? ',' : '\t';
    std::string out =
        join_row(std::vector<std::string>(std::begin(kTableColumns), std::end(kTableColumns)), sep);
    for (const auto& row : table.rows) {
        out += join_row({row.fixture, row.policy, std::to_string(row.seed),
                         fixed2(row.summary.activity_coverage_pct),
                         fixed2(row.summary.method_coverage_pct),
                         std::to_string(row.summary.unique_state_count),
                         std::to_string(row.summary.crash_tp),
                         std::to_string(row.summary.crash_fp),
                         std::to_string(row.interventions)},
                        sep);
    }
    return out;
}

}  // namespace delm
