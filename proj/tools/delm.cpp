// delm: deep-link guided exploration toolkit for simulated apps.
//
// Subcommands mirror the pipeline: analyze/bind work on manifests,
// launchers/atg expose the static analysis, explore/bench run the dynamic
// engine, triage/summarize post-process run reports.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "delm/errors.hpp"
#include "delm/exploration.hpp"
#include "delm/manifest.hpp"
#include "delm/metrics.hpp"
#include "delm/simapp.hpp"
#include "delm/triage.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw delm::Error("cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw delm::Error("cannot write " + path);
    out << content;
}

std::string default_fixtures_dir() {
    const char* env = std::getenv("DELM_FIXTURES");
    return env != nullptr ? env : "fixtures";
}

delm::Ablations parse_ablations(const std::string& spec) {
    delm::Ablations ablations;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if (item == "wacm") {
            ablations.wacm = true;
        } else if (item == "wdld") {
            ablations.wdld = true;
        } else if (item == "wgea") {
            ablations.wgea = true;
        } else {
            throw delm::Error("unknown ablation: " + item + " (expected wacm, wdld, wgea)");
        }
    }
    return ablations;
}

std::vector<delm::TriageVerdict> triage_report(const delm::SimApp& app,
                                               const delm::ExplorationReport& report,
                                               std::uint64_t depth) {
    std::vector<delm::TriageVerdict> verdicts;
    for (const auto& crash : delm::dedupe(report.crashes)) {
        verdicts.push_back(delm::classify(app, crash, depth));
    }
    return verdicts;
}

int run(int argc, char** argv) {
    CLI::App cli{"deep-link guided exploration toolkit"};
    cli.require_subcommand(1);

    // analyze
    std::string analyze_manifest;
    auto* analyze = cli.add_subcommand("analyze", "print deep links extracted from a manifest");
    analyze->add_option("manifest", analyze_manifest, "manifest xml file")->required();

    // bind
    std::string bind_manifest, bind_scheme, bind_prefix, bind_out;
    auto* bind = cli.add_subcommand("bind", "inject deep links for activities lacking them");
    bind->add_option("manifest", bind_manifest, "manifest xml file")->required();
    bind->add_option("--scheme", bind_scheme, "uri scheme for injected links")->required();
    bind->add_option("--host-prefix", bind_prefix, "host prefix for injected links")->required();
    bind->add_option("-o,--output", bind_out, "output file (default: stdout)");

    // launchers
    std::string launchers_dir;
    auto* launchers = cli.add_subcommand("launchers", "print the activity launcher table");
    launchers->add_option("app-dir", launchers_dir, "app fixture directory")->required();

    // atg
    std::string atg_dir, atg_out;
    auto* atg = cli.add_subcommand("atg", "emit the static activity transition graph as DOT");
    atg->add_option("app-dir", atg_dir, "app fixture directory")->required();
    atg->add_option("-o,--output", atg_out, "output file (default: stdout)");

    // explore
    std::string explore_dir, explore_policy = "guided", explore_ablate, explore_out;
    std::uint64_t explore_budget = 1000, explore_seed = 0;
    bool explore_fax = false;
    auto* explore_cmd = cli.add_subcommand("explore", "run one exploration and write its report");
    explore_cmd->add_option("app-dir", explore_dir, "app fixture directory")->required();
    explore_cmd->add_option("--policy", explore_policy, "guided|random")
        ->check(CLI::IsMember({"guided", "random"}));
    explore_cmd->add_option("--budget", explore_budget, "event budget");
    explore_cmd->add_option("--seed", explore_seed, "rng seed");
    explore_cmd->add_option("--ablate", explore_ablate, "comma list of wacm,wdld,wgea");
    explore_cmd->add_flag("--fax-mode", explore_fax,
                          "launch ready launchers without context checks");
    explore_cmd->add_option("-o,--output", explore_out, "report file (default: stdout)");

    // bench
    std::string bench_dir = default_fixtures_dir(), bench_seeds = "1,2,3", bench_out,
                bench_format = "csv";
    std::uint64_t bench_budget = 2000;
    auto* bench = cli.add_subcommand("bench", "compare policies across a fixture corpus");
    bench->add_option("corpus-dir", bench_dir, "corpus directory (default: $DELM_FIXTURES)");
    bench->add_option("--budget", bench_budget, "event budget per run");
    bench->add_option("--seeds", bench_seeds, "comma-separated seeds (at least 3)");
    bench->add_option("--format", bench_format, "csv|tsv|json")
        ->check(CLI::IsMember({"csv", "tsv", "json"}));
    bench->add_option("-o,--output", bench_out, "table file (default: stdout)");

    // triage
    std::string triage_dir, triage_report_path, triage_out;
    std::uint64_t triage_depth = delm::kDefaultTriageDepth;
    auto* triage = cli.add_subcommand("triage", "classify a report's crashes");
    triage->add_option("app-dir", triage_dir, "app fixture directory")->required();
    triage->add_option("report", triage_report_path, "report json file")->required();
    triage->add_option("--depth", triage_depth, "organic search depth limit");
    triage->add_option("-o,--output", triage_out, "verdicts file (default: stdout)");

    // summarize
    std::string sum_dir, sum_report, sum_verdicts, sum_format = "json", sum_out;
    std::uint64_t sum_depth = delm::kDefaultTriageDepth;
    auto* summarize_cmd = cli.add_subcommand("summarize", "compute coverage for a report");
    summarize_cmd->add_option("app-dir", sum_dir, "app fixture directory")->required();
    summarize_cmd->add_option("report", sum_report, "report json file")->required();
    summarize_cmd->add_option("--verdicts", sum_verdicts,
                              "verdict json file (default: triage in-process)");
    summarize_cmd->add_option("--depth", sum_depth, "triage depth when verdicts are computed");
    summarize_cmd->add_option("--format", sum_format, "json|csv|tsv")
        ->check(CLI::IsMember({"json", "csv", "tsv"}));
    summarize_cmd->add_option("-o,--output", sum_out, "output file (default: stdout)");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            return cli.exit(e);
        }
        std::cerr << e.what() << "\n";
        return 2;
    }

    if (analyze->parsed()) {
        const delm::Manifest manifest = delm::parse_manifest(read_file(analyze_manifest));
        for (const auto& link : delm::extract_deep_links(manifest)) {
            std::cout << link.activity << '\t' << link.uri << '\t' << to_string(link.origin)
                      << '\n';
        }
        return 0;
    }

    if (bind->parsed()) {
        const delm::Manifest manifest = delm::parse_manifest(read_file(bind_manifest));
        const delm::BindResult result = delm::bind_deep_links(manifest, bind_scheme, bind_prefix);
        write_output(bind_out, delm::serialize_manifest(result.manifest));
        for (const auto& link : result.bound) {
            std::cerr << link.activity << '\t' << link.uri << "\tbound\n";
        }
        return 0;
    }

    if (launchers->parsed()) {
        const delm::SimApp app = delm::load_app(launchers_dir);
        const delm::LaunchPlan plan = delm::prepare_launch_plan(app);
        for (const auto& launcher : plan.launchers) {
            std::cout << launcher.target << '\t' << to_string(launcher.status) << '\t'
                      << launcher.deep_link.uri << '\t' << delm::context_summary(launcher.context)
                      << '\n';
        }
        return 0;
    }

    if (atg->parsed()) {
        const delm::SimApp app = delm::load_app(atg_dir);
        const delm::LaunchPlan plan = delm::prepare_launch_plan(app);
        write_output(atg_out, plan.static_atg.to_dot());
        return 0;
    }

    if (explore_cmd->parsed()) {
        const delm::SimApp app = delm::load_app(explore_dir);
        const delm::LaunchPlan plan = delm::prepare_launch_plan(app);
        delm::ExplorationConfig cfg;
        cfg.event_budget = explore_budget;
        cfg.seed = explore_seed;
        cfg.policy = explore_policy == "random" ? delm::Policy::RandomOnly : delm::Policy::Guided;
        cfg.ablations = parse_ablations(explore_ablate);
        cfg.fax_mode = explore_fax;
        const delm::ExplorationReport report =
            delm::explore(app, cfg, plan.launchers, plan.static_atg);
        write_output(explore_out, delm::report_to_json(report));
        return 0;
    }

    if (bench->parsed()) {
        std::vector<std::uint64_t> seeds;
        std::stringstream ss(bench_seeds);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (!item.empty()) seeds.push_back(std::stoull(item));
        }

        std::vector<std::filesystem::path> apps;
        for (const auto& entry : std::filesystem::directory_iterator(bench_dir)) {
            if (entry.is_directory() && std::filesystem::exists(entry.path() / "app.spec")) {
                apps.push_back(entry.path());
            }
        }
        std::sort(apps.begin(), apps.end());
        if (apps.empty()) throw delm::Error("no app fixtures found under " + bench_dir);

        delm::ComparisonTable table;
        for (const auto& dir : apps) {
            const delm::SimApp app = delm::load_app(dir);
            delm::ComparisonTable part = delm::compare_policies(app, bench_budget, seeds);
            table.rows.insert(table.rows.end(), part.rows.begin(), part.rows.end());
        }
        write_output(bench_out, delm::emit_table(table, delm::format_from_string(bench_format)));
        return 0;
    }

    if (triage->parsed()) {
        const delm::SimApp app = delm::load_app(triage_dir);
        const delm::ExplorationReport report =
            delm::report_from_json(read_file(triage_report_path));
        write_output(triage_out, delm::verdicts_to_json(triage_report(app, report, triage_depth)));
        return 0;
    }

    if (summarize_cmd->parsed()) {
        const delm::SimApp app = delm::load_app(sum_dir);
        const delm::ExplorationReport report = delm::report_from_json(read_file(sum_report));
        std::vector<delm::TriageVerdict> verdicts;
        if (sum_verdicts.empty()) {
            verdicts = triage_report(app, report, sum_depth);
        } else {
            verdicts = delm::verdicts_from_json(read_file(sum_verdicts));
        }
        const delm::CoverageSummary summary = delm::summarize(app, report, verdicts);
        write_output(sum_out, delm::emit_summary(summary, delm::format_from_string(sum_format)));
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const delm::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
