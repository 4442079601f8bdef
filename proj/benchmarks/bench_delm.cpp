#include <benchmark/benchmark.h>

#include "delm/exploration.hpp"
#include "delm/manifest.hpp"
#include "delm/rng.hpp"
#include "delm/simapp.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

std::filesystem::path fixtures_dir() {
    if (const char* env = std::getenv("DELM_FIXTURES")) return env;
#ifdef DELM_SOURCE_FIXTURES
    return DELM_SOURCE_FIXTURES;
#else
    return "fixtures";
#endif
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

delm::ComponentNode wide_tree(int breadth, int depth) {
    delm::ComponentNode node;
    node.id = "n";
    node.class_name = "ViewGroup";
    node.actions = {delm::UiAction::Tap};
    if (depth > 0) {
        for (int i = 0; i < breadth; ++i) {
            node.children.push_back(wide_tree(breadth, depth - 1));
        }
    }
    return node;
}

void BM_StateHash(benchmark::State& state) {
    const delm::ComponentNode tree = wide_tree(4, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(delm::state_hash(tree, "com.app.Main"));
    }
}
BENCHMARK(BM_StateHash)->Arg(2)->Arg(4)->Arg(6);

void BM_LoopStep(benchmark::State& state) {
    delm::LoopMonitor monitor;
    delm::Rng rng(1);
    const std::uint64_t distinct = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(monitor.loop_step(rng.below(distinct)));
    }
}
BENCHMARK(BM_LoopStep)->Arg(2)->Arg(64);

void BM_ParseManifest(benchmark::State& state) {
    const std::string text = read_file(fixtures_dir() / "manifests" / "amazon_prime.xml");
    for (auto _ : state) {
        benchmark::DoNotOptimize(delm::parse_manifest(text));
    }
}
BENCHMARK(BM_ParseManifest);

void BM_GuidedExploration(benchmark::State& state) {
    const delm::SimApp app = delm::load_app(fixtures_dir() / "loseweight");
    const delm::LaunchPlan plan = delm::prepare_launch_plan(app);
    delm::ExplorationConfig cfg;
    cfg.event_budget = static_cast<std::uint64_t>(state.range(0));
    cfg.seed = 7;
    for (auto _ : state) {
        benchmark::DoNotOptimize(delm::explore(app, cfg, plan.launchers, plan.static_atg));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GuidedExploration)->Arg(1000)->Arg(5000);

}  // namespace

BENCHMARK_MAIN();
