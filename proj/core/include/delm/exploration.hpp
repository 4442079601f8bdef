#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "delm/atg.hpp"
#include "delm/rng.hpp"
#include "delm/runtime.hpp"
#include "delm/simapp.hpp"

namespace delm {

// Sliding-window loop detector over GUI state hashes. A loop is declared
// once the window is over capacity and a single hash repeats beyond the
// repetition threshold; detection clears the window so it can fire again.
struct LoopMonitor {
    std::size_t max_repetition_threshold = 50;
    std::size_t max_queue_size = 200;

    std::deque<std::uint64_t> state_queue;
    std::map<std::uint64_t, std::size_t> counts;

    // Appends a hash and reports whether a loop was just detected. Below
    // capacity this is always false; above it, the oldest entry is evicted
    // when no loop is found.
    bool loop_step(std::uint64_t h);
};

enum class Policy { RandomOnly, Guided };

std::string to_string(Policy policy);

struct Ablations {
    bool wacm = false;  // launch without mocked contexts: empty launcher set
    bool wdld = false;  // disable the loop monitor entirely
    bool wgea = false;  // loops trigger a plain restart instead of guidance
};

struct ExplorationConfig {
    std::uint64_t event_budget = 1000;
    std::uint64_t seed = 0;
    Policy policy = Policy::Guided;
    Ablations ablations;
    // Launch Ready launchers without checking their preconditions. Used to
    // reproduce context-blind tools' false positives; off by default.
    bool fax_mode = false;
    std::uint64_t event_interval_ticks = 1;
    std::size_t max_repetition_threshold = 50;
    std::size_t max_queue_size = 200;
};

struct Intervention {
    std::uint64_t event_index = 0;
    std::string target;
    LaunchKind kind = LaunchKind::DeepLink;
};

struct ExplorationReport {
    ExplorationConfig config;
    std::uint64_t event_count = 0;
    std::uint64_t elapsed_ticks = 0;
    bool early_terminated = false;
    std::set<std::string> visited_activities;
    std::map<std::string, std::uint64_t> visit_counts;
    std::set<std::uint64_t> unique_states;
    std::set<std::string> covered_methods;
    std::vector<CrashRecord> crashes;
    std::vector<Intervention> interventions;
    std::uint64_t restarts = 0;
    std::uint64_t loop_detections = 0;
    Atg final_atg;
};

// Uniform draw over every (interactable component, supported action) pair
// of the current screen plus the global Back event.
Event random_event(const Runtime& rt, Rng& rng);

// Runs the event loop for the configured budget: random events, per-event
// loop detection, dynamic ATG updates on activity changes, and, under the
// Guided policy, stack-pop or deep-link interventions chosen from the ATG
// when a loop fires. Fully deterministic for a given (app, config).
ExplorationReport explore(const SimApp& app, const ExplorationConfig& cfg,
                          const std::vector<ActivityLauncher>& launchers, const Atg& atg);

std::string report_to_json(const ExplorationReport& report);
ExplorationReport report_from_json(const std::string& text);

}  // namespace delm
