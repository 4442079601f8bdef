#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "delm/icc.hpp"
#include "delm/simapp.hpp"

namespace delm {

struct Event {
    enum class Kind { Ui, Back };

    Kind kind = Kind::Back;
    std::string component_id;           // Ui only
    UiAction action = UiAction::Tap;    // Ui only

    static Event back() { return Event{}; }
    static Event ui(std::string component_id, UiAction action) {
        return Event{Kind::Ui, std::move(component_id), action};
    }

    friend bool operator==(const Event&, const Event&) = default;
};

std::string to_string(const Event& e);

enum class LaunchedBy { Organic, DeepLink };

std::string to_string(LaunchedBy by);

struct CrashRecord {
    std::string stack_trace_id;
    std::string activity;
    std::string state_id;
    std::optional<Event> triggering_event;
    LaunchedBy launched_by = LaunchedBy::Organic;
    std::uint64_t event_index = 0;

    friend bool operator==(const CrashRecord&, const CrashRecord&) = default;
};

struct GuiState {
    std::string activity;
    std::string state_id;
    const ComponentNode* tree = nullptr;
    std::uint64_t hash = 0;
};

struct StackEntry {
    std::string activity;
    std::string state_id;
    bool via_deep_link = false;

    friend bool operator==(const StackEntry&, const StackEntry&) = default;
};

enum class LaunchOutcome { Launched, Failed, Crashed };

// Mutable execution state of one app run. Single-owner; copies are cheap
// enough for search (triage snapshots them freely). The referenced SimApp
// must outlive every runtime built over it.
struct Runtime {
    const SimApp* app = nullptr;
    std::vector<StackEntry> stack;  // bottom to top; top is the visible screen
    GlobalState globals;
    std::vector<CrashRecord> crash_log;
    std::set<std::string> covered_methods;
    std::uint64_t event_count = 0;
    std::uint64_t rng_seed = 0;

    GuiState current() const;
    std::vector<std::string> stack_activities() const;
};

Runtime make_runtime(const SimApp& app, std::uint64_t seed);

// Applies one event to the current screen. Undefined (component, action)
// pairs are no-ops; Back pops the stack (no-op at the bottom); a crash is
// recorded and the stack resets to the initial activity. Globals persist
// across crashes; only restart() re-initializes them. Always increments
// event_count.
GuiState execute_event(Runtime& rt, const Event& e);

// Launches the launcher's target through its deep link. When the target's
// required extras and globals are satisfied the activity is pushed at its
// entry state; otherwise the activity's context-fault mode decides between
// a recorded crash and a failed launch that leaves the runtime unchanged.
LaunchOutcome launch_via_deeplink(Runtime& rt, const ActivityLauncher& launcher);

// Pops the back stack down to `target` and re-enters it at its entry state.
// Throws NotOnStack when the target is not on the stack.
LaunchOutcome launch_dynamic(Runtime& rt, const std::string& target);

// Fresh stack and globals; crash log, covered methods and event count are
// accumulators and survive.
void restart(Runtime& rt);

// Canonical JSON rendition of the full runtime state, used by determinism
// checks and debugging.
std::string runtime_to_json(const Runtime& rt);

// True when `ctx` (possibly null) plus the globals satisfy the activity's
// declared requirements. Exposed for launch planning and tests.
bool requirements_met(const ActivitySpec& spec, const ResolvedContext* ctx,
                      const GlobalState& globals);

}  // namespace delm
