#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "delm/atg.hpp"
#include "delm/icc.hpp"
#include "delm/manifest.hpp"
#include "delm/scalar.hpp"
#include "delm/trace.hpp"

namespace delm {

enum class UiAction { Tap, Swipe, LongPress, TextInput };

std::string to_string(UiAction action);
std::optional<UiAction> ui_action_from_string(std::string_view name);

struct ComponentNode {
    std::string id;
    std::string class_name;
    std::set<UiAction> actions;
    std::vector<ComponentNode> children;

    friend bool operator==(const ComponentNode&, const ComponentNode&) = default;
};

// Structural digest of a screen: activity name plus a preorder walk of
// (class, action set, child count). Component ids and text never enter the
// hash, so cosmetic content changes do not mint new states.
std::uint64_t state_hash(const ComponentNode& tree, const std::string& activity);

struct Effect {
    enum class Kind { GoState, GoActivity, SetGlobal, Crash, NoOp };

    Kind kind = Kind::NoOp;
    std::string state_id;        // GoState
    std::string activity;        // GoActivity
    std::string trace_ref;       // GoActivity; empty means no carried context
    std::string global_key;      // SetGlobal
    ScalarValue global_value;    // SetGlobal
    std::string stack_trace_id;  // Crash
};

struct TransitionKey {
    std::string component_id;
    UiAction action = UiAction::Tap;

    friend auto operator<=>(const TransitionKey&, const TransitionKey&) = default;
};

struct Transition {
    Effect effect;
    std::vector<std::string> method_tags;
};

struct StateSpec {
    ComponentNode tree;
    std::map<TransitionKey, Transition> transitions;
};

// What happens when an activity is entered without its required context:
// either the screen throws (modeled crash with a fixed stack id), or the
// launch silently fails and the runtime stays put.
struct ContextFault {
    bool crashes = false;
    std::string stack_trace_id;  // set when crashes
};

struct ActivitySpec {
    std::map<std::string, StateSpec> states;
    std::string entry_state;
    // Expected intent payload, keyed by extra name. Reserved "$action",
    // "$type", "$data", "$flags", "$identifier" keys address intent
    // attributes; "ext.field" keys address object/bundle fields.
    std::map<std::string, ScalarValue> required_extras;
    // Expected global data; "$config." keys describe device configuration
    // and are always granted.
    std::map<std::string, ScalarValue> required_globals;
    ContextFault on_context_fault;
};

struct AppSpec {
    std::string manifest_file = "manifest.xml";
    std::string traces_dir = "traces";
    std::map<std::string, ActivitySpec> activities;
    std::string initial_activity;
    GlobalState globals_init;
};

// A fully linked simulated app: manifest, sender traces with their resolved
// contexts, and the behavioral spec. Immutable once loaded; runtimes hold a
// pointer into it.
struct SimApp {
    std::filesystem::path dir;
    std::string name;
    AppSpec spec;
    Manifest manifest;
    std::vector<SenderTrace> traces;                    // sorted by id
    std::map<std::string, ResolvedContext> trace_contexts;

    const ActivitySpec& activity(const std::string& name) const;
    const ResolvedContext* context_for_trace(const std::string& trace_ref) const;

    // Launch preconditions per activity, derived from required_globals.
    std::map<std::string, std::vector<ContextRequirement>> requirements() const;

    // Sorted union of every method tag declared on any transition.
    std::vector<std::string> declared_methods() const;

    // Activities whose required_extras or required_globals are non-empty:
    // the value-check cases a run can pass by entering them.
    std::vector<std::string> check_cases() const;
};

// Loads manifest.xml, traces/ and app.spec from a directory and validates
// every cross-reference. All violations are reported together via SpecError.
SimApp load_app(const std::filesystem::path& app_dir);

// Everything needed to launch activities from outside, produced by running
// the static pipeline over a loaded app: extraction, binding, intent
// matching, launcher construction and the static transition graph.
struct LaunchPlan {
    Manifest bound_manifest;
    std::vector<DeepLink> deep_links;  // extracted first, then bound
    std::vector<IntentLink> intent_links;
    std::vector<ActivityLauncher> launchers;
    Atg static_atg;
};

LaunchPlan prepare_launch_plan(const SimApp& app, const std::string& scheme = "delm",
                               const std::string& host_prefix = "app");

}  // namespace delm
