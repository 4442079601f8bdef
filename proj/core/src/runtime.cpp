#include "delm/runtime.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "delm/errors.hpp"

namespace delm {

namespace {

using nlohmann::ordered_json;

const StateSpec& state_spec(const SimApp& app, const std::string& activity,
                            const std::string& state_id) {
    return app.activity(activity).states.at(state_id);
}

// Looks up one required-extra key in a resolved context. Supports reserved
// "$attribute" keys, dotted "ext.field" addressing, and bundle flattening
// (a bare key may be satisfied by a field of any bundle extra).
bool extra_requirement_met(const ResolvedContext& ctx, const std::string& key,
                           const ScalarValue& expected) {
    auto attr_matches = [&](const Resolution& res) {
        return res.is_constant() && *res.value == expected;
    };
    if (key == "$action") return attr_matches(ctx.action);
    if (key == "$type") return attr_matches(ctx.type_attr);
    if (key == "$data") return attr_matches(ctx.data_uri);
    if (key == "$flags") return attr_matches(ctx.flags);
    if (key == "$identifier") return attr_matches(ctx.identifier);

    if (auto dot = key.find('.'); dot != std::string::npos) {
        const std::string extra_key = key.substr(0, dot);
        const std::string field = key.substr(dot + 1);
        auto it = ctx.extras.find(extra_key);
        if (it == ctx.extras.end() || it->second.unresolved) return false;
        auto fit = it->second.fields.find(field);
        return fit != it->second.fields.end() && fit->second == expected;
    }

    if (auto it = ctx.extras.find(key); it != ctx.extras.end()) {
        const ResolvedExtra& extra = it->second;
        return !extra.unresolved && extra.kind == ExtraKind::Primary && extra.scalar &&
               *extra.scalar == expected;
    }
    for (const auto& [name, extra] : ctx.extras) {
        if (extra.kind != ExtraKind::Bundle || extra.unresolved) continue;
        auto fit = extra.fields.find(key);
        if (fit != extra.fields.end() && fit->second == expected) return true;
    }
    return false;
}

void reset_to_initial(Runtime& rt) {
    rt.stack.clear();
    rt.stack.push_back({rt.app->spec.initial_activity,
                        rt.app->activity(rt.app->spec.initial_activity).entry_state, false});
}

void record_crash(Runtime& rt, const std::string& stack_trace_id,
                  const std::optional<Event>& event, LaunchedBy launched_by) {
    CrashRecord record;
    record.stack_trace_id = stack_trace_id;
    record.activity = rt.stack.back().activity;
    record.state_id = rt.stack.back().state_id;
    record.triggering_event = event;
    record.launched_by = launched_by;
    record.event_index = rt.event_count;
    rt.crash_log.push_back(std::move(record));
    reset_to_initial(rt);
}

// Shared enter path for organic transitions and deep-link launches.
LaunchOutcome enter_activity(Runtime& rt, const std::string& target, const ResolvedContext* ctx,
                             bool via_deep_link, const std::optional<Event>& event) {
    const ActivitySpec& spec = rt.app->activity(target);
    if (requirements_met(spec, ctx, rt.globals)) {
        rt.stack.push_back({target, spec.entry_state, via_deep_link});
        return LaunchOutcome::Launched;
    }
    if (spec.on_context_fault.crashes) {
        // The fault fires inside the target activity during its launch.
        rt.stack.push_back({target, spec.entry_state, via_deep_link});
        record_crash(rt, spec.on_context_fault.stack_trace_id, event,
                     via_deep_link ? LaunchedBy::DeepLink : LaunchedBy::Organic);
        return LaunchOutcome::Crashed;
    }
    return LaunchOutcome::Failed;
}

ordered_json scalar_json(const ScalarValue& v) {
    return std::visit([](const auto& value) { return ordered_json(value); }, v);
}

ordered_json event_json(const Event& e) {
    ordered_json j;
    if (e.kind == Event::Kind::Back) {
        j["back"] = true;
    } else {
        j["component"] = e.component_id;
        j["action"] = to_string(e.action);
    }
    return j;
}

}  // namespace

std::string to_string(const Event& e) {
    if (e.kind == Event::Kind::Back) return "back";
    return to_string(e.action) + "(" + e.component_id + ")";
}

std::string to_string(LaunchedBy by) {
    return by == LaunchedBy::Organic ? "organic" : "deep_link";
}

GuiState Runtime::current() const {
    const StackEntry& top = stack.back();
    const StateSpec& state = state_spec(*app, top.activity, top.state_id);
    GuiState gui;
    gui.activity = top.activity;
    gui.state_id = top.state_id;
    gui.tree = &state.tree;
    gui.hash = state_hash(state.tree, top.activity);
    return gui;
}

std::vector<std::string> Runtime::stack_activities() const {
    std::vector<std::string> names;
    names.reserve(stack.size());
    for (const auto& entry : stack) names.push_back(entry.activity);
    return names;
}

Runtime make_runtime(const SimApp& app, std::uint64_t seed) {
    Runtime rt;
    rt.app = &app;
    rt.globals = app.spec.globals_init;
    rt.rng_seed = seed;
    reset_to_initial(rt);
    return rt;
}

bool requirements_met(const ActivitySpec& spec, const ResolvedContext* ctx,
                      const GlobalState& globals) {
    static const ResolvedContext kEmpty;
    const ResolvedContext& context = ctx == nullptr ? kEmpty : *ctx;
    for (const auto& [key, expected] : spec.required_extras) {
        if (!extra_requirement_met(context, key, expected)) return false;
    }
    for (const auto& [key, expected] : spec.required_globals) {
        if (key.rfind(kConfigKeyPrefix, 0) == 0) continue;  // device config: granted
        auto it = globals.find(key);
        if (it == globals.end() || !(it->second == expected)) return false;
    }
    return true;
}

GuiState execute_event(Runtime& rt, const Event& e) {
    ++rt.event_count;

    if (e.kind == Event::Kind::Back) {
        if (rt.stack.size() > 1) rt.stack.pop_back();
        return rt.current();
    }

    const StackEntry top = rt.stack.back();
    const StateSpec& state = state_spec(*rt.app, top.activity, top.state_id);
    auto it = state.transitions.find({e.component_id, e.action});
    if (it == state.transitions.end()) {
        return rt.current();  // undefined pair: no-op
    }

    const Transition& transition = it->second;
    rt.covered_methods.insert(transition.method_tags.begin(), transition.method_tags.end());

    const Effect& effect = transition.effect;
    switch (effect.kind) {
        case Effect::Kind::NoOp:
            break;
        case Effect::Kind::GoState:
            rt.stack.back().state_id = effect.state_id;
            break;
        case Effect::Kind::GoActivity: {
            const ResolvedContext* ctx = effect.trace_ref.empty()
                                             ? nullptr
                                             : rt.app->context_for_trace(effect.trace_ref);
            enter_activity(rt, effect.activity, ctx, /*via_deep_link=*/false, e);
            break;
        }
        case Effect::Kind::SetGlobal:
            rt.globals[effect.global_key] = effect.global_value;
            break;
        case Effect::Kind::Crash:
            record_crash(rt, effect.stack_trace_id, e,
                         top.via_deep_link ? LaunchedBy::DeepLink : LaunchedBy::Organic);
            break;
    }
    return rt.current();
}

LaunchOutcome launch_via_deeplink(Runtime& rt, const ActivityLauncher& launcher) {
    return enter_activity(rt, launcher.target, &launcher.context, /*via_deep_link=*/true,
                          std::nullopt);
}

LaunchOutcome launch_dynamic(Runtime& rt, const std::string& target) {
    auto it = std::find_if(rt.stack.rbegin(), rt.stack.rend(),
                           [&](const StackEntry& e) { return e.activity == target; });
    if (it == rt.stack.rend()) throw NotOnStack(target);

    const std::size_t keep = rt.stack.size() - static_cast<std::size_t>(it - rt.stack.rbegin());
    rt.stack.resize(keep);
    rt.stack.back().state_id = rt.app->activity(target).entry_state;
    return LaunchOutcome::Launched;
}

void restart(Runtime& rt) {
    rt.globals = rt.app->spec.globals_init;
    reset_to_initial(rt);
}

std::string runtime_to_json(const Runtime& rt) {
    ordered_json j;
    j["stack"] = ordered_json::array();
    for (const auto& entry : rt.stack) {
        ordered_json e;
        e["activity"] = entry.activity;
        e["state"] = entry.state_id;
        e["via_deep_link"] = entry.via_deep_link;
        j["stack"].push_back(std::move(e));
    }
    j["globals"] = ordered_json::object();
    for (const auto& [key, value] : rt.globals) {
        j["globals"][key] = scalar_json(value);
    }
    j["event_count"] = rt.event_count;
    j["rng_seed"] = rt.rng_seed;
    j["covered_methods"] = rt.covered_methods;
    j["crash_log"] = ordered_json::array();
    for (const auto& crash : rt.crash_log) {
        ordered_json c;
        c["stack_trace_id"] = crash.stack_trace_id;
        c["activity"] = crash.activity;
        c["state"] = crash.state_id;
        if (crash.triggering_event) c["event"] = event_json(*crash.triggering_event);
        c["launched_by"] = to_string(crash.launched_by);
        c["event_index"] = crash.event_index;
        j["crash_log"].push_back(std::move(c));
    }
    return j.dump(2) + "\n";
}

}  // namespace delm
