#include "delm/simapp.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "delm/errors.hpp"

namespace delm {

namespace {

using nlohmann::json;

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void fnv_bytes(std::uint64_t& h, std::string_view bytes) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= kFnvPrime;
    }
}

void fnv_byte(std::uint64_t& h, unsigned char c) {
    h ^= c;
    h *= kFnvPrime;
}

void fnv_u32(std::uint64_t& h, std::uint32_t v) {
    for (int shift = 0; shift < 32; shift += 8) {
        fnv_byte(h, static_cast<unsigned char>((v >> shift) & 0xFF));
    }
}

void hash_node(std::uint64_t& h, const ComponentNode& node) {
    fnv_byte(h, 0x02);  // node open marker
    fnv_bytes(h, node.class_name);
    fnv_byte(h, 0x1F);
    for (UiAction action : node.actions) {  // std::set keeps these sorted
        fnv_byte(h, static_cast<unsigned char>(action) + 1);
    }
    fnv_byte(h, 0x1F);
    fnv_u32(h, static_cast<std::uint32_t>(node.children.size()));
    for (const auto& child : node.children) {
        hash_node(h, child);
    }
    fnv_byte(h, 0x03);  // node close marker
}

ScalarValue scalar_from_json(const json& j, std::vector<std::string>& errors,
                             const std::string& where) {
    if (j.is_boolean()) return j.get<bool>();
    if (j.is_number_integer()) return j.get<std::int64_t>();
    if (j.is_number_float()) return j.get<double>();
    if (j.is_string()) return j.get<std::string>();
    errors.push_back(where + ": expected a scalar, got " + j.dump());
    return std::string{};
}

ComponentNode component_from_json(const json& j, std::vector<std::string>& errors,
                                  const std::string& where) {
    ComponentNode node;
    node.id = j.value("id", "");
    node.class_name = j.value("class", "View");
    if (node.id.empty()) errors.push_back(where + ": component without id");
    const json action_list = j.value("actions", json::array());
    for (const auto& a : action_list) {
        auto action = ui_action_from_string(a.get<std::string>());
        if (!action) {
            errors.push_back(where + ": unknown action '" + a.get<std::string>() + "'");
            continue;
        }
        node.actions.insert(*action);
    }
    const json child_list = j.value("children", json::array());
    for (const auto& child : child_list) {
        node.children.push_back(component_from_json(child, errors, where));
    }
    return node;
}

Effect effect_from_json(const json& j, std::vector<std::string>& errors,
                        const std::string& where) {
    Effect effect;
    if (j.is_string()) {
        if (j.get<std::string>() == "noop") return effect;
        errors.push_back(where + ": unknown effect '" + j.get<std::string>() + "'");
        return effect;
    }
    if (!j.is_object()) {
        errors.push_back(where + ": effect must be \"noop\" or an object");
        return effect;
    }
    if (j.contains("go_state")) {
        effect.kind = Effect::Kind::GoState;
        effect.state_id = j.at("go_state").get<std::string>();
    } else if (j.contains("go_activity")) {
        effect.kind = Effect::Kind::GoActivity;
        effect.activity = j.at("go_activity").get<std::string>();
        effect.trace_ref = j.value("trace", "");
    } else if (j.contains("set_global")) {
        effect.kind = Effect::Kind::SetGlobal;
        const json& sg = j.at("set_global");
        effect.global_key = sg.at("key").get<std::string>();
        effect.global_value = scalar_from_json(sg.at("value"), errors, where);
    } else if (j.contains("crash")) {
        effect.kind = Effect::Kind::Crash;
        effect.stack_trace_id = j.at("crash").get<std::string>();
    } else {
        errors.push_back(where + ": effect object with no recognized key: " + j.dump());
    }
    return effect;
}

void collect_component_ids(const ComponentNode& node, std::set<std::string>& ids) {
    ids.insert(node.id);
    for (const auto& child : node.children) collect_component_ids(child, ids);
}

StateSpec state_from_json(const json& j, std::vector<std::string>& errors,
                          const std::string& where) {
    StateSpec state;
    if (!j.contains("tree")) {
        errors.push_back(where + ": state without a component tree");
        return state;
    }
    state.tree = component_from_json(j.at("tree"), errors, where);

    std::set<std::string> component_ids;
    collect_component_ids(state.tree, component_ids);

    const json transition_list = j.value("transitions", json::array());
    for (const auto& t : transition_list) {
        TransitionKey key;
        key.component_id = t.value("component", "");
        auto action = ui_action_from_string(t.value("action", "tap"));
        if (!action) {
            errors.push_back(where + ": unknown transition action '" + t.value("action", "") +
                             "'");
            continue;
        }
        key.action = *action;
        if (component_ids.count(key.component_id) == 0) {
            errors.push_back(where + ": transition references missing component '" +
                             key.component_id + "'");
        }
        Transition transition;
        transition.effect = effect_from_json(t.value("effect", json("noop")), errors, where);
        const json method_list = t.value("methods", json::array());
        for (const auto& m : method_list) {
            transition.method_tags.push_back(m.get<std::string>());
        }
        state.transitions[key] = std::move(transition);
    }
    return state;
}

ActivitySpec activity_from_json(const json& j, std::vector<std::string>& errors,
                                const std::string& where) {
    ActivitySpec spec;
    spec.entry_state = j.value("entry_state", "");
    const json state_map = j.value("states", json::object());
    for (const auto& [state_id, state_json] : state_map.items()) {
        spec.states[state_id] = state_from_json(state_json, errors, where + "/" + state_id);
    }
    const json extras_map = j.value("required_extras", json::object());
    for (const auto& [key, value] : extras_map.items()) {
        spec.required_extras[key] = scalar_from_json(value, errors, where);
    }
    const json globals_map = j.value("required_globals", json::object());
    for (const auto& [key, value] : globals_map.items()) {
        spec.required_globals[key] = scalar_from_json(value, errors, where);
    }
    const json fault = j.value("on_context_fault", json("launch_fail"));
    if (fault.is_string() && fault.get<std::string>() == "launch_fail") {
        spec.on_context_fault.crashes = false;
    } else if (fault.is_object() && fault.contains("crash")) {
        spec.on_context_fault.crashes = true;
        spec.on_context_fault.stack_trace_id = fault.at("crash").get<std::string>();
    } else {
        errors.push_back(where + ": on_context_fault must be \"launch_fail\" or {\"crash\": id}");
    }
    return spec;
}

std::string read_file(const std::filesystem::path& path, std::vector<std::string>& errors) {
    std::ifstream in(path);
    if (!in) {
        errors.push_back("cannot open " + path.string());
        return {};
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void validate_app(SimApp& app, std::vector<std::string>& errors) {
    const AppSpec& spec = app.spec;
    if (spec.initial_activity.empty()) {
        errors.push_back("app.spec: missing initial_activity");
    } else {
        if (!app.manifest.declares_activity(spec.initial_activity)) {
            errors.push_back("initial_activity '" + spec.initial_activity +
                             "' not declared in manifest");
        }
        if (spec.activities.count(spec.initial_activity) == 0) {
            errors.push_back("initial_activity '" + spec.initial_activity +
                             "' has no activity spec");
        }
    }

    for (const auto& [name, activity] : spec.activities) {
        if (activity.states.count(activity.entry_state) == 0) {
            errors.push_back(name + ": entry_state '" + activity.entry_state +
                             "' is not a declared state");
        }
        for (const auto& [state_id, state] : activity.states) {
            for (const auto& [key, transition] : state.transitions) {
                const Effect& effect = transition.effect;
                const std::string where = name + "/" + state_id;
                switch (effect.kind) {
                    case Effect::Kind::GoState:
                        if (activity.states.count(effect.state_id) == 0) {
                            errors.push_back(where + ": transition to undeclared state '" +
                                             effect.state_id + "'");
                        }
                        break;
                    case Effect::Kind::GoActivity:
                        if (spec.activities.count(effect.activity) == 0) {
                            errors.push_back(where + ": transition to undeclared activity '" +
                                             effect.activity + "'");
                        }
                        if (!effect.trace_ref.empty() &&
                            app.trace_contexts.count(effect.trace_ref) == 0) {
                            errors.push_back(where + ": unknown trace reference '" +
                                             effect.trace_ref + "'");
                        }
                        break;
                    default:
                        break;
                }
            }
        }
    }

    for (const auto& trace : app.traces) {
        if (!app.manifest.declares_activity(trace.sender_activity)) {
            errors.push_back("trace " + trace.id + ": sender '" + trace.sender_activity +
                             "' not declared in manifest");
        }
    }
}

}  // namespace

std::string to_string(UiAction action) {
    switch (action) {
        case UiAction::Tap: return "tap";
        case UiAction::Swipe: return "swipe";
        case UiAction::LongPress: return "long_press";
        case UiAction::TextInput: return "text_input";
    }
    return "?";
}

std::optional<UiAction> ui_action_from_string(std::string_view name) {
    if (name == "tap") return UiAction::Tap;
    if (name == "swipe") return UiAction::Swipe;
    if (name == "long_press") return UiAction::LongPress;
    if (name == "text_input") return UiAction::TextInput;
    return std::nullopt;
}

std::uint64_t state_hash(const ComponentNode& tree, const std::string& activity) {
    std::uint64_t h = kFnvOffset;
    fnv_bytes(h, activity);
    fnv_byte(h, 0x1E);
    hash_node(h, tree);
    return h;
}

const ActivitySpec& SimApp::activity(const std::string& name) const {
    auto it = spec.activities.find(name);
    if (it == spec.activities.end()) throw UnknownActivity(name);
    return it->second;
}

const ResolvedContext* SimApp::context_for_trace(const std::string& trace_ref) const {
    auto it = trace_contexts.find(trace_ref);
    return it == trace_contexts.end() ? nullptr : &it->second;
}

std::map<std::string, std::vector<ContextRequirement>> SimApp::requirements() const {
    std::map<std::string, std::vector<ContextRequirement>> out;
    for (const auto& [name, activity] : spec.activities) {
        std::vector<ContextRequirement> reqs;
        for (const auto& [key, expected] : activity.required_globals) {
            ContextRequirement req;
            req.kind = key.rfind(kConfigKeyPrefix, 0) == 0 ? RequirementKind::DeviceConfig
                                                           : RequirementKind::GlobalData;
            req.key = key;
            req.expected = expected;
            reqs.push_back(std::move(req));
        }
        if (!reqs.empty()) out[name] = std::move(reqs);
    }
    return out;
}

std::vector<std::string> SimApp::declared_methods() const {
    std::set<std::string> methods;
    for (const auto& [name, activity] : spec.activities) {
        for (const auto& [state_id, state] : activity.states) {
            for (const auto& [key, transition] : state.transitions) {
                methods.insert(transition.method_tags.begin(), transition.method_tags.end());
            }
        }
    }
    return {methods.begin(), methods.end()};
}

std::vector<std::string> SimApp::check_cases() const {
    std::vector<std::string> cases;
    for (const auto& [name, activity] : spec.activities) {
        if (!activity.required_extras.empty() || !activity.required_globals.empty()) {
            cases.push_back(name);
        }
    }
    return cases;
}

SimApp load_app(const std::filesystem::path& app_dir) {
    std::vector<std::string> errors;
    SimApp app;
    app.dir = app_dir;
    app.name = app_dir.filename().string();
    if (app.name.empty()) app.name = app_dir.parent_path().filename().string();

    const std::filesystem::path spec_path = app_dir / "app.spec";
    const std::string spec_text = read_file(spec_path, errors);
    json doc;
    if (!spec_text.empty()) {
        try {
            doc = json::parse(spec_text);
        } catch (const json::parse_error& e) {
            errors.push_back("app.spec: " + std::string(e.what()));
        }
    }

    if (doc.is_object()) {
        try {
            app.spec.manifest_file = doc.value("manifest", "manifest.xml");
            app.spec.traces_dir = doc.value("traces", "traces");
            app.spec.initial_activity = doc.value("initial_activity", "");
            const json globals_doc = doc.value("globals", json::object());
            for (const auto& [key, value] : globals_doc.items()) {
                app.spec.globals_init[key] = scalar_from_json(value, errors, "globals");
            }
            const json activities_doc = doc.value("activities", json::object());
            for (const auto& [name, activity] : activities_doc.items()) {
                app.spec.activities[name] = activity_from_json(activity, errors, name);
            }
        } catch (const json::exception& e) {
            errors.push_back("app.spec: " + std::string(e.what()));
        }
    }

    const std::string manifest_text = read_file(app_dir / app.spec.manifest_file, errors);
    if (!manifest_text.empty()) {
        try {
            app.manifest = parse_manifest(manifest_text);
        } catch (const Error& e) {
            errors.push_back(std::string("manifest: ") + e.what());
        }
    }

    const std::filesystem::path traces_dir = app_dir / app.spec.traces_dir;
    if (std::filesystem::is_directory(traces_dir)) {
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(traces_dir)) {
            if (entry.path().extension() == ".json") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& file : files) {
            try {
                SenderTrace trace = load_trace_file(file.string());
                if (app.trace_contexts.count(trace.id) > 0) {
                    errors.push_back("duplicate trace id: " + trace.id);
                    continue;
                }
                app.trace_contexts[trace.id] = resolve_context(trace);
                app.traces.push_back(std::move(trace));
            } catch (const Error& e) {
                errors.push_back(e.what());
            }
        }
    }

    validate_app(app, errors);
    if (!errors.empty()) throw SpecError(std::move(errors));
    return app;
}

LaunchPlan prepare_launch_plan(const SimApp& app, const std::string& scheme,
                               const std::string& host_prefix) {
    LaunchPlan plan;
    BindResult bound = bind_deep_links(app.manifest, scheme, host_prefix);
    plan.bound_manifest = std::move(bound.manifest);
    plan.deep_links = extract_deep_links(app.manifest);
    plan.deep_links.insert(plan.deep_links.end(), bound.bound.begin(), bound.bound.end());
    plan.intent_links = match_intent_pairs(app.traces, plan.bound_manifest);
    plan.launchers = build_launchers(plan.intent_links, plan.deep_links, app.requirements());
    plan.static_atg = build_static_atg(plan.bound_manifest, plan.intent_links);
    return plan;
}

}  // namespace delm
