#include "delm/exploration.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "delm/errors.hpp"

namespace delm {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void collect_pairs(const ComponentNode& node, std::vector<Event>& pairs) {
    for (UiAction action : node.actions) {
        pairs.push_back(Event::ui(node.id, action));
    }
    for (const auto& child : node.children) collect_pairs(child, pairs);
}

char hex_digit(unsigned v) {
    return static_cast<char>(v < 10 ? '0' + v : 'a' + (v - 10));
}

std::string hash_to_hex(std::uint64_t h) {
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = hex_digit(h & 0xF);
        h >>= 4;
    }
    return out;
}

std::uint64_t hash_from_hex(const std::string& s) {
    return std::stoull(s, nullptr, 16);
}

ordered_json event_to_json(const Event& e) {
    ordered_json j;
    if (e.kind == Event::Kind::Back) {
        j["back"] = true;
    } else {
        j["component"] = e.component_id;
        j["action"] = to_string(e.action);
    }
    return j;
}

Event event_from_json(const json& j) {
    if (j.value("back", false)) return Event::back();
    auto action = ui_action_from_string(j.value("action", "tap"));
    return Event::ui(j.value("component", ""), action.value_or(UiAction::Tap));
}

// Bookkeeping shared by the exploration loop.
struct Tracker {
    ExplorationReport report;
    std::map<std::string, std::uint64_t>& visits;

    explicit Tracker(const ExplorationConfig& cfg) : visits(report.visit_counts) {
        report.config = cfg;
    }

    void visit(const std::string& activity) {
        report.visited_activities.insert(activity);
        ++visits[activity];
    }

    void observe_state(const Runtime& rt) { report.unique_states.insert(rt.current().hash); }
};

}  // namespace

bool LoopMonitor::loop_step(std::uint64_t h) {
    state_queue.push_back(h);
    ++counts[h];
    if (state_queue.size() <= max_queue_size) return false;

    std::size_t max_repeated = 0;
    for (const auto& [hash, count] : counts) {
        max_repeated = std::max(max_repeated, count);
    }
    if (max_repeated > max_repetition_threshold) {
        state_queue.clear();
        counts.clear();
        return true;
    }
    const std::uint64_t oldest = state_queue.front();
    state_queue.pop_front();
    if (--counts[oldest] == 0) counts.erase(oldest);
    return false;
}

std::string to_string(Policy policy) {
    return policy == Policy::RandomOnly ? "random" : "guided";
}

Event random_event(const Runtime& rt, Rng& rng) {
    std::vector<Event> pairs;
    collect_pairs(*rt.current().tree, pairs);
    const std::uint64_t n = pairs.size() + 1;  // plus Back
    const std::uint64_t pick = rng.below(n);
    if (pick == pairs.size()) return Event::back();
    return pairs[static_cast<std::size_t>(pick)];
}

ExplorationReport explore(const SimApp& app, const ExplorationConfig& cfg,
                          const std::vector<ActivityLauncher>& launchers, const Atg& atg) {
    static const std::vector<ActivityLauncher> kNoLaunchers;
    const std::vector<ActivityLauncher>& usable =
        cfg.ablations.wacm ? kNoLaunchers : launchers;

    Rng rng(cfg.seed);
    Runtime rt = make_runtime(app, cfg.seed);
    Tracker tracker(cfg);
    Atg graph = atg;

    LoopMonitor monitor;
    monitor.max_repetition_threshold = cfg.max_repetition_threshold;
    monitor.max_queue_size = cfg.max_queue_size;

    std::set<std::string> blocked;
    bool restart_escape_pending = false;

    tracker.visit(rt.current().activity);
    tracker.observe_state(rt);

    for (std::uint64_t step = 0; step < cfg.event_budget; ++step) {
        const std::string prev = rt.current().activity;
        const std::size_t prev_depth = rt.stack.size();
        const Event e = random_event(rt, rng);
        execute_event(rt, e);
        const std::string cur = rt.current().activity;

        if (cur != prev) {
            // Only forward entries are transitions the app itself defines;
            // Back pops and crash resets say nothing about launchability.
            if (rt.stack.size() > prev_depth) {
                graph = update_dynamic(graph, prev, cur);
            }
            tracker.visit(cur);
            blocked.clear();  // organic progress unblocks the stuck activity
            restart_escape_pending = false;
        }
        tracker.observe_state(rt);

        const bool fired = cfg.ablations.wdld ? false : monitor.loop_step(rt.current().hash);
        if (!fired) continue;
        ++tracker.report.loop_detections;
        if (cfg.policy != Policy::Guided) continue;

        if (cfg.ablations.wgea) {
            restart(rt);
            ++tracker.report.restarts;
            tracker.visit(rt.current().activity);
            tracker.observe_state(rt);
            continue;
        }

        std::set<std::string> excluded = blocked;
        excluded.insert(cur);
        const auto target =
            adjacent_accessible(graph, cur, usable, rt.stack_activities(), rt.globals, excluded,
                                tracker.visits, cfg.fax_mode);
        if (!target) {
            if (restart_escape_pending) {
                tracker.report.early_terminated = true;
                break;
            }
            restart(rt);
            ++tracker.report.restarts;
            restart_escape_pending = true;
            tracker.visit(rt.current().activity);
            tracker.observe_state(rt);
            continue;
        }

        if (target->kind == LaunchKind::StackPop) {
            launch_dynamic(rt, target->activity);
            tracker.visit(target->activity);
        } else {
            const LaunchOutcome outcome = launch_via_deeplink(rt, usable[target->launcher_index]);
            if (outcome == LaunchOutcome::Launched) {
                tracker.visit(target->activity);
            } else if (outcome == LaunchOutcome::Crashed) {
                tracker.visit(rt.current().activity);  // reset landed on the initial activity
            }
        }
        tracker.report.interventions.push_back({rt.event_count, target->activity, target->kind});
        blocked = {cur};
        restart_escape_pending = false;
        tracker.observe_state(rt);
    }

    ExplorationReport report = std::move(tracker.report);
    report.event_count = rt.event_count;
    report.elapsed_ticks = rt.event_count * cfg.event_interval_ticks;
    report.covered_methods = rt.covered_methods;
    report.crashes = rt.crash_log;
    report.final_atg = std::move(graph);
    return report;
}

std::string report_to_json(const ExplorationReport& report) {
    ordered_json j;
    ordered_json cfg;
    cfg["policy"] = to_string(report.config.policy);
    cfg["event_budget"] = report.config.event_budget;
    cfg["seed"] = report.config.seed;
    ordered_json ablations = ordered_json::array();
    if (report.config.ablations.wacm) ablations.push_back("wacm");
    if (report.config.ablations.wdld) ablations.push_back("wdld");
    if (report.config.ablations.wgea) ablations.push_back("wgea");
    cfg["ablations"] = std::move(ablations);
    cfg["fax_mode"] = report.config.fax_mode;
    cfg["event_interval_ticks"] = report.config.event_interval_ticks;
    cfg["max_repetition_threshold"] = report.config.max_repetition_threshold;
    cfg["max_queue_size"] = report.config.max_queue_size;
    j["config"] = std::move(cfg);

    j["event_count"] = report.event_count;
    j["elapsed_ticks"] = report.elapsed_ticks;
    j["early_terminated"] = report.early_terminated;
    j["visited_activities"] = report.visited_activities;
    ordered_json visits = ordered_json::object();
    for (const auto& [activity, count] : report.visit_counts) visits[activity] = count;
    j["visit_counts"] = std::move(visits);
    ordered_json states = ordered_json::array();
    for (std::uint64_t h : report.unique_states) states.push_back(hash_to_hex(h));
    j["unique_states"] = std::move(states);
    j["covered_methods"] = report.covered_methods;

    ordered_json crashes = ordered_json::array();
    for (const auto& crash : report.crashes) {
        ordered_json c;
        c["stack_trace_id"] = crash.stack_trace_id;
        c["activity"] = crash.activity;
        c["state"] = crash.state_id;
        if (crash.triggering_event) c["event"] = event_to_json(*crash.triggering_event);
        c["launched_by"] = to_string(crash.launched_by);
        c["event_index"] = crash.event_index;
        crashes.push_back(std::move(c));
    }
    j["crashes"] = std::move(crashes);

    ordered_json interventions = ordered_json::array();
    for (const auto& intervention : report.interventions) {
        ordered_json i;
        i["event_index"] = intervention.event_index;
        i["target"] = intervention.target;
        i["kind"] = to_string(intervention.kind);
        interventions.push_back(std::move(i));
    }
    j["interventions"] = std::move(interventions);
    j["restarts"] = report.restarts;
    j["loop_detections"] = report.loop_detections;

    ordered_json atg;
    atg["nodes"] = report.final_atg.nodes;
    ordered_json edges = ordered_json::array();
    for (const auto& e : report.final_atg.edges) {
        ordered_json edge;
        edge["from"] = e.from;
        edge["to"] = e.to;
        edge["provenance"] = e.provenance == EdgeProvenance::Static ? "static" : "dynamic";
        edges.push_back(std::move(edge));
    }
    atg["edges"] = std::move(edges);
    j["atg"] = std::move(atg);

    return j.dump(2) + "\n";
}

ExplorationReport report_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(std::string("invalid report json: ") + e.what());
    }
    ExplorationReport report;
    const json cfg = j.value("config", json::object());
    report.config.policy =
        cfg.value("policy", "guided") == std::string("random") ? Policy::RandomOnly
                                                               : Policy::Guided;
    report.config.event_budget = cfg.value("event_budget", 0ULL);
    report.config.seed = cfg.value("seed", 0ULL);
    const json ablation_list = cfg.value("ablations", json::array());
    for (const auto& a : ablation_list) {
        const std::string name = a.get<std::string>();
        if (name == "wacm") report.config.ablations.wacm = true;
        if (name == "wdld") report.config.ablations.wdld = true;
        if (name == "wgea") report.config.ablations.wgea = true;
    }
    report.config.fax_mode = cfg.value("fax_mode", false);
    report.config.event_interval_ticks = cfg.value("event_interval_ticks", 1ULL);
    report.config.max_repetition_threshold = cfg.value("max_repetition_threshold", std::size_t{50});
    report.config.max_queue_size = cfg.value("max_queue_size", std::size_t{200});

    report.event_count = j.value("event_count", 0ULL);
    report.elapsed_ticks = j.value("elapsed_ticks", 0ULL);
    report.early_terminated = j.value("early_terminated", false);
    const json visited_list = j.value("visited_activities", json::array());
    for (const auto& a : visited_list) {
        report.visited_activities.insert(a.get<std::string>());
    }
    const json visits_doc = j.value("visit_counts", json::object());
    for (const auto& [activity, count] : visits_doc.items()) {
        report.visit_counts[activity] = count.get<std::uint64_t>();
    }
    const json state_list = j.value("unique_states", json::array());
    for (const auto& s : state_list) {
        report.unique_states.insert(hash_from_hex(s.get<std::string>()));
    }
    const json method_list = j.value("covered_methods", json::array());
    for (const auto& m : method_list) {
        report.covered_methods.insert(m.get<std::string>());
    }
    const json crash_list = j.value("crashes", json::array());
    for (const auto& c : crash_list) {
        CrashRecord crash;
        crash.stack_trace_id = c.value("stack_trace_id", "");
        crash.activity = c.value("activity", "");
        crash.state_id = c.value("state", "");
        if (c.contains("event")) crash.triggering_event = event_from_json(c.at("event"));
        crash.launched_by = c.value("launched_by", "organic") == std::string("deep_link")
                                ? LaunchedBy::DeepLink
                                : LaunchedBy::Organic;
        crash.event_index = c.value("event_index", 0ULL);
        report.crashes.push_back(std::move(crash));
    }
    const json intervention_list = j.value("interventions", json::array());
    for (const auto& i : intervention_list) {
        Intervention intervention;
        intervention.event_index = i.value("event_index", 0ULL);
        intervention.target = i.value("target", "");
        intervention.kind = i.value("kind", "deep_link") == std::string("stack_pop")
                                ? LaunchKind::StackPop
                                : LaunchKind::DeepLink;
        report.interventions.push_back(std::move(intervention));
    }
    report.restarts = j.value("restarts", 0ULL);
    report.loop_detections = j.value("loop_detections", 0ULL);

    const json atg = j.value("atg", json::object());
    const json node_list = atg.value("nodes", json::array());
    for (const auto& n : node_list) {
        report.final_atg.nodes.insert(n.get<std::string>());
    }
    const json edge_list = atg.value("edges", json::array());
    for (const auto& e : edge_list) {
        report.final_atg.edges.insert(
            {e.value("from", ""), e.value("to", ""),
             e.value("provenance", "static") == std::string("dynamic") ? EdgeProvenance::Dynamic
                                                                       : EdgeProvenance::Static});
    }
    return report;
}

}  // namespace delm
