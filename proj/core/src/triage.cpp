#include "delm/triage.hpp"

#include <deque>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "delm/errors.hpp"

namespace delm {

namespace {

using nlohmann::ordered_json;

// Search node: the parts of a Runtime that determine future behavior.
struct SearchNode {
    std::vector<StackEntry> stack;
    GlobalState globals;
    std::vector<WitnessStep> path;
};

std::string node_key(const SearchNode& node) {
    std::ostringstream out;
    for (const auto& entry : node.stack) {
        out << entry.activity << '@' << entry.state_id << '|';
    }
    out << '#';
    for (const auto& [key, value] : node.globals) {
        out << key << '=' << scalar_to_string(value) << ';';
    }
    return out.str();
}

Runtime runtime_for(const SimApp& app, const SearchNode& node) {
    Runtime rt = make_runtime(app, 0);
    rt.stack = node.stack;
    rt.globals = node.globals;
    return rt;
}

// Moves worth exploring from a node: every defined transition of the
// current state, Back (when it pops), and a relaunch of each distinct
// activity below the top of the stack.
std::vector<WitnessStep> candidate_moves(const SimApp& app, const SearchNode& node) {
    std::vector<WitnessStep> moves;
    const StackEntry& top = node.stack.back();
    const StateSpec& state = app.activity(top.activity).states.at(top.state_id);
    for (const auto& [key, transition] : state.transitions) {
        moves.push_back(WitnessStep::of_event(Event::ui(key.component_id, key.action)));
    }
    if (node.stack.size() > 1) {
        moves.push_back(WitnessStep::of_event(Event::back()));
    }
    std::set<std::string> launch_targets;
    for (std::size_t i = 0; i + 1 < node.stack.size(); ++i) {
        launch_targets.insert(node.stack[i].activity);
    }
    for (const auto& target : launch_targets) {
        moves.push_back(WitnessStep::of_launch(target));
    }
    return moves;
}

std::vector<std::string> activity_path(const SimApp& app, const std::vector<WitnessStep>& path) {
    Runtime rt = make_runtime(app, 0);
    std::vector<std::string> activities{rt.current().activity};
    for (const auto& step : path) {
        if (step.kind == WitnessStep::Kind::UiEvent) {
            execute_event(rt, step.event);
        } else {
            launch_dynamic(rt, step.target);
        }
        if (activities.back() != rt.current().activity) {
            activities.push_back(rt.current().activity);
        }
    }
    return activities;
}

}  // namespace

std::string to_string(Classification c) {
    return c == Classification::TruePositive ? "true_positive" : "false_positive";
}

std::string to_string(const WitnessStep& step) {
    if (step.kind == WitnessStep::Kind::StackLaunch) return "relaunch(" + step.target + ")";
    return to_string(step.event);
}

TriageVerdict classify(const SimApp& app, const CrashRecord& record, std::uint64_t depth_limit) {
    TriageVerdict verdict;
    verdict.record = record;
    verdict.depth_used = depth_limit;

    std::deque<SearchNode> frontier;
    std::set<std::string> seen;

    SearchNode start;
    {
        Runtime rt = make_runtime(app, 0);
        start.stack = rt.stack;
        start.globals = rt.globals;
    }
    seen.insert(node_key(start));
    frontier.push_back(std::move(start));

    while (!frontier.empty()) {
        SearchNode node = std::move(frontier.front());
        frontier.pop_front();
        if (node.path.size() >= depth_limit) continue;

        for (const auto& move : candidate_moves(app, node)) {
            Runtime rt = runtime_for(app, node);
            if (move.kind == WitnessStep::Kind::UiEvent) {
                execute_event(rt, move.event);
            } else {
                launch_dynamic(rt, move.target);
            }

            if (!rt.crash_log.empty()) {
                if (rt.crash_log.back().stack_trace_id == record.stack_trace_id) {
                    verdict.classification = Classification::TruePositive;
                    auto witness = node.path;
                    witness.push_back(move);
                    verdict.witness_activities = activity_path(app, node.path);
                    const std::string& crash_activity = rt.crash_log.back().activity;
                    if (verdict.witness_activities.empty() ||
                        verdict.witness_activities.back() != crash_activity) {
                        verdict.witness_activities.push_back(crash_activity);
                    }
                    verdict.witness = std::move(witness);
                    return verdict;
                }
                continue;  // a different crash ends this branch
            }

            SearchNode next;
            next.stack = std::move(rt.stack);
            next.globals = std::move(rt.globals);
            if (!seen.insert(node_key(next)).second) continue;
            next.path = node.path;
            next.path.push_back(move);
            frontier.push_back(std::move(next));
        }
    }

    verdict.classification = Classification::FalsePositive;
    return verdict;
}

std::vector<CrashRecord> dedupe(const std::vector<CrashRecord>& crashes) {
    std::vector<CrashRecord> result;
    std::map<std::string, std::size_t> index_by_id;
    for (const auto& crash : crashes) {
        auto it = index_by_id.find(crash.stack_trace_id);
        if (it == index_by_id.end()) {
            index_by_id[crash.stack_trace_id] = result.size();
            result.push_back(crash);
        } else if (crash.event_index < result[it->second].event_index) {
            result[it->second] = crash;
        }
    }
    return result;
}

std::vector<TriageVerdict> verdicts_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(std::string("invalid verdicts json: ") + e.what());
    }
    std::vector<TriageVerdict> verdicts;
    for (const auto& v : doc) {
        TriageVerdict verdict;
        verdict.record.stack_trace_id = v.value("stack_trace_id", "");
        verdict.classification = v.value("classification", "false_positive") ==
                                         std::string("true_positive")
                                     ? Classification::TruePositive
                                     : Classification::FalsePositive;
        if (v.contains("witness_activities")) {
            for (const auto& a : v.at("witness_activities")) {
                verdict.witness_activities.push_back(a.get<std::string>());
            }
        }
        verdict.depth_used = v.value("depth_used", 0ULL);
        verdicts.push_back(std::move(verdict));
    }
    return verdicts;
}

std::string verdicts_to_json(const std::vector<TriageVerdict>& verdicts) {
    ordered_json out = ordered_json::array();
    for (const auto& verdict : verdicts) {
        ordered_json v;
        v["stack_trace_id"] = verdict.record.stack_trace_id;
        v["classification"] = to_string(verdict.classification);
        if (verdict.witness) {
            ordered_json steps = ordered_json::array();
            for (const auto& step : *verdict.witness) steps.push_back(to_string(step));
            v["witness"] = std::move(steps);
            v["witness_activities"] = verdict.witness_activities;
        }
        v["depth_used"] = verdict.depth_used;
        out.push_back(std::move(v));
    }
    return out.dump(2) + "\n";
}

}  // namespace delm
