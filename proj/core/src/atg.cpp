#include "delm/atg.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace delm {

namespace {

struct Candidate {
    std::uint64_t visits = 0;
    bool explored = false;
    std::string activity;
    LaunchKind kind = LaunchKind::DeepLink;
    std::size_t launcher_index = 0;

    // Fewest prior visits, then unexplored first, then name.
    bool operator<(const Candidate& other) const {
        if (visits != other.visits) return visits < other.visits;
        if (explored != other.explored) return !explored;
        return activity < other.activity;
    }
};

}  // namespace

std::vector<std::string> Atg::out_neighbors(const std::string& from) const {
    std::set<std::string> unique;
    for (const auto& e : edges) {
        if (e.from == from) unique.insert(e.to);
    }
    return {unique.begin(), unique.end()};
}

std::string Atg::to_dot() const {
    std::ostringstream out;
    out << "digraph atg {\n";
    for (const auto& node : nodes) {
        out << "  \"" << node << "\";\n";
    }
    for (const auto& e : edges) {
        out << "  \"" << e.from << "\" -> \"" << e.to << "\"";
        if (e.provenance == EdgeProvenance::Dynamic) out << " [style=dashed]";
        out << ";\n";
    }
    out << "}\n";
    return out.str();
}

Atg build_static_atg(const Manifest& m, const std::vector<IntentLink>& links) {
    Atg g;
    for (const auto& activity : m.activities) {
        g.nodes.insert(activity.name);
    }
    for (const auto& link : links) {
        g.nodes.insert(link.sender);
        g.nodes.insert(link.receiver);
        g.edges.insert({link.sender, link.receiver, EdgeProvenance::Static});
    }
    return g;
}

Atg update_dynamic(const Atg& g, const std::string& prev, const std::string& cur) {
    assert(prev != cur);
    Atg next = g;
    next.nodes.insert(prev);
    next.nodes.insert(cur);
    next.edges.insert({prev, cur, EdgeProvenance::Dynamic});
    return next;
}

std::string to_string(LaunchKind kind) {
    return kind == LaunchKind::StackPop ? "stack_pop" : "deep_link";
}

std::optional<NextTarget> adjacent_accessible(
    const Atg& g, const std::string& current, const std::vector<ActivityLauncher>& launchers,
    const std::vector<std::string>& visited_stack, const GlobalState& globals,
    const std::set<std::string>& blocked, const std::map<std::string, std::uint64_t>& visit_counts,
    bool ignore_preconditions) {
    auto usable_launcher = [&](const std::string& activity) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < launchers.size(); ++i) {
            const ActivityLauncher& l = launchers[i];
            if (l.target != activity || l.status != LauncherStatus::Ready) continue;
            if (ignore_preconditions || check_context_ready(l, globals)) return i;
        }
        return std::nullopt;
    };

    auto on_stack = [&](const std::string& activity) {
        return std::find(visited_stack.begin(), visited_stack.end(), activity) !=
               visited_stack.end();
    };

    auto pick = [&](const std::set<std::string>& ring) -> std::optional<NextTarget> {
        std::optional<Candidate> best;
        for (const auto& activity : ring) {
            if (activity == current || blocked.count(activity) > 0) continue;

            Candidate c;
            c.activity = activity;
            auto it = visit_counts.find(activity);
            c.visits = it == visit_counts.end() ? 0 : it->second;
            c.explored = c.visits > 0;
            if (on_stack(activity)) {
                c.kind = LaunchKind::StackPop;
            } else if (auto idx = usable_launcher(activity)) {
                c.kind = LaunchKind::DeepLink;
                c.launcher_index = *idx;
            } else {
                continue;
            }
            if (!best || c < *best) best = c;
        }
        if (!best) return std::nullopt;
        return NextTarget{best->activity, best->kind, best->launcher_index};
    };

    std::set<std::string> ring;
    for (const auto& n : g.out_neighbors(current)) ring.insert(n);
    if (auto target = pick(ring)) return target;

    ring.clear();
    for (const auto& entry : visited_stack) {
        for (const auto& n : g.out_neighbors(entry)) ring.insert(n);
    }
    if (auto target = pick(ring)) return target;

    return pick(g.nodes);
}

}  // namespace delm
