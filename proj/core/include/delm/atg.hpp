#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "delm/icc.hpp"
#include "delm/manifest.hpp"

namespace delm {

enum class EdgeProvenance { Static, Dynamic };

struct AtgEdge {
    std::string from;
    std::string to;
    EdgeProvenance provenance = EdgeProvenance::Static;

    friend bool operator==(const AtgEdge&, const AtgEdge&) = default;
    friend auto operator<=>(const AtgEdge&, const AtgEdge&) = default;
};

// The activity transition graph. Values are immutable snapshots; updates
// return a new graph, so snapshots can be shared freely.
struct Atg {
    std::set<std::string> nodes;
    std::set<AtgEdge> edges;

    bool has_edge(const std::string& from, const std::string& to,
                  EdgeProvenance provenance) const {
        return edges.count({from, to, provenance}) > 0;
    }

    // Out-neighbors over both edge provenances, sorted by name.
    std::vector<std::string> out_neighbors(const std::string& from) const;

    std::string to_dot() const;

    friend bool operator==(const Atg&, const Atg&) = default;
};

// Nodes are all declared activities; one Static edge per distinct
// (sender, receiver) pair in the links.
Atg build_static_atg(const Manifest& m, const std::vector<IntentLink>& links);

// Adds a Dynamic edge prev->cur, creating nodes as needed. Idempotent and
// monotone. Requires prev != cur.
Atg update_dynamic(const Atg& g, const std::string& prev, const std::string& cur);

enum class LaunchKind { StackPop, DeepLink };

std::string to_string(LaunchKind kind);

struct NextTarget {
    std::string activity;
    LaunchKind kind = LaunchKind::DeepLink;
    std::size_t launcher_index = 0;  // meaningful for DeepLink
};

// Picks the next activity to launch when exploration is stuck at `current`.
// Candidates are considered ring by ring: out-neighbors of current, then
// out-neighbors of every back-stack activity, then the whole graph. A
// candidate qualifies when it sits on the back stack (relaunchable) or has a
// Ready launcher whose preconditions hold. Ties break on fewest prior
// visits, then unexplored before explored, then activity name. Returns
// nothing when no candidate qualifies anywhere.
//
// `ignore_preconditions` drops the check_context_ready gate; it exists for
// the deliberately unsafe launch mode used in false-positive experiments.
std::optional<NextTarget> adjacent_accessible(
    const Atg& g, const std::string& current, const std::vector<ActivityLauncher>& launchers,
    const std::vector<std::string>& visited_stack, const GlobalState& globals,
    const std::set<std::string>& blocked, const std::map<std::string, std::uint64_t>& visit_counts,
    bool ignore_preconditions = false);

}  // namespace delm
