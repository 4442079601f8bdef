#pragma once

// Brute-force reference implementations used only by tests. Each one checks
// a library result by a different route: enumeration instead of dataflow,
// exhaustive search instead of BFS bookkeeping, rescanning instead of
// incremental counting.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "delm/atg.hpp"
#include "delm/icc.hpp"
#include "delm/runtime.hpp"
#include "delm/simapp.hpp"
#include "delm/trace.hpp"

namespace oracles {

// ---------------------------------------------------------------------------
// Context resolution by branch enumeration.

struct ConcreteExtra {
    delm::ExtraKind kind = delm::ExtraKind::Primary;
    std::optional<delm::ScalarValue> scalar;
    std::map<std::string, delm::ScalarValue> fields;

    friend bool operator==(const ConcreteExtra&, const ConcreteExtra&) = default;
};

struct ConcreteContext {
    std::optional<delm::ScalarValue> action, type_attr, data_uri, flags, identifier;
    std::map<std::string, ConcreteExtra> extras;
};

inline std::size_t count_branch_joins(const delm::SenderTrace& trace) {
    std::size_t n = 0;
    for (const auto& stmt : trace.statements) {
        if (std::holds_alternative<delm::BranchJoin>(stmt)) ++n;
    }
    return n;
}

// Runs the trace with one concrete choice per BranchJoin occurrence.
inline ConcreteContext run_concrete(const delm::SenderTrace& trace,
                                    const std::vector<std::size_t>& choices) {
    std::map<std::string, delm::ScalarValue> env;
    struct Intent {
        std::optional<std::string> target;
        ConcreteContext ctx;
    };
    std::map<std::string, Intent> intents;
    std::vector<std::string> order;
    std::optional<std::string> started;
    std::size_t join_index = 0;

    auto intent_of = [&](const std::string& var) -> Intent& {
        if (intents.find(var) == intents.end()) order.push_back(var);
        return intents[var];
    };
    auto value_of = [&](const delm::Operand& op) -> delm::ScalarValue {
        if (op.literal) return *op.literal;
        return env.at(*op.var);
    };

    for (const auto& stmt : trace.statements) {
        if (const auto* a = std::get_if<delm::ConstAssign>(&stmt)) {
            env[a->var] = a->value;
        } else if (const auto* j = std::get_if<delm::BranchJoin>(&stmt)) {
            env[j->var] = j->values[choices[join_index++]];
        } else if (const auto* ni = std::get_if<delm::NewIntent>(&stmt)) {
            Intent& intent = intent_of(ni->var);
            intent = Intent{};
            intent.target = ni->explicit_target;
        } else if (const auto* c = std::get_if<delm::Call>(&stmt)) {
            Intent& intent = intent_of(c->receiver_var);
            using MK = delm::MethodKind;
            switch (c->method) {
                case MK::SetAction: intent.ctx.action = value_of(c->args[0]); break;
                case MK::SetType: intent.ctx.type_attr = value_of(c->args[0]); break;
                case MK::SetData: intent.ctx.data_uri = value_of(c->args[0]); break;
                case MK::SetFlags: intent.ctx.flags = value_of(c->args[0]); break;
                case MK::SetIdentifier: intent.ctx.identifier = value_of(c->args[0]); break;
                case MK::SetClass:
                case MK::SetClassName:
                case MK::SetComponent: break;  // target, not part of the context
                case MK::PutExtraPrimary: {
                    ConcreteExtra extra;
                    extra.kind = delm::ExtraKind::Primary;
                    extra.scalar = value_of(c->args[1]);
                    intent.ctx.extras[std::get<std::string>(*c->args[0].literal)] = extra;
                    break;
                }
                case MK::PutExtraObject:
                case MK::PutExtraBundle: {
                    ConcreteExtra extra;
                    extra.kind = c->method == MK::PutExtraObject ? delm::ExtraKind::Object
                                                                 : delm::ExtraKind::Bundle;
                    for (std::size_t i = 1; i + 1 < c->args.size(); i += 2) {
                        extra.fields[std::get<std::string>(value_of(c->args[i]))] =
                            value_of(c->args[i + 1]);
                    }
                    intent.ctx.extras[std::get<std::string>(*c->args[0].literal)] = extra;
                    break;
                }
                case MK::StartActivity: started = c->receiver_var; break;
            }
        }
    }

    if (started) return intents[*started].ctx;
    if (order.empty()) return {};
    return intents[order.back()].ctx;
}

// Enumerates every branch combination and folds the concrete results into a
// resolution verdict per slot: equal everywhere => constant, otherwise
// unresolved; never set => absent.
inline delm::ResolvedContext oracle_resolve_context(const delm::SenderTrace& trace) {
    std::vector<std::size_t> sizes;
    for (const auto& stmt : trace.statements) {
        if (const auto* j = std::get_if<delm::BranchJoin>(&stmt)) {
            sizes.push_back(j->values.size());
        }
    }

    std::vector<ConcreteContext> runs;
    std::vector<std::size_t> choices(sizes.size(), 0);
    for (;;) {
        runs.push_back(run_concrete(trace, choices));
        std::size_t i = 0;
        for (; i < sizes.size(); ++i) {
            if (++choices[i] < sizes[i]) break;
            choices[i] = 0;
        }
        if (i == sizes.size()) break;
    }

    auto fold_attr = [&](auto getter) {
        std::set<std::optional<delm::ScalarValue>> seen;
        for (const auto& run : runs) seen.insert(getter(run));
        if (seen.size() == 1) {
            const auto& only = *seen.begin();
            return only ? delm::Resolution::constant(*only) : delm::Resolution::absent();
        }
        return delm::Resolution::unresolved();
    };

    delm::ResolvedContext ctx;
    ctx.action = fold_attr([](const ConcreteContext& c) { return c.action; });
    ctx.type_attr = fold_attr([](const ConcreteContext& c) { return c.type_attr; });
    ctx.data_uri = fold_attr([](const ConcreteContext& c) { return c.data_uri; });
    ctx.flags = fold_attr([](const ConcreteContext& c) { return c.flags; });
    ctx.identifier = fold_attr([](const ConcreteContext& c) { return c.identifier; });

    std::set<std::string> keys;
    for (const auto& run : runs) {
        for (const auto& [key, extra] : run.extras) keys.insert(key);
    }
    for (const auto& key : keys) {
        delm::ResolvedExtra resolved;
        resolved.kind = runs.front().extras.at(key).kind;
        // Straight-line code sets the same keys in every run, so only value
        // disagreement matters.
        const ConcreteExtra& first = runs.front().extras.at(key);
        bool all_equal = true;
        for (const auto& run : runs) {
            if (!(run.extras.at(key) == first)) {
                all_equal = false;
                break;
            }
        }
        if (!all_equal) {
            resolved.unresolved = true;
        } else if (first.kind == delm::ExtraKind::Primary) {
            resolved.scalar = first.scalar;
        } else {
            resolved.fields = first.fields;
        }
        ctx.extras[key] = std::move(resolved);
    }
    return ctx;
}

// ---------------------------------------------------------------------------
// Static ATG by nested-loop dedup.

inline delm::Atg oracle_static_atg(const delm::Manifest& m,
                                   const std::vector<delm::IntentLink>& links) {
    delm::Atg g;
    for (const auto& activity : m.activities) g.nodes.insert(activity.name);
    for (const auto& link : links) {
        g.nodes.insert(link.sender);
        g.nodes.insert(link.receiver);
        bool duplicate = false;
        for (const auto& edge : g.edges) {
            if (edge.from == link.sender && edge.to == link.receiver &&
                edge.provenance == delm::EdgeProvenance::Static) {
                duplicate = true;
            }
        }
        if (!duplicate) {
            g.edges.insert({link.sender, link.receiver, delm::EdgeProvenance::Static});
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Loop window by naive rescan.

struct OracleLoopQueue {
    std::size_t threshold = 50;
    std::size_t capacity = 200;
    std::vector<std::uint64_t> queue;

    bool step(std::uint64_t h) {
        queue.push_back(h);
        if (queue.size() <= capacity) return false;
        std::size_t max_count = 0;
        for (std::uint64_t x : queue) {
            std::size_t count = 0;
            for (std::uint64_t y : queue) {
                if (x == y) ++count;
            }
            max_count = std::max(max_count, count);
        }
        if (max_count > threshold) {
            queue.clear();
            return true;
        }
        queue.erase(queue.begin());
        return false;
    }
};

// ---------------------------------------------------------------------------
// Crash reachability by exhaustive path enumeration (no dedup, no BFS).

inline bool oracle_crash_reachable(const delm::SimApp& app, const std::string& stack_trace_id,
                                   std::uint64_t depth_limit) {
    struct Frame {
        std::vector<delm::StackEntry> stack;
        delm::GlobalState globals;
        std::uint64_t depth;
    };

    delm::Runtime fresh = delm::make_runtime(app, 0);
    std::vector<Frame> frontier{{fresh.stack, fresh.globals, 0}};

    while (!frontier.empty()) {
        Frame frame = frontier.back();
        frontier.pop_back();
        if (frame.depth >= depth_limit) continue;

        const delm::StackEntry& top = frame.stack.back();
        const delm::StateSpec& state = app.activity(top.activity).states.at(top.state_id);

        std::vector<std::pair<bool, delm::Event>> events;
        for (const auto& [key, transition] : state.transitions) {
            events.push_back({true, delm::Event::ui(key.component_id, key.action)});
        }
        if (frame.stack.size() > 1) events.push_back({true, delm::Event::back()});

        std::set<std::string> relaunch;
        for (std::size_t i = 0; i + 1 < frame.stack.size(); ++i) {
            relaunch.insert(frame.stack[i].activity);
        }

        auto expand = [&](delm::Runtime&& rt) {
            if (!rt.crash_log.empty()) {
                return rt.crash_log.back().stack_trace_id == stack_trace_id ? 1 : -1;
            }
            frontier.push_back({std::move(rt.stack), std::move(rt.globals), frame.depth + 1});
            return 0;
        };

        for (const auto& [is_event, event] : events) {
            delm::Runtime rt = delm::make_runtime(app, 0);
            rt.stack = frame.stack;
            rt.globals = frame.globals;
            delm::execute_event(rt, event);
            if (expand(std::move(rt)) == 1) return true;
        }
        for (const auto& target : relaunch) {
            delm::Runtime rt = delm::make_runtime(app, 0);
            rt.stack = frame.stack;
            rt.globals = frame.globals;
            delm::launch_dynamic(rt, target);
            if (expand(std::move(rt)) == 1) return true;
        }
    }
    return false;
}

}  // namespace oracles
