#include "delm/icc.hpp"

#include <algorithm>
#include <sstream>

#include "delm/errors.hpp"

namespace delm {

namespace {

// Per-variable state while walking a trace: a scalar slot or an intent under
// construction.
struct IntentState {
    Resolution explicit_target;
    ResolvedContext ctx;
    bool declared = false;  // introduced via NewIntent
};

struct TraceWalk {
    std::map<std::string, Resolution> env;
    std::map<std::string, IntentState> intents;
    std::vector<std::string> intent_order;
    std::optional<std::string> started_intent;

    IntentState& intent(const std::string& var) {
        auto [it, inserted] = intents.try_emplace(var);
        if (inserted) intent_order.push_back(var);
        return it->second;
    }

    Resolution resolve_operand(const Operand& op, const std::string& trace_id) const {
        if (op.literal) return Resolution::constant(*op.literal);
        if (!op.var) throw MalformedTrace("empty operand in trace " + trace_id);
        auto it = env.find(*op.var);
        if (it == env.end()) {
            throw MalformedTrace("use of undefined variable '" + *op.var + "' in trace " +
                                 trace_id);
        }
        return it->second;
    }
};

Resolution join_resolutions(const Resolution& a, const Resolution& b) {
    // Merging two writes of the same slot from a field list: equal constants
    // stay constant, anything else is ambiguous.
    if (a.is_constant() && b.is_constant() && a == b) return a;
    return Resolution::unresolved();
}

ResolvedExtra make_field_extra(ExtraKind kind, const std::vector<Operand>& args,
                               const TraceWalk& walk, const std::string& trace_id) {
    // args = [key, field-name, field-value, field-name, field-value, ...]
    if (args.size() % 2 == 0) {
        throw MalformedTrace("field extra needs name/value pairs after the key in trace " +
                             trace_id);
    }
    ResolvedExtra extra;
    extra.kind = kind;
    std::map<std::string, Resolution> fields;
    for (std::size_t i = 1; i + 1 < args.size(); i += 2) {
        Resolution name = walk.resolve_operand(args[i], trace_id);
        if (!name.is_constant() || !std::holds_alternative<std::string>(*name.value)) {
            throw MalformedTrace("extra field names must be constant strings in trace " +
                                 trace_id);
        }
        const std::string field = std::get<std::string>(*name.value);
        Resolution value = walk.resolve_operand(args[i + 1], trace_id);
        auto it = fields.find(field);
        fields[field] = it == fields.end() ? value : join_resolutions(it->second, value);
    }
    for (const auto& [field, res] : fields) {
        if (!res.is_constant()) {
            extra.unresolved = true;
            extra.fields.clear();
            return extra;
        }
        extra.fields[field] = *res.value;
    }
    return extra;
}

std::string require_constant_string(const Resolution& res, const char* what,
                                    const std::string& trace_id) {
    if (!res.is_constant() || !std::holds_alternative<std::string>(*res.value)) {
        throw MalformedTrace(std::string(what) + " must be a constant string in trace " +
                             trace_id);
    }
    return std::get<std::string>(*res.value);
}

const Operand& single_arg(const Call& call, const std::string& trace_id) {
    if (call.args.size() != 1) {
        throw MalformedTrace(to_string(call.method) + " takes exactly one argument in trace " +
                             trace_id);
    }
    return call.args.front();
}

TraceWalk walk_trace(const SenderTrace& trace) {
    TraceWalk walk;
    for (const auto& stmt : trace.statements) {
        if (const auto* assign = std::get_if<ConstAssign>(&stmt)) {
            walk.env[assign->var] = Resolution::constant(assign->value);
        } else if (const auto* join = std::get_if<BranchJoin>(&stmt)) {
            walk.env[join->var] = join->values.size() == 1
                                      ? Resolution::constant(join->values.front())
                                      : Resolution::unresolved();
        } else if (const auto* ni = std::get_if<NewIntent>(&stmt)) {
            IntentState& intent = walk.intent(ni->var);
            intent = IntentState{};
            intent.declared = true;
            if (ni->explicit_target) {
                intent.explicit_target = Resolution::constant(*ni->explicit_target);
            }
        } else if (const auto* call = std::get_if<Call>(&stmt)) {
            IntentState& intent = walk.intent(call->receiver_var);
            switch (call->method) {
                case MethodKind::SetAction:
                    intent.ctx.action = walk.resolve_operand(single_arg(*call, trace.id), trace.id);
                    break;
                case MethodKind::SetType:
                    intent.ctx.type_attr =
                        walk.resolve_operand(single_arg(*call, trace.id), trace.id);
                    break;
                case MethodKind::SetData:
                    intent.ctx.data_uri =
                        walk.resolve_operand(single_arg(*call, trace.id), trace.id);
                    break;
                case MethodKind::SetFlags:
                    intent.ctx.flags = walk.resolve_operand(single_arg(*call, trace.id), trace.id);
                    break;
                case MethodKind::SetIdentifier:
                    intent.ctx.identifier =
                        walk.resolve_operand(single_arg(*call, trace.id), trace.id);
                    break;
                case MethodKind::SetClass:
                case MethodKind::SetClassName:
                case MethodKind::SetComponent:
                    intent.explicit_target =
                        walk.resolve_operand(single_arg(*call, trace.id), trace.id);
                    break;
                case MethodKind::PutExtraPrimary: {
                    if (call->args.size() != 2) {
                        throw MalformedTrace("PutExtraPrimary takes key and value in trace " +
                                             trace.id);
                    }
                    const std::string key = require_constant_string(
                        walk.resolve_operand(call->args[0], trace.id), "extra key", trace.id);
                    Resolution value = walk.resolve_operand(call->args[1], trace.id);
                    ResolvedExtra extra;
                    extra.kind = ExtraKind::Primary;
                    if (value.is_constant()) {
                        extra.scalar = *value.value;
                    } else {
                        extra.unresolved = true;
                    }
                    intent.ctx.extras[key] = std::move(extra);
                    break;
                }
                case MethodKind::PutExtraObject:
                case MethodKind::PutExtraBundle: {
                    if (call->args.empty()) {
                        throw MalformedTrace("field extra needs a key in trace " + trace.id);
                    }
                    const std::string key = require_constant_string(
                        walk.resolve_operand(call->args[0], trace.id), "extra key", trace.id);
                    ExtraKind kind = call->method == MethodKind::PutExtraObject
                                         ? ExtraKind::Object
                                         : ExtraKind::Bundle;
                    intent.ctx.extras[key] = make_field_extra(kind, call->args, walk, trace.id);
                    break;
                }
                case MethodKind::StartActivity:
                    walk.started_intent = call->receiver_var;
                    break;
            }
        }
    }
    return walk;
}

// Picks the intent whose context the trace describes: the started one, or
// the sole (last-mentioned) intent when nothing was explicitly started.
const IntentState* select_intent(const TraceWalk& walk) {
    if (walk.started_intent) {
        auto it = walk.intents.find(*walk.started_intent);
        return it == walk.intents.end() ? nullptr : &it->second;
    }
    if (walk.intent_order.empty()) return nullptr;
    return &walk.intents.at(walk.intent_order.back());
}

bool scalar_matches_uri(const ScalarValue& value, const DataSpec& spec) {
    if (!std::holds_alternative<std::string>(value)) return false;
    const std::string& uri = std::get<std::string>(value);
    if (!spec.scheme || !spec.host) return false;

    const std::string prefix = *spec.scheme + "://" + *spec.host;
    if (uri.rfind(prefix, 0) != 0) return false;
    std::string rest = uri.substr(prefix.size());
    if (auto query = rest.find('?'); query != std::string::npos) rest = rest.substr(0, query);
    if (!spec.path) return rest.empty() || rest[0] == '/';
    std::string want = *spec.path;
    if (!want.empty() && want[0] != '/') want = "/" + want;
    return rest == want;
}

bool filter_accepts(const IntentFilter& filter, const ResolvedContext& ctx) {
    if (filter.actions.empty()) return false;
    if (!ctx.action.is_constant() || !std::holds_alternative<std::string>(*ctx.action.value)) {
        return false;
    }
    if (!filter.has_action(std::get<std::string>(*ctx.action.value))) return false;

    const bool filter_wants_data = std::any_of(
        filter.data_specs.begin(), filter.data_specs.end(),
        [](const DataSpec& s) { return s.scheme.has_value(); });

    if (ctx.data_uri.is_unresolved()) return false;
    if (ctx.data_uri.is_absent()) return !filter_wants_data;
    if (!filter_wants_data) return false;
    return std::any_of(filter.data_specs.begin(), filter.data_specs.end(),
                       [&](const DataSpec& s) { return scalar_matches_uri(*ctx.data_uri.value, s); });
}

}  // namespace

std::string to_string(ExtraKind kind) {
    switch (kind) {
        case ExtraKind::Primary: return "primary";
        case ExtraKind::Object: return "object";
        case ExtraKind::Bundle: return "bundle";
    }
    return "?";
}

std::string to_string(LauncherStatus status) {
    return status == LauncherStatus::Ready ? "ready" : "conservative-skip";
}

bool ResolvedContext::fully_resolved() const {
    for (const Resolution* r : {&action, &type_attr, &data_uri, &flags, &identifier}) {
        if (r->is_unresolved()) return false;
    }
    for (const auto& [key, extra] : extras) {
        if (extra.unresolved) return false;
    }
    return true;
}

ResolvedContext resolve_context(const SenderTrace& trace) {
    TraceWalk walk = walk_trace(trace);
    const IntentState* intent = select_intent(walk);
    return intent == nullptr ? ResolvedContext{} : intent->ctx;
}

std::vector<IntentLink> match_intent_pairs(const std::vector<SenderTrace>& traces,
                                           const Manifest& m) {
    std::vector<IntentLink> links;
    for (const auto& trace : traces) {
        if (!m.declares_activity(trace.sender_activity)) {
            throw UnknownActivity(trace.sender_activity);
        }
        TraceWalk walk = walk_trace(trace);
        const IntentState* intent = select_intent(walk);
        if (intent == nullptr) continue;

        if (intent->explicit_target.is_constant()) {
            if (!std::holds_alternative<std::string>(*intent->explicit_target.value)) continue;
            const std::string target = std::get<std::string>(*intent->explicit_target.value);
            if (!m.declares_activity(target)) throw UnknownActivity(target);
            links.push_back({trace.sender_activity, target, LinkKind::Explicit, intent->ctx});
            continue;
        }
        if (intent->explicit_target.is_unresolved()) continue;  // conservative

        for (const auto& activity : m.activities) {
            for (const auto& filter : activity.intent_filters) {
                if (filter.has_wildcard()) continue;
                if (filter_accepts(filter, intent->ctx)) {
                    links.push_back({trace.sender_activity, activity.name,
                                     LinkKind::ImplicitMatched, intent->ctx});
                    break;  // one link per (trace, receiver)
                }
            }
        }
    }
    return links;
}

std::vector<ActivityLauncher> build_launchers(
    const std::vector<IntentLink>& links, const std::vector<DeepLink>& deep_links,
    const std::map<std::string, std::vector<ContextRequirement>>& requirements) {
    std::vector<ActivityLauncher> launchers;
    for (const auto& link : links) {
        const DeepLink* dl = nullptr;
        for (const auto& candidate : deep_links) {
            if (candidate.activity == link.receiver) {
                dl = &candidate;
                break;
            }
        }
        if (dl == nullptr) throw MissingDeepLink(link.receiver);

        const bool duplicate = std::any_of(
            launchers.begin(), launchers.end(), [&](const ActivityLauncher& l) {
                return l.target == link.receiver && l.context == link.context;
            });
        if (duplicate) continue;

        ActivityLauncher launcher;
        launcher.target = link.receiver;
        launcher.deep_link = *dl;
        launcher.context = link.context;
        if (auto it = requirements.find(link.receiver); it != requirements.end()) {
            launcher.preconditions = it->second;
            std::sort(launcher.preconditions.begin(), launcher.preconditions.end());
        }
        launcher.status = link.context.fully_resolved() ? LauncherStatus::Ready
                                                        : LauncherStatus::ConservativeSkip;
        launchers.push_back(std::move(launcher));
    }
    return launchers;
}

bool check_context_ready(const ActivityLauncher& launcher, const GlobalState& globals) {
    for (const auto& req : launcher.preconditions) {
        if (req.kind == RequirementKind::DeviceConfig) continue;  // always granted
        auto it = globals.find(req.key);
        if (it == globals.end() || !(it->second == req.expected)) return false;
    }
    return true;
}

std::string context_summary(const ResolvedContext& ctx) {
    std::ostringstream out;
    auto emit_attr = [&](const char* name, const Resolution& res) {
        if (res.is_absent()) return;
        out << name << '=';
        out << (res.is_constant() ? scalar_to_string(*res.value) : std::string("?"));
        out << ';';
    };
    emit_attr("action", ctx.action);
    emit_attr("type", ctx.type_attr);
    emit_attr("data", ctx.data_uri);
    emit_attr("flags", ctx.flags);
    emit_attr("id", ctx.identifier);
    if (!ctx.extras.empty()) {
        out << "extras{";
        bool first = true;
        for (const auto& [key, extra] : ctx.extras) {
            if (!first) out << ',';
            first = false;
            out << key << ':';
            if (extra.unresolved) {
                out << '?';
            } else if (extra.kind == ExtraKind::Primary) {
                out << scalar_to_string(*extra.scalar);
            } else {
                out << to_string(extra.kind) << '(';
                bool f2 = true;
                for (const auto& [field, value] : extra.fields) {
                    if (!f2) out << ',';
                    f2 = false;
                    out << field << '=' << scalar_to_string(value);
                }
                out << ')';
            }
        }
        out << '}';
    }
    std::string s = out.str();
    if (s.empty()) s = "-";
    return s;
}

}  // namespace delm
