#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "delm/manifest.hpp"
#include "delm/scalar.hpp"
#include "delm/trace.hpp"

namespace delm {

using GlobalState = std::map<std::string, ScalarValue>;

enum class ResolutionKind { Constant, Unresolved, Absent };

// The value an intent attribute resolves to after following its def-use
// chain: a single constant, ambiguous (branch-dependent), or never set.
struct Resolution {
    ResolutionKind kind = ResolutionKind::Absent;
    std::optional<ScalarValue> value;

    static Resolution constant(ScalarValue v) {
        return {ResolutionKind::Constant, std::move(v)};
    }
    static Resolution unresolved() { return {ResolutionKind::Unresolved, std::nullopt}; }
    static Resolution absent() { return {ResolutionKind::Absent, std::nullopt}; }

    bool is_constant() const { return kind == ResolutionKind::Constant; }
    bool is_unresolved() const { return kind == ResolutionKind::Unresolved; }
    bool is_absent() const { return kind == ResolutionKind::Absent; }

    friend bool operator==(const Resolution&, const Resolution&) = default;
};

enum class ExtraKind { Primary, Object, Bundle };

std::string to_string(ExtraKind kind);

// A resolved extra parameter. Primary extras carry one scalar; object and
// bundle extras carry named fields, constant only when every field is.
struct ResolvedExtra {
    ExtraKind kind = ExtraKind::Primary;
    bool unresolved = false;
    std::optional<ScalarValue> scalar;          // Primary, when constant
    std::map<std::string, ScalarValue> fields;  // Object/Bundle, when constant

    friend bool operator==(const ResolvedExtra&, const ResolvedExtra&) = default;
};

struct ResolvedContext {
    Resolution action;
    Resolution type_attr;
    Resolution data_uri;
    Resolution flags;
    Resolution identifier;
    std::map<std::string, ResolvedExtra> extras;

    bool fully_resolved() const;

    friend bool operator==(const ResolvedContext&, const ResolvedContext&) = default;
};

// Follows the def-use chain of every attribute / extra setting call in the
// trace. The last write before the call wins; a BranchJoin with more than
// one value makes the written slot Unresolved. Throws MalformedTrace on use
// before definition.
ResolvedContext resolve_context(const SenderTrace& trace);

enum class LinkKind { Explicit, ImplicitMatched };

struct IntentLink {
    std::string sender;
    std::string receiver;
    LinkKind kind = LinkKind::Explicit;
    ResolvedContext context;
};

// Pairs every trace with its receivers: explicit targets directly, implicit
// intents by matching resolved action/data against receiver intent-filters.
// Filters containing wildcard data patterns never match. Throws
// UnknownActivity when a trace names an activity outside the manifest.
std::vector<IntentLink> match_intent_pairs(const std::vector<SenderTrace>& traces,
                                           const Manifest& m);

enum class RequirementKind { GlobalData, DeviceConfig };

// A launch precondition that lives outside the intent itself: a global-data
// key that must hold an expected value, or a device configuration grant
// (always satisfied, mirroring blanket permission grants).
struct ContextRequirement {
    RequirementKind kind = RequirementKind::GlobalData;
    std::string key;
    ScalarValue expected;

    friend bool operator==(const ContextRequirement&, const ContextRequirement&) = default;
    friend auto operator<=>(const ContextRequirement&, const ContextRequirement&) = default;
};

// Keys in app-spec required_globals with this prefix describe device
// configuration, not global data.
inline constexpr const char* kConfigKeyPrefix = "$config.";

enum class LauncherStatus { Ready, ConservativeSkip };

std::string to_string(LauncherStatus status);

// A complete recipe for launching one activity from outside: its deep link,
// the mocked ICC context, and the global-state preconditions to check first.
struct ActivityLauncher {
    std::string target;
    DeepLink deep_link;
    ResolvedContext context;
    std::vector<ContextRequirement> preconditions;  // sorted
    LauncherStatus status = LauncherStatus::ConservativeSkip;
};

// One launcher per (receiver, distinct context). Launchers with any
// unresolved attribute or extra are kept but marked ConservativeSkip so the
// caller can report what was skipped and why. Throws MissingDeepLink when a
// receiver has no deep link (run bind_deep_links first).
std::vector<ActivityLauncher> build_launchers(
    const std::vector<IntentLink>& links, const std::vector<DeepLink>& deep_links,
    const std::map<std::string, std::vector<ContextRequirement>>& requirements);

// True iff every precondition holds in the given global snapshot.
bool check_context_ready(const ActivityLauncher& launcher, const GlobalState& globals);

// Compact one-line rendition used by CLI output and logs.
std::string context_summary(const ResolvedContext& ctx);

}  // namespace delm
