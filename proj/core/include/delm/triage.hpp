#pragma once

#include <optional>
#include <string>
#include <vector>

#include "delm/runtime.hpp"
#include "delm/simapp.hpp"

namespace delm {

enum class Classification { TruePositive, FalsePositive };

std::string to_string(Classification c);

// One step of a reproduction path: an ordinary UI/Back event, or a dynamic
// relaunch of an activity already on the back stack. Deep links never
// appear in a witness.
struct WitnessStep {
    enum class Kind { UiEvent, StackLaunch };

    Kind kind = Kind::UiEvent;
    Event event;          // UiEvent
    std::string target;   // StackLaunch

    static WitnessStep of_event(Event e) {
        WitnessStep s;
        s.event = std::move(e);
        return s;
    }
    static WitnessStep of_launch(std::string target) {
        WitnessStep s;
        s.kind = Kind::StackLaunch;
        s.target = std::move(target);
        return s;
    }
};

std::string to_string(const WitnessStep& step);

struct TriageVerdict {
    CrashRecord record;
    Classification classification = Classification::FalsePositive;
    std::optional<std::vector<WitnessStep>> witness;  // present for true positives
    std::vector<std::string> witness_activities;      // activity path along the witness
    std::uint64_t depth_used = 0;
};

// Breadth-first search over the organic event graph (plain events and
// back-stack relaunches only, no deep links) from the initial activity, up
// to depth_limit steps, looking for any path that crashes with the same
// stack trace id. Found: TruePositive with the (shortest) witness.
// Exhausted: FalsePositive with the depth echoed in the verdict.
TriageVerdict classify(const SimApp& app, const CrashRecord& record, std::uint64_t depth_limit);

inline constexpr std::uint64_t kDefaultTriageDepth = 12;

// One representative per stack trace id; the earliest event_index wins and
// output keeps first-occurrence order.
std::vector<CrashRecord> dedupe(const std::vector<CrashRecord>& crashes);

std::string verdicts_to_json(const std::vector<TriageVerdict>& verdicts);

// Reads back what verdicts_to_json wrote. Witness steps are kept as their
// rendered strings inside witness_activities-free verdicts; only ids,
// classifications and depth survive the round trip.
std::vector<TriageVerdict> verdicts_from_json(const std::string& text);

}  // namespace delm
