#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "delm/scalar.hpp"

namespace delm {

// The intent-mutating calls modeled by the analysis. Nothing else is
// interpreted; a trace containing any other call cannot be expressed.
enum class MethodKind {
    SetAction,
    SetType,
    SetData,
    SetFlags,
    SetIdentifier,
    SetClass,
    SetClassName,
    SetComponent,
    PutExtraPrimary,
    PutExtraObject,
    PutExtraBundle,
    StartActivity,
};

std::string to_string(MethodKind kind);
std::optional<MethodKind> method_kind_from_string(std::string_view name);

// Either a reference to a previously defined variable or an inline literal.
struct Operand {
    std::optional<std::string> var;
    std::optional<ScalarValue> literal;

    static Operand of_var(std::string name) { return {std::move(name), std::nullopt}; }
    static Operand of_lit(ScalarValue value) { return {std::nullopt, std::move(value)}; }

    friend bool operator==(const Operand&, const Operand&) = default;
};

struct ConstAssign {
    std::string var;
    ScalarValue value;

    friend bool operator==(const ConstAssign&, const ConstAssign&) = default;
};

struct NewIntent {
    std::string var;
    std::optional<std::string> explicit_target;

    friend bool operator==(const NewIntent&, const NewIntent&) = default;
};

struct Call {
    std::string receiver_var;
    MethodKind method;
    std::vector<Operand> args;

    friend bool operator==(const Call&, const Call&) = default;
};

// A variable that may hold any of several constants depending on which
// branch executed. A singleton set is equivalent to a ConstAssign.
struct BranchJoin {
    std::string var;
    std::vector<ScalarValue> values;  // unique, in declaration order

    friend bool operator==(const BranchJoin&, const BranchJoin&) = default;
};

using TraceStmt = std::variant<ConstAssign, NewIntent, Call, BranchJoin>;

// A straight-line record of one intent-sending code path inside a sender
// activity. At most one StartActivity call, and it must come last.
struct SenderTrace {
    std::string id;  // file stem for loaded traces, free-form otherwise
    std::string sender_activity;
    std::vector<TraceStmt> statements;
};

// Parses a trace document. Validates statement shape and the StartActivity
// placement rule; throws MalformedTrace.
SenderTrace parse_trace(std::string_view json_text, std::string id = "");
SenderTrace load_trace_file(const std::string& path);

}  // namespace delm
