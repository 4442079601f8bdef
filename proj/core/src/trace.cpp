#include "delm/trace.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "delm/errors.hpp"

namespace delm {

namespace {

using nlohmann::json;

const struct {
    MethodKind kind;
    const char* name;
} kMethodNames[] = {
    {MethodKind::SetAction, "SetAction"},
    {MethodKind::SetType, "SetType"},
    {MethodKind::SetData, "SetData"},
    {MethodKind::SetFlags, "SetFlags"},
    {MethodKind::SetIdentifier, "SetIdentifier"},
    {MethodKind::SetClass, "SetClass"},
    {MethodKind::SetClassName, "SetClassName"},
    {MethodKind::SetComponent, "SetComponent"},
    {MethodKind::PutExtraPrimary, "PutExtraPrimary"},
    {MethodKind::PutExtraObject, "PutExtraObject"},
    {MethodKind::PutExtraBundle, "PutExtraBundle"},
    {MethodKind::StartActivity, "StartActivity"},
};

ScalarValue scalar_from_json(const json& j) {
    if (j.is_boolean()) return j.get<bool>();
    if (j.is_number_integer()) return j.get<std::int64_t>();
    if (j.is_number_float()) return j.get<double>();
    if (j.is_string()) return j.get<std::string>();
    throw MalformedTrace("expected a scalar value, got: " + j.dump());
}

Operand operand_from_json(const json& j) {
    if (!j.is_object()) throw MalformedTrace("operand must be an object: " + j.dump());
    if (j.contains("var")) return Operand::of_var(j.at("var").get<std::string>());
    if (j.contains("lit")) return Operand::of_lit(scalar_from_json(j.at("lit")));
    throw MalformedTrace("operand needs a \"var\" or \"lit\" field: " + j.dump());
}

TraceStmt stmt_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind")) {
        throw MalformedTrace("statement needs a \"kind\" discriminator: " + j.dump());
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "ConstAssign") {
        return ConstAssign{j.at("var").get<std::string>(), scalar_from_json(j.at("value"))};
    }
    if (kind == "NewIntent") {
        NewIntent stmt;
        stmt.var = j.at("var").get<std::string>();
        if (j.contains("target")) stmt.explicit_target = j.at("target").get<std::string>();
        return stmt;
    }
    if (kind == "Call") {
        Call call;
        call.receiver_var = j.at("receiver").get<std::string>();
        auto method = method_kind_from_string(j.at("method").get<std::string>());
        if (!method) {
            throw MalformedTrace("unknown method kind: " + j.at("method").get<std::string>());
        }
        call.method = *method;
        const json arg_list = j.value("args", json::array());
        for (const auto& arg : arg_list) {
            call.args.push_back(operand_from_json(arg));
        }
        return call;
    }
    if (kind == "BranchJoin") {
        BranchJoin join;
        join.var = j.at("var").get<std::string>();
        for (const auto& v : j.at("values")) {
            ScalarValue value = scalar_from_json(v);
            if (std::find(join.values.begin(), join.values.end(), value) == join.values.end()) {
                join.values.push_back(std::move(value));
            }
        }
        if (join.values.empty()) throw MalformedTrace("BranchJoin with an empty value set");
        return join;
    }
    throw MalformedTrace("unknown statement kind: " + kind);
}

void validate_start_activity_placement(const SenderTrace& trace) {
    for (std::size_t i = 0; i < trace.statements.size(); ++i) {
        const auto* call = std::get_if<Call>(&trace.statements[i]);
        if (call != nullptr && call->method == MethodKind::StartActivity &&
            i + 1 != trace.statements.size()) {
            throw MalformedTrace("StartActivity must be the final statement (trace " + trace.id +
                                 ")");
        }
    }
}

}  // namespace

std::string to_string(MethodKind kind) {
    for (const auto& entry : kMethodNames) {
        if (entry.kind == kind) return entry.name;
    }
    return "?";
}

std::optional<MethodKind> method_kind_from_string(std::string_view name) {
    for (const auto& entry : kMethodNames) {
        if (name == entry.name) return entry.kind;
    }
    return std::nullopt;
}

SenderTrace parse_trace(std::string_view json_text, std::string id) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw MalformedTrace("invalid json in trace " + id + ": " + e.what());
    }
    if (!doc.is_object()) throw MalformedTrace("trace document must be an object");

    SenderTrace trace;
    trace.id = std::move(id);
    try {
        trace.sender_activity = doc.at("sender_activity").get<std::string>();
        for (const auto& stmt : doc.at("statements")) {
            trace.statements.push_back(stmt_from_json(stmt));
        }
    } catch (const json::exception& e) {
        throw MalformedTrace("bad trace " + trace.id + ": " + e.what());
    }
    validate_start_activity_placement(trace);
    return trace;
}

SenderTrace load_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MalformedTrace("cannot open trace file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();

    std::string stem = path;
    if (auto slash = stem.find_last_of('/'); slash != std::string::npos) {
        stem = stem.substr(slash + 1);
    }
    if (auto dot = stem.rfind('.'); dot != std::string::npos) {
        stem = stem.substr(0, dot);
    }
    return parse_trace(buffer.str(), stem);
}

}  // namespace delm
