#pragma once

#include <cstdint>
#include <string>
#include <variant>

namespace delm {

// A constant value carried by intent attributes, extras, and app globals.
// Mirrors the JSON scalar types used by trace and app-spec files.
using ScalarValue = std::variant<bool, std::int64_t, double, std::string>;

std::string scalar_to_string(const ScalarValue& v);

}  // namespace delm
