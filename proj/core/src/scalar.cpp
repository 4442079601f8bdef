#include "delm/scalar.hpp"

#include <sstream>

namespace delm {

std::string scalar_to_string(const ScalarValue& v) {
    return std::visit(
        [](const auto& value) -> std::string {
            using T = std::decay_t<decltype(value)>;
            if constexpr (std::is_same_v<T, bool>) {
                return value ? "true" : "false";
            } else if constexpr (std::is_same_v<T, std::string>) {
                return value;
            } else if constexpr (std::is_same_v<T, double>) {
                std::ostringstream out;
                out << value;
                return out.str();
            } else {
                return std::to_string(value);
            }
        },
        v);
}

}  // namespace delm
