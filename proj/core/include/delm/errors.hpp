#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace delm {

// Base class for all recoverable errors raised by the library. The CLI maps
// these to exit code 2; anything else escaping to main is exit code 1.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class MalformedXml : public Error {
public:
    explicit MalformedXml(const std::string& what) : Error("malformed xml: " + what) {}
};

class DuplicateActivity : public Error {
public:
    explicit DuplicateActivity(const std::string& name)
        : Error("duplicate activity declaration: " + name) {}
};

class SchemeCollision : public Error {
public:
    explicit SchemeCollision(const std::string& scheme)
        : Error("scheme already used by an existing deep link: " + scheme) {}
};

class UnknownActivity : public Error {
public:
    explicit UnknownActivity(const std::string& name)
        : Error("activity not declared in manifest: " + name) {}
};

class MalformedTrace : public Error {
public:
    explicit MalformedTrace(const std::string& what) : Error("malformed trace: " + what) {}
};

class MissingDeepLink : public Error {
public:
    explicit MissingDeepLink(const std::string& activity)
        : Error("no deep link available for activity: " + activity) {}
};

class NotOnStack : public Error {
public:
    explicit NotOnStack(const std::string& activity)
        : Error("activity is not on the back stack: " + activity) {}
};

class UnsupportedFormat : public Error {
public:
    explicit UnsupportedFormat(const std::string& fmt)
        : Error("unsupported output format: " + fmt) {}
};

// Aggregates every violation found while linking an app directory, so a bad
// fixture reports all problems in one pass.
class SpecError : public Error {
public:
    explicit SpecError(std::vector<std::string> violations)
        : Error(join(violations)), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const { return violations_; }

private:
    static std::string join(const std::vector<std::string>& vs) {
        std::string out = "app spec validation failed:";
        for (const auto& v : vs) {
            out += "\n  - " + v;
        }
        return out;
    }

    std::vector<std::string> violations_;
};

}  // namespace delm
