#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace delm::xml {

struct Attr {
    std::string name;
    std::string value;

    friend bool operator==(const Attr&, const Attr&) = default;
};

// A small element tree covering the XML subset manifests use: elements,
// attributes, child elements and plain text content. Mixed content (text
// interleaved with child elements) is rejected. Namespace prefixes are kept
// as part of the element/attribute name.
struct Node {
    std::string name;
    std::vector<Attr> attributes;
    std::vector<Node> children;
    std::string text;

    const Attr* find_attr(std::string_view attr_name) const;
    std::optional<std::string> attr(std::string_view attr_name) const;
    void set_attr(std::string_view attr_name, std::string_view value);

    friend bool operator==(const Node&, const Node&) = default;
};

// Parses a document and returns its root element. Throws MalformedXml on
// syntax errors or on constructs outside the supported subset.
Node parse(std::string_view text);

// Deterministic pretty-printer: xml declaration, two-space indent, LF line
// endings, attributes in stored order. parse(serialize(n)) == n.
std::string serialize(const Node& root);

std::string escape_text(std::string_view raw);
std::string escape_attr(std::string_view raw);

}  // namespace delm::xml
