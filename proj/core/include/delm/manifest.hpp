#pragma once

#include <optional>
#include <string>
#include <vector>

#include "delm/xml.hpp"

namespace delm {

inline constexpr const char* kActionView = "android.intent.action.VIEW";
inline constexpr const char* kCategoryBrowsable = "android.intent.category.BROWSABLE";
inline constexpr const char* kCategoryDefault = "android.intent.category.DEFAULT";

struct DataSpec {
    std::optional<std::string> scheme;
    std::optional<std::string> host;
    std::optional<std::string> path;
    std::vector<xml::Attr> extra_attrs;

    bool has_wildcard() const;

    friend bool operator==(const DataSpec&, const DataSpec&) = default;
};

struct IntentFilter {
    std::vector<std::string> actions;     // document order, duplicates dropped
    std::vector<std::string> categories;  // document order, duplicates dropped
    std::vector<DataSpec> data_specs;
    std::vector<xml::Attr> extra_attrs;
    std::vector<xml::Node> extra_children;

    bool has_action(std::string_view a) const;
    bool has_category(std::string_view c) const;

    // A filter carries a deep link when it declares the VIEW action, the
    // BROWSABLE category, and at least one data spec with scheme and host.
    bool qualifies_as_deep_link() const;
    const DataSpec* first_deep_link_spec() const;

    // True when any data spec contains a '*' pattern; such filters are
    // excluded from implicit intent matching.
    bool has_wildcard() const;

    friend bool operator==(const IntentFilter&, const IntentFilter&) = default;
};

struct ActivityDecl {
    std::string name;
    std::optional<bool> exported;  // disengaged when the attribute is absent
    std::vector<IntentFilter> intent_filters;
    std::vector<xml::Attr> extra_attrs;
    std::vector<xml::Node> extra_children;

    bool is_exported() const { return exported.value_or(false); }
    std::string simple_name() const;
    bool has_deep_link_filter() const;

    friend bool operator==(const ActivityDecl&, const ActivityDecl&) = default;
};

struct Manifest {
    std::string package_name;
    std::vector<ActivityDecl> activities;
    std::vector<xml::Attr> extra_manifest_attrs;
    std::vector<xml::Node> extra_manifest_children;     // non-application children
    std::vector<xml::Attr> extra_application_attrs;
    std::vector<xml::Node> extra_application_children;  // non-activity children

    const ActivityDecl* find_activity(std::string_view name) const;
    bool declares_activity(std::string_view name) const { return find_activity(name) != nullptr; }

    friend bool operator==(const Manifest&, const Manifest&) = default;
};

enum class LinkOrigin { Extracted, Bound };

struct DeepLink {
    std::string activity;
    std::string uri;  // scheme://host[/path]
    LinkOrigin origin;

    friend bool operator==(const DeepLink&, const DeepLink&) = default;
};

std::string to_string(LinkOrigin origin);

// Parses manifest XML into the typed model. Unknown attributes and elements
// are kept verbatim so the manifest can be rewritten without information
// loss. Throws MalformedXml or DuplicateActivity.
Manifest parse_manifest(std::string_view xml_text);

// One link per qualifying intent-filter. Non-qualifying filters are skipped.
std::vector<DeepLink> extract_deep_links(const Manifest& m);

struct BindResult {
    Manifest manifest;
    std::vector<DeepLink> bound;
};

// Gives every activity without a deep link an injected VIEW/BROWSABLE filter
// with uri scheme://host_prefix.<lowercased simple name>, and marks it
// exported. Activities that already carry a deep link are left untouched.
// Throws SchemeCollision when the scheme is already claimed by an extracted
// link, and Error when scheme or host_prefix is empty.
BindResult bind_deep_links(const Manifest& m, const std::string& scheme,
                           const std::string& host_prefix);

// Canonical text form: activities precede other application children, filter
// children are ordered actions/categories/data/extras, injected filters come
// last. serialize(parse(serialize(m))) == serialize(m).
std::string serialize_manifest(const Manifest& m);

std::string deep_link_uri(const std::string& scheme, const std::string& host,
                          const std::optional<std::string>& path);

}  // namespace delm
