#include "delm/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "delm/errors.hpp"

namespace delm {

namespace {

constexpr const char* kAttrName = "android:name";
constexpr const char* kAttrExported = "android:exported";
constexpr const char* kAttrScheme = "android:scheme";
constexpr const char* kAttrHost = "android:host";
constexpr const char* kAttrPath = "android:path";

void push_unique(std::vector<std::string>& items, const std::string& value) {
    if (std::find(items.begin(), items.end(), value) == items.end()) {
        items.push_back(value);
    }
}

bool value_has_wildcard(const std::optional<std::string>& v) {
    return v && v->find('*') != std::string::npos;
}

DataSpec parse_data_spec(const xml::Node& node) {
    DataSpec spec;
    for (const auto& attr : node.attributes) {
        if (attr.name == kAttrScheme) {
            spec.scheme = attr.value;
        } else if (attr.name == kAttrHost) {
            spec.host = attr.value;
        } else if (attr.name == kAttrPath) {
            spec.path = attr.value;
        } else {
            spec.extra_attrs.push_back(attr);
        }
    }
    return spec;
}

IntentFilter parse_intent_filter(const xml::Node& node) {
    IntentFilter filter;
    filter.extra_attrs = node.attributes;
    for (const auto& child : node.children) {
        if (child.name == "action") {
            if (auto name = child.attr(kAttrName)) push_unique(filter.actions, *name);
        } else if (child.name == "category") {
            if (auto name = child.attr(kAttrName)) push_unique(filter.categories, *name);
        } else if (child.name == "data") {
            filter.data_specs.push_back(parse_data_spec(child));
        } else {
            filter.extra_children.push_back(child);
        }
    }
    return filter;
}

ActivityDecl parse_activity(const xml::Node& node) {
    ActivityDecl decl;
    for (const auto& attr : node.attributes) {
        if (attr.name == kAttrName) {
            decl.name = attr.value;
        } else if (attr.name == kAttrExported) {
            decl.exported = attr.value == "true";
        } else {
            decl.extra_attrs.push_back(attr);
        }
    }
    if (decl.name.empty()) {
        throw MalformedXml("activity element without android:name");
    }
    for (const auto& child : node.children) {
        if (child.name == "intent-filter") {
            decl.intent_filters.push_back(parse_intent_filter(child));
        } else {
            decl.extra_children.push_back(child);
        }
    }
    return decl;
}

xml::Node data_spec_to_node(const DataSpec& spec) {
    xml::Node node;
    node.name = "data";
    if (spec.scheme) node.attributes.push_back({kAttrScheme, *spec.scheme});
    if (spec.host) node.attributes.push_back({kAttrHost, *spec.host});
    if (spec.path) node.attributes.push_back({kAttrPath, *spec.path});
    for (const auto& attr : spec.extra_attrs) node.attributes.push_back(attr);
    return node;
}

xml::Node filter_to_node(const IntentFilter& filter) {
    xml::Node node;
    node.name = "intent-filter";
    node.attributes = filter.extra_attrs;
    for (const auto& action : filter.actions) {
        xml::Node a;
        a.name = "action";
        a.attributes.push_back({kAttrName, action});
        node.children.push_back(std::move(a));
    }
    for (const auto& category : filter.categories) {
        xml::Node c;
        c.name = "category";
        c.attributes.push_back({kAttrName, category});
        node.children.push_back(std::move(c));
    }
    for (const auto& spec : filter.data_specs) {
        node.children.push_back(data_spec_to_node(spec));
    }
    for (const auto& child : filter.extra_children) {
        node.children.push_back(child);
    }
    return node;
}

xml::Node activity_to_node(const ActivityDecl& decl) {
    xml::Node node;
    node.name = "activity";
    node.attributes.push_back({kAttrName, decl.name});
    if (decl.exported) {
        node.attributes.push_back({kAttrExported, *decl.exported ? "true" : "false"});
    }
    for (const auto& attr : decl.extra_attrs) node.attributes.push_back(attr);
    for (const auto& filter : decl.intent_filters) {
        node.children.push_back(filter_to_node(filter));
    }
    for (const auto& child : decl.extra_children) node.children.push_back(child);
    return node;
}

std::string ascii_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace

bool DataSpec::has_wildcard() const {
    return value_has_wildcard(scheme) || value_has_wildcard(host) || value_has_wildcard(path);
}

bool IntentFilter::has_action(std::string_view a) const {
    return std::find(actions.begin(), actions.end(), a) != actions.end();
}

bool IntentFilter::has_category(std::string_view c) const {
    return std::find(categories.begin(), categories.end(), c) != categories.end();
}

bool IntentFilter::qualifies_as_deep_link() const {
    return first_deep_link_spec() != nullptr;
}

const DataSpec* IntentFilter::first_deep_link_spec() const {
    if (!has_action(kActionView) || !has_category(kCategoryBrowsable)) return nullptr;
    for (const auto& spec : data_specs) {
        if (spec.scheme && !spec.scheme->empty() && spec.host && !spec.host->empty()) {
            return &spec;
        }
    }
    return nullptr;
}

bool IntentFilter::has_wildcard() const {
    return std::any_of(data_specs.begin(), data_specs.end(),
                       [](const DataSpec& s) { return s.has_wildcard(); });
}

std::string ActivityDecl::simple_name() const {
    std::size_t dot = name.rfind('.');
    return dot == std::string::npos ? name : name.substr(dot + 1);
}

bool ActivityDecl::has_deep_link_filter() const {
    return std::any_of(intent_filters.begin(), intent_filters.end(),
                       [](const IntentFilter& f) { return f.qualifies_as_deep_link(); });
}

const ActivityDecl* Manifest::find_activity(std::string_view name) const {
    for (const auto& a : activities) {
        if (a.name == name) return &a;
    }
    return nullptr;
}

std::string to_string(LinkOrigin origin) {
    return origin == LinkOrigin::Extracted ? "extracted" : "bound";
}

Manifest parse_manifest(std::string_view xml_text) {
    xml::Node root = xml::parse(xml_text);
    if (root.name != "manifest") {
        throw MalformedXml("root element must be <manifest>, got <" + root.name + ">");
    }

    Manifest manifest;
    for (const auto& attr : root.attributes) {
        if (attr.name == "package") {
            manifest.package_name = attr.value;
        } else {
            manifest.extra_manifest_attrs.push_back(attr);
        }
    }

    const xml::Node* application = nullptr;
    for (const auto& child : root.children) {
        if (child.name == "application") {
            if (application != nullptr) {
                throw MalformedXml("multiple <application> elements");
            }
            application = &child;
        } else {
            manifest.extra_manifest_children.push_back(child);
        }
    }

    if (application != nullptr) {
        manifest.extra_application_attrs = application->attributes;
        for (const auto& child : application->children) {
            if (child.name == "activity") {
                manifest.activities.push_back(parse_activity(child));
            } else {
                manifest.extra_application_children.push_back(child);
            }
        }
    }

    std::set<std::string> seen;
    for (const auto& activity : manifest.activities) {
        if (!seen.insert(activity.name).second) {
            throw DuplicateActivity(activity.name);
        }
    }
    return manifest;
}

std::string deep_link_uri(const std::string& scheme, const std::string& host,
                          const std::optional<std::string>& path) {
    std::string uri = scheme + "://" + host;
    if (path && !path->empty()) {
        if ((*path)[0] != '/') uri += '/';
        uri += *path;
    }
    return uri;
}

std::vector<DeepLink> extract_deep_links(const Manifest& m) {
    std::vector<DeepLink> links;
    for (const auto& activity : m.activities) {
        for (const auto& filter : activity.intent_filters) {
            if (const DataSpec* spec = filter.first_deep_link_spec()) {
                links.push_back({activity.name, deep_link_uri(*spec->scheme, *spec->host, spec->path),
                                 LinkOrigin::Extracted});
            }
        }
    }
    return links;
}

BindResult bind_deep_links(const Manifest& m, const std::string& scheme,
                           const std::string& host_prefix) {
    if (scheme.empty() || host_prefix.empty()) {
        throw Error("bind_deep_links requires a non-empty scheme and host prefix");
    }
    for (const auto& link : extract_deep_links(m)) {
        if (link.uri.rfind(scheme + "://", 0) == 0) {
            throw SchemeCollision(scheme);
        }
    }

    BindResult result;
    result.manifest = m;
    for (auto& activity : result.manifest.activities) {
        if (activity.has_deep_link_filter()) continue;

        const std::string host = host_prefix + "." + ascii_lower(activity.simple_name());
        IntentFilter filter;
        filter.actions.push_back(kActionView);
        filter.categories.push_back(kCategoryBrowsable);
        filter.categories.push_back(kCategoryDefault);
        DataSpec spec;
        spec.scheme = scheme;
        spec.host = host;
        filter.data_specs.push_back(std::move(spec));

        activity.exported = true;
        activity.intent_filters.push_back(std::move(filter));
        result.bound.push_back({activity.name, deep_link_uri(scheme, host, std::nullopt),
                                LinkOrigin::Bound});
    }
    return result;
}

std::string serialize_manifest(const Manifest& m) {
    xml::Node root;
    root.name = "manifest";
    if (!m.package_name.empty()) {
        root.attributes.push_back({"package", m.package_name});
    }
    for (const auto& attr : m.extra_manifest_attrs) root.attributes.push_back(attr);

    xml::Node application;
    application.name = "application";
    application.attributes = m.extra_application_attrs;
    for (const auto& activity : m.activities) {
        application.children.push_back(activity_to_node(activity));
    }
    for (const auto& child : m.extra_application_children) {
        application.children.push_back(child);
    }
    root.children.push_back(std::move(application));
    for (const auto& child : m.extra_manifest_children) root.children.push_back(child);

    return xml::serialize(root);
}

}  // namespace delm
