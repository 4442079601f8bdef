#include <algorithm>
#include <set>

#include <doctest.h>

#include "delm/errors.hpp"
#include "delm/manifest.hpp"
#include "delm/rng.hpp"
#include "../support.hpp"

using namespace delm;

namespace {

// Extraction rule restated as a flat scan, used to cross-check the
// library's per-filter walk.
std::size_t brute_force_qualifying_filters(const Manifest& m) {
    std::size_t count = 0;
    for (const auto& activity : m.activities) {
        for (const auto& filter : activity.intent_filters) {
            const bool view = filter.has_action(kActionView);
            const bool browsable = filter.has_category(kCategoryBrowsable);
            bool scheme_host = false;
            for (const auto& spec : filter.data_specs) {
                if (spec.scheme && !spec.scheme->empty() && spec.host && !spec.host->empty()) {
                    scheme_host = true;
                }
            }
            if (view && browsable && scheme_host) ++count;
        }
    }
    return count;
}

const char* kTinyManifest = R"(<?xml version="1.0" encoding="utf-8"?>
<manifest xmlns:android="http://schemas.android.com/apk/res/android" package="com.tiny">
  <application>
    <activity android:name="com.tiny.Main" android:exported="true">
      <intent-filter>
        <action android:name="android.intent.action.VIEW"/>
        <category android:name="android.intent.category.BROWSABLE"/>
        <data android:scheme="https" android:host="example.com"/>
      </intent-filter>
    </activity>
  </application>
</manifest>)";

}  // namespace

TEST_CASE("empty manifest parses and serializes minimally") {
    const Manifest empty = parse_manifest("<manifest><application/></manifest>");
    CHECK(empty.activities.empty());
    const std::string out = serialize_manifest(Manifest{});
    CHECK(out.find("<manifest>") != std::string::npos);
    CHECK(out.find("<application/>") != std::string::npos);
    CHECK(parse_manifest(out) == Manifest{});
}

TEST_CASE("single qualifying filter is parsed and extracted") {
    const Manifest m = parse_manifest(kTinyManifest);
    REQUIRE(m.activities.size() == 1);
    REQUIRE(m.activities[0].intent_filters.size() == 1);
    CHECK(m.activities[0].intent_filters[0].qualifies_as_deep_link());

    const auto links = extract_deep_links(m);
    REQUIRE(links.size() == 1);
    CHECK(links[0].uri == "https://example.com");
    CHECK(links[0].origin == LinkOrigin::Extracted);
}

TEST_CASE("no qualifying filters yields no links") {
    const Manifest m = parse_manifest(
        "<manifest package=\"p\"><application>"
        "<activity android:name=\"p.A\"/>"
        "</application></manifest>");
    CHECK(extract_deep_links(m).empty());
}

TEST_CASE("fixture manifest matches the expected shape") {
    const Manifest m =
        parse_manifest(testsupport::read_file(testsupport::fixtures_dir() / "manifests" /
                                              "amazon_prime.xml"));
    REQUIRE(m.activities.size() == 2);
    CHECK(m.activities[0].name == "com.amazon.avod.thirdpartyclient.HomeScreenActivity");
    CHECK(m.activities[0].intent_filters.size() == 2);
    CHECK(m.activities[1].name == "com.amazon.avod.thirdpartyclient.ContactUsSettings");
    CHECK(m.activities[1].intent_filters.empty());

    const auto links = extract_deep_links(m);
    REQUIRE(links.size() == 2);
    for (const auto& link : links) {
        CHECK(link.activity == m.activities[0].name);
    }
    CHECK(links.size() == brute_force_qualifying_filters(m));
}

TEST_CASE("duplicate activities are rejected") {
    CHECK_THROWS_AS(parse_manifest("<manifest package=\"p\"><application>"
                                   "<activity android:name=\"p.A\"/>"
                                   "<activity android:name=\"p.A\"/>"
                                   "</application></manifest>"),
                    DuplicateActivity);
}

TEST_CASE("binding covers every activity and leaves linked ones untouched") {
    const Manifest m =
        parse_manifest(testsupport::read_file(testsupport::fixtures_dir() / "manifests" /
                                              "amazon_prime.xml"));
    const BindResult result = bind_deep_links(m, "delm", "app");

    REQUIRE(result.bound.size() == 1);
    CHECK(result.bound[0].activity == "com.amazon.avod.thirdpartyclient.ContactUsSettings");
    CHECK(result.bound[0].uri == "delm://app.contactussettings");
    CHECK(result.bound[0].origin == LinkOrigin::Bound);

    // Untouched activity keeps its original declaration byte for byte.
    CHECK(result.manifest.activities[0] == m.activities[0]);
    CHECK(result.manifest.activities[1].is_exported());

    // Completeness: every activity now has at least one deep link.
    const auto all_links = extract_deep_links(result.manifest);
    std::set<std::string> covered;
    for (const auto& link : all_links) covered.insert(link.activity);
    CHECK(covered.size() == result.manifest.activities.size());

    // Injected filter comes after pre-existing ones.
    const auto& filters = result.manifest.activities[1].intent_filters;
    REQUIRE(filters.size() == 1);
    CHECK(filters.back().qualifies_as_deep_link());
}

TEST_CASE("binding a fully linked manifest is a no-op") {
    const Manifest m = parse_manifest(kTinyManifest);
    const BindResult result = bind_deep_links(m, "delm", "app");
    CHECK(result.bound.empty());
    CHECK(result.manifest == m);
}

TEST_CASE("bound link naming follows the scheme://prefix.simplename rule") {
    const Manifest m = parse_manifest(
        "<manifest package=\"a.b\"><application>"
        "<activity android:name=\"a.b.Main\"/>"
        "</application></manifest>");
    const BindResult result = bind_deep_links(m, "delm", "app");
    REQUIRE(result.bound.size() == 1);
    CHECK(result.bound[0].uri == "delm://app.main");
}

TEST_CASE("scheme collisions and empty arguments are rejected") {
    const Manifest m = parse_manifest(kTinyManifest);
    CHECK_THROWS_AS(bind_deep_links(m, "https", "app"), SchemeCollision);
    CHECK_THROWS_AS(bind_deep_links(m, "", "app"), Error);
    CHECK_THROWS_AS(bind_deep_links(m, "delm", ""), Error);
}

TEST_CASE("round trip parse/serialize is a fixpoint on all fixture manifests") {
    const auto dir = testsupport::fixtures_dir();
    std::vector<std::filesystem::path> manifests{dir / "manifests" / "amazon_prime.xml"};
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_directory() && std::filesystem::exists(entry.path() / "manifest.xml")) {
            manifests.push_back(entry.path() / "manifest.xml");
        }
    }
    REQUIRE(manifests.size() >= 7);
    for (const auto& path : manifests) {
        CAPTURE(path.string());
        const Manifest parsed = parse_manifest(testsupport::read_file(path));
        const std::string once = serialize_manifest(parsed);
        CHECK(parse_manifest(once) == parsed);
        CHECK(serialize_manifest(parse_manifest(once)) == once);
    }
}

TEST_CASE("bound fixture matches its golden file byte for byte") {
    const auto dir = testsupport::fixtures_dir() / "manifests";
    const Manifest m = parse_manifest(testsupport::read_file(dir / "amazon_prime.xml"));
    const BindResult result = bind_deep_links(m, "delm", "app");
    CHECK(serialize_manifest(result.manifest) ==
          testsupport::read_file(dir / "amazon_prime_bound.golden.xml"));
}

TEST_CASE("after binding, every deep-linked activity is exported") {
    const auto dir = testsupport::fixtures_dir();
    std::vector<std::filesystem::path> manifests{dir / "manifests" / "amazon_prime.xml"};
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_directory() && std::filesystem::exists(entry.path() / "manifest.xml")) {
            manifests.push_back(entry.path() / "manifest.xml");
        }
    }
    for (const auto& path : manifests) {
        CAPTURE(path.string());
        const Manifest parsed = parse_manifest(testsupport::read_file(path));
        const BindResult bound = bind_deep_links(parsed, "chk", "host");
        for (const auto& activity : bound.manifest.activities) {
            if (activity.has_deep_link_filter()) {
                CHECK(activity.is_exported());
            }
        }
    }
}

TEST_CASE("binding properties hold on randomized manifests") {
    // Random mixes of linked, filtered-but-unlinked, and bare activities.
    delm::Rng rng(0xBEEF);
    for (int round = 0; round < 150; ++round) {
        Manifest m;
        m.package_name = "gen.pkg";
        const std::size_t n = 1 + rng.below(6);
        for (std::size_t i = 0; i < n; ++i) {
            ActivityDecl activity;
            activity.name = "gen.pkg.Act" + std::to_string(i);
            switch (rng.below(3)) {
                case 0: {  // existing deep link
                    IntentFilter filter;
                    filter.actions.push_back(kActionView);
                    filter.categories.push_back(kCategoryBrowsable);
                    DataSpec spec;
                    spec.scheme = "https";
                    spec.host = "host" + std::to_string(i);
                    filter.data_specs.push_back(spec);
                    activity.intent_filters.push_back(filter);
                    activity.exported = true;
                    break;
                }
                case 1: {  // non-qualifying filter
                    IntentFilter filter;
                    filter.actions.push_back("android.intent.action.MAIN");
                    filter.categories.push_back("android.intent.category.LAUNCHER");
                    activity.intent_filters.push_back(filter);
                    break;
                }
                default: break;  // bare
            }
            m.activities.push_back(std::move(activity));
        }

        CAPTURE(round);
        const BindResult bound = bind_deep_links(m, "delm", "app");

        // Completeness: every activity ends up with a deep link.
        std::set<std::string> covered;
        for (const auto& link : extract_deep_links(bound.manifest)) {
            covered.insert(link.activity);
        }
        REQUIRE(covered.size() == bound.manifest.activities.size());

        // Minimality: already-linked activities are untouched.
        for (std::size_t i = 0; i < m.activities.size(); ++i) {
            if (m.activities[i].has_deep_link_filter()) {
                REQUIRE(bound.manifest.activities[i] == m.activities[i]);
            } else {
                REQUIRE(bound.manifest.activities[i].is_exported());
            }
        }

        // Round trip through text stays a fixpoint.
        const std::string once = serialize_manifest(bound.manifest);
        REQUIRE(parse_manifest(once) == bound.manifest);
        REQUIRE(serialize_manifest(parse_manifest(once)) == once);
    }
}
