#include <doctest.h>

#include "delm/errors.hpp"
#include "delm/exploration.hpp"
#include "delm/runtime.hpp"
#include "delm/simapp.hpp"
#include "../support.hpp"

using namespace delm;

namespace {

const SimApp& loseweight() {
    static const SimApp app = load_app(testsupport::fixtures_dir() / "loseweight");
    return app;
}

const SimApp& ezfile() {
    static const SimApp app = load_app(testsupport::fixtures_dir() / "ezfile");
    return app;
}

const SimApp& alltrails() {
    static const SimApp app = load_app(testsupport::fixtures_dir() / "alltrails");
    return app;
}

const ActivityLauncher& launcher_for(const LaunchPlan& plan, const std::string& target) {
    for (const auto& launcher : plan.launchers) {
        if (launcher.target == target) return launcher;
    }
    throw std::runtime_error("no launcher for " + target);
}

}  // namespace

TEST_CASE("events drive state and activity transitions") {
    Runtime rt = make_runtime(loseweight(), 1);
    CHECK(rt.current().activity == "com.loseweight.MainActivity");
    CHECK(rt.current().state_id == "home");

    // Undefined pair: no-op, but the event still counts.
    execute_event(rt, Event::ui("banner", UiAction::Tap));
    CHECK(rt.current().state_id == "home");
    CHECK(rt.event_count == 1);

    execute_event(rt, Event::ui("tab_plan", UiAction::Tap));
    CHECK(rt.current().state_id == "plan_tab");

    execute_event(rt, Event::ui("tab_home", UiAction::Tap));
    execute_event(rt, Event::ui("tab_settings", UiAction::Tap));
    CHECK(rt.current().activity == "com.loseweight.SettingsActivity");
    CHECK(rt.stack.size() == 2);
    CHECK(rt.stack_activities().back() == rt.current().activity);
}

TEST_CASE("hidden entry requires its pre-event sequence") {
    Runtime rt = make_runtime(loseweight(), 1);
    execute_event(rt, Event::ui("tab_settings", UiAction::Tap));

    // Tapping the voice row does nothing before the reveal sequence.
    execute_event(rt, Event::ui("voice_row", UiAction::Tap));
    CHECK(rt.current().activity == "com.loseweight.SettingsActivity");

    execute_event(rt, Event::ui("panel", UiAction::Swipe));
    execute_event(rt, Event::ui("panel", UiAction::Swipe));
    execute_event(rt, Event::ui("panel", UiAction::Swipe));
    execute_event(rt, Event::ui("voice_row", UiAction::LongPress));
    execute_event(rt, Event::ui("voice_btn", UiAction::Tap));
    CHECK(rt.current().activity == "com.loseweight.VoiceActivity");
}

TEST_CASE("back pops the stack and is a no-op at the bottom") {
    Runtime rt = make_runtime(loseweight(), 1);
    execute_event(rt, Event::ui("tab_settings", UiAction::Tap));
    REQUIRE(rt.stack.size() == 2);

    execute_event(rt, Event::back());
    CHECK(rt.stack.size() == 1);
    CHECK(rt.current().activity == "com.loseweight.MainActivity");

    execute_event(rt, Event::back());
    CHECK(rt.stack.size() == 1);

    // Stack/top coherence after every step.
    CHECK(rt.stack_activities().back() == rt.current().activity);
}

TEST_CASE("back navigation returns from depth n to the initial activity") {
    Runtime rt = make_runtime(ezfile(), 1);
    execute_event(rt, Event::ui("accept_btn", UiAction::Tap));
    execute_event(rt, Event::ui("continue_btn", UiAction::Tap));
    REQUIRE(rt.stack.size() == 3);
    execute_event(rt, Event::back());
    execute_event(rt, Event::back());
    CHECK(rt.stack.size() == 1);
    CHECK(rt.current().activity == "com.ezfile.ActivityPolicy");
}

TEST_CASE("crash records reset to the initial activity") {
    Runtime rt = make_runtime(loseweight(), 1);
    execute_event(rt, Event::ui("tab_settings", UiAction::Tap));
    execute_event(rt, Event::ui("panel", UiAction::Swipe));
    execute_event(rt, Event::ui("panel", UiAction::Swipe));
    execute_event(rt, Event::ui("panel", UiAction::Swipe));
    execute_event(rt, Event::ui("unit_row", UiAction::Tap));
    REQUIRE(rt.current().activity == "com.loseweight.UnitActivity");

    execute_event(rt, Event::ui("apply_btn", UiAction::Tap));
    REQUIRE(rt.crash_log.size() == 1);
    CHECK(rt.crash_log[0].stack_trace_id == "loseweight_unit_npe");
    CHECK(rt.crash_log[0].activity == "com.loseweight.UnitActivity");
    CHECK(rt.crash_log[0].launched_by == LaunchedBy::Organic);
    CHECK(rt.current().activity == "com.loseweight.MainActivity");
    CHECK(rt.stack.size() == 1);
}

TEST_CASE("deep-link launches honor carried extras") {
    const SimApp& app = ezfile();
    const LaunchPlan plan = prepare_launch_plan(app);

    Runtime rt = make_runtime(app, 1);
    const auto& exerror = launcher_for(plan, "com.ezfile.ExErrorActivity");
    CHECK(launch_via_deeplink(rt, exerror) == LaunchOutcome::Launched);
    CHECK(rt.current().activity == "com.ezfile.ExErrorActivity");
    CHECK(rt.stack.back().via_deep_link);
    CHECK(rt.event_count == 0);  // launches are not events
}

TEST_CASE("deep-link launch without requirements succeeds trivially") {
    const SimApp& app = ezfile();
    const LaunchPlan plan = prepare_launch_plan(app);
    Runtime rt = make_runtime(app, 1);
    CHECK(launch_via_deeplink(rt, launcher_for(plan, "com.ezfile.ResolverActivity")) ==
          LaunchOutcome::Launched);
}

TEST_CASE("missing requirements fail or crash per the activity's fault mode") {
    // Saved requires a login global and fails quietly.
    const SimApp& trails = alltrails();
    const LaunchPlan trails_plan = prepare_launch_plan(trails);
    Runtime rt = make_runtime(trails, 1);
    const auto& saved = launcher_for(trails_plan, "com.alltrails.SavedActivity");
    CHECK(launch_via_deeplink(rt, saved) == LaunchOutcome::Failed);
    CHECK(rt.current().activity == "com.alltrails.HomePageActivity");
    CHECK(rt.crash_log.empty());

    rt.globals["logged_in"] = true;
    CHECK(launch_via_deeplink(rt, saved) == LaunchOutcome::Launched);

    // The trap activity throws instead.
    const SimApp& trap_app = load_app(testsupport::fixtures_dir() / "fp_trap");
    const LaunchPlan trap_plan = prepare_launch_plan(trap_app);
    Runtime trap_rt = make_runtime(trap_app, 1);
    const auto& trap = launcher_for(trap_plan, "com.fptrap.TrapActivity");
    CHECK(launch_via_deeplink(trap_rt, trap) == LaunchOutcome::Crashed);
    REQUIRE(trap_rt.crash_log.size() == 1);
    CHECK(trap_rt.crash_log[0].stack_trace_id == "fptrap_session_npe");
    CHECK(trap_rt.crash_log[0].launched_by == LaunchedBy::DeepLink);
    CHECK(trap_rt.current().activity == "com.fptrap.EntryActivity");
}

TEST_CASE("dynamic launch truncates to the target and re-enters its entry state") {
    const SimApp& app = ezfile();
    Runtime rt = make_runtime(app, 1);
    execute_event(rt, Event::ui("accept_btn", UiAction::Tap));
    execute_event(rt, Event::ui("continue_btn", UiAction::Tap));
    execute_event(rt, Event::ui("drawer", UiAction::Swipe));
    REQUIRE(rt.stack.size() == 3);
    CHECK(rt.current().state_id == "drawer_open");

    launch_dynamic(rt, "com.ezfile.ActSplash");
    CHECK(rt.stack.size() == 2);
    CHECK(rt.current().activity == "com.ezfile.ActSplash");
    CHECK(rt.current().state_id == "splash");
    CHECK(rt.globals == app.spec.globals_init);

    // Relaunching the top resets its state without shrinking the stack.
    execute_event(rt, Event::ui("continue_btn", UiAction::Tap));
    execute_event(rt, Event::ui("drawer", UiAction::Swipe));
    launch_dynamic(rt, "com.ezfile.MainNewActivity");
    CHECK(rt.stack.size() == 3);
    CHECK(rt.current().state_id == "browser");

    CHECK_THROWS_AS(launch_dynamic(rt, "com.ezfile.ResolverActivity"), NotOnStack);
}

TEST_CASE("restart resets stack and globals but keeps accumulators") {
    const SimApp& app = alltrails();
    Runtime rt = make_runtime(app, 1);
    execute_event(rt, Event::ui("nav_tab", UiAction::Tap));
    execute_event(rt, Event::back());
    rt.globals["logged_in"] = true;
    const auto covered = rt.covered_methods;
    const auto events = rt.event_count;
    REQUIRE_FALSE(covered.empty());

    restart(rt);
    CHECK(rt.stack.size() == 1);
    CHECK(rt.current().activity == app.spec.initial_activity);
    CHECK(rt.globals == app.spec.globals_init);
    CHECK(rt.covered_methods == covered);
    CHECK(rt.event_count == events);
}

TEST_CASE("identical event sequences give byte-identical runtime serializations") {
    const SimApp& app = loseweight();
    auto run = [&] {
        Runtime rt = make_runtime(app, 99);
        Rng rng(99);
        for (int i = 0; i < 400; ++i) {
            execute_event(rt, random_event(rt, rng));
        }
        return runtime_to_json(rt);
    };
    CHECK(run() == run());
}

TEST_CASE("required-extra addressing: attributes, dotted fields, flattened bundles") {
    ActivitySpec spec;
    spec.required_extras = {{"$action", std::string("go")},
                            {"person.name", std::string("ada")},
                            {"bundle1", std::string("v1")}};

    ResolvedContext ctx;
    ctx.action = Resolution::constant(std::string("go"));
    ResolvedExtra person;
    person.kind = ExtraKind::Object;
    person.fields = {{"name", std::string("ada")}};
    ctx.extras["person"] = person;
    ResolvedExtra bundle;
    bundle.kind = ExtraKind::Bundle;
    bundle.fields = {{"bundle1", std::string("v1")}};
    ctx.extras["extras"] = bundle;

    CHECK(requirements_met(spec, &ctx, {}));

    ctx.action = Resolution::constant(std::string("stop"));
    CHECK_FALSE(requirements_met(spec, &ctx, {}));
    ctx.action = Resolution::absent();
    CHECK_FALSE(requirements_met(spec, &ctx, {}));
}

TEST_CASE("crashes inside a deep-link-launched instance are attributed to the link") {
    const SimApp& app = loseweight();
    const LaunchPlan plan = prepare_launch_plan(app);
    Runtime rt = make_runtime(app, 1);
    for (const auto& launcher : plan.launchers) {
        if (launcher.target == "com.loseweight.UnitActivity") {
            REQUIRE(launch_via_deeplink(rt, launcher) == LaunchOutcome::Launched);
            break;
        }
    }
    execute_event(rt, Event::ui("apply_btn", UiAction::Tap));
    REQUIRE(rt.crash_log.size() == 1);
    CHECK(rt.crash_log[0].launched_by == LaunchedBy::DeepLink);

    // The same crash reached organically stays organic.
    Runtime organic = make_runtime(app, 1);
    execute_event(organic, Event::ui("tab_settings", UiAction::Tap));
    execute_event(organic, Event::ui("panel", UiAction::Swipe));
    execute_event(organic, Event::ui("panel", UiAction::Swipe));
    execute_event(organic, Event::ui("panel", UiAction::Swipe));
    execute_event(organic, Event::ui("unit_row", UiAction::Tap));
    execute_event(organic, Event::ui("apply_btn", UiAction::Tap));
    REQUIRE(organic.crash_log.size() == 1);
    CHECK(organic.crash_log[0].launched_by == LaunchedBy::Organic);
}
