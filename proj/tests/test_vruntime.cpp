#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "appsplit/app_model.hpp"
#include "appsplit/corpus.hpp"
#include "appsplit/decomposer.hpp"
#include "appsplit/errors.hpp"
#include "appsplit/recovery.hpp"
#include "appsplit/vruntime.hpp"
#include "support/fixtures.hpp"

using namespace appsplit;

namespace {

struct ReadyPlan {
  AppPackage app;       // original
  AppPackage rewritten; // launch-site-rewritten
  DecompositionPlan plan;
  testsupport::MemoryStore store;
};

// Demo package, decomposed and replay-repaired (C2 recovered into base), in a
// memory store — the state a device downloads from.
ReadyPlan ready_demo() {
  ReadyPlan r;
  r.app = testsupport::demo_app();
  DecompositionPlan raw = decompose(r.app, testsupport::demo_selection(), {});
  auto [fixed, report] = recover(
      r.app, raw, {testsupport::demo_launch_script(), testsupport::demo_visit_a3_script()});
  r.plan = std::move(fixed);
  r.rewritten = rewrite_launch_sites(r.app, r.plan);
  r.store.put_plan(r.plan, r.rewritten);
  return r;
}

using CallbackSeq = std::vector<std::pair<std::string, std::string>>;

}  // namespace

TEST_CASE("intent resolution") {
  Manifest m;
  m.launcher_activity = "Hub";
  m.activities = {
      ActivityDecl{"Hub", {}, false},
      ActivityDecl{"View2", {IntentFilter{"act.view", {"cat.a"}}}, false},
      ActivityDecl{"View5", {IntentFilter{"act.view", {"cat.a", "cat.b"}}}, false},
  };

  CHECK(resolve_intent(m, IntentObj::explicit_to("View5")) == "View5");
  CHECK_THROWS_AS(resolve_intent(m, IntentObj::explicit_to("Nope")), UnknownActivity);
  // Two matches: lexicographically smallest wins.
  CHECK(resolve_intent(m, IntentObj::implicit("act.view", {"cat.a"})) == "View2");
  CHECK(resolve_intent(m, IntentObj::implicit("act.view", {"cat.a", "cat.b"})) == "View5");
  CHECK_THROWS_AS(resolve_intent(m, IntentObj::implicit("act.edit")), NoMatchingActivity);
}

TEST_CASE("install_base registers the app once") {
  ReadyPlan r = ready_demo();
  VirtualDevice device;
  InstallState& state = device.install_base(r.store, "demo");

  CHECK(state.app_id == "demo");
  CHECK(state.base_classes.count("A1") == 1);
  CHECK(state.base_classes.count("C2") == 1);  // recovered into base
  CHECK(state.has_class("A1"));
  CHECK_FALSE(state.has_class("A3"));  // feature not loaded yet
  CHECK(state.activity_available("A1"));
  CHECK_FALSE(state.activity_available("A3"));
  CHECK(state.manifest.launcher_activity == "A1");
  CHECK(device.metrics().fetches.empty());  // installation is not metered

  CHECK_THROWS_AS(device.install_base(r.store, "demo"), AlreadyInstalled);
  CHECK_THROWS_AS(device.launch_app("ghost"), NotInstalled);
}

TEST_CASE("launch and navigation drive the lifecycle through stub slots") {
  ReadyPlan r = ready_demo();
  VirtualDevice device;
  device.install_base(r.store, "demo");

  device.launch_app("demo");
  NavResult first = device.navigate(r.store, "demo", IntentObj::explicit_to("A3"));
  CHECK(first.kind == NavResult::Kind::Cold);
  CHECK(first.activity == "A3");
  CHECK(first.bytes_fetched == 1000);

  device.back("demo");
  NavResult second = device.navigate(r.store, "demo", IntentObj::explicit_to("A3"));
  CHECK(second.kind == NavResult::Kind::Warm);
  CHECK(second.bytes_fetched == 0);

  const RunMetrics& m = device.metrics();
  CHECK(m.fetches == std::vector<std::pair<std::string, std::uint64_t>>{{"A3", 1000}});
  CHECK(m.cold_starts == 1);
  // launch + warm A3 visit; the cold visit is not double counted.
  CHECK(m.warm_starts == 2);

  std::vector<LifecycleEvent> expected = {
      {LifecycleCallback::Create, "A1", 0},  {LifecycleCallback::Start, "A1", 0},
      {LifecycleCallback::Resume, "A1", 0},  {LifecycleCallback::Pause, "A1", 0},
      {LifecycleCallback::Create, "A3", 1},  {LifecycleCallback::Start, "A3", 1},
      {LifecycleCallback::Resume, "A3", 1},  {LifecycleCallback::Pause, "A3", 1},
      {LifecycleCallback::Destroy, "A3", 1}, {LifecycleCallback::Resume, "A1", 0},
      {LifecycleCallback::Pause, "A1", 0},   {LifecycleCallback::Create, "A3", 1},
      {LifecycleCallback::Start, "A3", 1},   {LifecycleCallback::Resume, "A3", 1},
  };
  CHECK(m.lifecycle_events == expected);

  CHECK(device.activity_stack().size() == 2);
  CHECK(device.stubs_in_use() == 2);
}

TEST_CASE("the stub pool hands out lowest free slots and exhausts") {
  ReadyPlan r = ready_demo();
  VirtualDevice device(2);
  CHECK(device.stub_pool_size() == 2);
  device.install_base(r.store, "demo");

  device.launch_app("demo");                                    // slot 0
  device.navigate(r.store, "demo", IntentObj::explicit_to("A2"));  // slot 1
  CHECK_THROWS_AS(device.navigate(r.store, "demo", IntentObj::explicit_to("A3")),
                  StubPoolExhausted);
  // The failed start leaves the stack as it was.
  CHECK(device.activity_stack().size() == 2);

  device.back("demo");  // frees slot 1
  NavResult nav = device.navigate(r.store, "demo", IntentObj::explicit_to("A3"));
  CHECK(nav.kind == NavResult::Kind::Cold);
  CHECK(device.activity_stack().back().stub_slot == 1);

  CHECK_THROWS_AS(VirtualDevice(0), InvalidSelection);
}

TEST_CASE("back pops only this app's foreground") {
  ReadyPlan r = ready_demo();
  VirtualDevice device;
  CHECK_THROWS_AS(device.back("demo"), InvalidScript);  // empty stack
  device.install_base(r.store, "demo");
  device.launch_app("demo");

  AppPackage second = testsupport::demo_app();
  second.app_id = "other";
  DecompositionPlan second_plan = decompose(second, testsupport::demo_selection(), {});
  auto [second_fixed, rep] = recover(second, second_plan, {testsupport::demo_launch_script()});
  testsupport::MemoryStore other_store;
  other_store.put_plan(second_fixed, rewrite_launch_sites(second, second_fixed));
  device.install_base(other_store, "other");
  device.launch_app("other");

  // Foreground belongs to "other" now.
  CHECK_THROWS_AS(device.back("demo"), InvalidScript);
  device.back("other");
  // Revealed frame belongs to a different app: no resume is recorded for it.
  CHECK(device.metrics().lifecycle_events.back().callback == LifecycleCallback::Destroy);
  device.back("demo");
  CHECK(device.activity_stack().empty());
  CHECK(device.stubs_in_use() == 0);
}

TEST_CASE("prefetch pays the cold cost up front") {
  ReadyPlan r = ready_demo();
  VirtualDevice device;
  device.install_base(r.store, "demo");
  device.prefetch(r.store, "demo", {"A3"});

  CHECK(device.metrics().fetches.size() == 1);
  CHECK(device.metrics().cold_starts == 1);
  CHECK(device.install_state("demo")->feature_loaded("A3"));

  // Idempotent: nothing fetched twice.
  device.prefetch(r.store, "demo", {"A3"});
  CHECK(device.metrics().fetches.size() == 1);

  device.launch_app("demo");
  NavResult nav = device.navigate(r.store, "demo", IntentObj::explicit_to("A3"));
  CHECK(nav.kind == NavResult::Kind::Warm);
}

TEST_CASE("restore_features rebuilds state without metering") {
  ReadyPlan r = ready_demo();
  VirtualDevice device;
  device.install_base(r.store, "demo");
  device.restore_features(r.store, "demo", {"A3"});

  CHECK(device.metrics().fetches.empty());
  CHECK(device.metrics().cold_starts == 0);
  CHECK(device.install_state("demo")->feature_loaded("A3"));

  device.launch_app("demo");
  CHECK(device.navigate(r.store, "demo", IntentObj::explicit_to("A3")).kind ==
        NavResult::Kind::Warm);
}

TEST_CASE("merging is idempotent by digest and rejects conflicts") {
  // Two features sharing a helper class and a resource.
  AppPackage app;
  app.app_id = "overlap";
  app.manifest.launcher_activity = "Home";
  app.manifest.activities = {ActivityDecl{"Home", {}, false}, ActivityDecl{"F1", {}, false},
                             ActivityDecl{"F2", {}, false}};
  MethodDef use{"onCreate", {CallSite{"Shared.util", false}}, {"raw/shared"}, {}};
  app.classes = {
      ClassUnit{"Home", ClassKind::Activity, 10, {MethodDef{"onCreate", {}, {}, {}}}},
      ClassUnit{"F1", ClassKind::Activity, 10, {use}},
      ClassUnit{"F2", ClassKind::Activity, 10, {use}},
      ClassUnit{"Shared", ClassKind::Pojo, 10, {MethodDef{"util", {}, {}, {}}}},
  };
  app.resources = {ResourceItem{"raw/shared", 10, {}}};
  canonicalize(app);
  validate_package(app);

  DecompositionPlan plan = decompose(app, {"Home"}, {});
  REQUIRE(plan.features.at("F1").classes.count("Shared") == 1);
  REQUIRE(plan.features.at("F2").classes.count("Shared") == 1);

  testsupport::MemoryStore store;
  store.put_plan(plan, app);
  VirtualDevice device;
  InstallState& state = device.install_base(store, "overlap");

  BundleArchive f1 = unpack_bundle(pack_bundle(plan.features.at("F1"), app));
  merge_resources(state, f1);
  load_code(state, f1);
  std::size_t classes_before = state.class_units.size();

  // Identical content arriving again (the F2 copy) is a no-op.
  BundleArchive f2 = unpack_bundle(pack_bundle(plan.features.at("F2"), app));
  merge_resources(state, f2);
  load_code(state, f2);
  CHECK(state.class_units.size() == classes_before + 1);  // F2 itself only

  // Same names, different content: refused, state untouched.
  AppPackage tampered = app;
  for (ClassUnit& c : tampered.classes)
    if (c.name == "Shared") c.methods.push_back(MethodDef{"extra", {}, {}, {}});
  for (ResourceItem& res : tampered.resources)
    if (res.id == "raw/shared") res.refs.push_back("raw/shared2");
  BundleArchive bad = unpack_bundle(pack_bundle(plan.features.at("F2"), tampered));
  CHECK_THROWS_AS(load_code(state, bad), LoadConflict);
  CHECK_THROWS_AS(merge_resources(state, bad), MergeConflict);
  CHECK(state.class_units.at("Shared").methods.size() == 1);
  CHECK(state.resource_items.at("raw/shared").refs.empty());

  CHECK(digest_class(*app.find_class("Shared")) !=
        digest_class(*tampered.find_class("Shared")));
}

TEST_CASE("sessions on the virtual device match direct execution") {
  ReadyPlan r = ready_demo();
  VirtualDevice device;
  device.install_base(r.store, "demo");

  for (const ReplayScript& script :
       {testsupport::demo_launch_script(), testsupport::demo_visit_a3_script()}) {
    RunMetrics session = device.run_session(r.store, "demo", script);
    RunMetrics direct = run_direct(r.app, script);
    CHECK(callback_sequence(session) == callback_sequence(direct));
  }

  // Replaying the same script again: warm now, same observable lifecycle.
  RunMetrics again = device.run_session(r.store, "demo", testsupport::demo_visit_a3_script());
  CHECK(again.cold_starts == 0);
  CHECK(again.fetches.empty());
  CHECK(callback_sequence(again) ==
        callback_sequence(run_direct(r.app, testsupport::demo_visit_a3_script())));
}

TEST_CASE("direct execution reports hidden references as runtime faults") {
  ReadyPlan r = ready_demo();

  // Un-recovered plan: the dynamic call to C2 faults at launch.
  DecompositionPlan raw = decompose(r.app, testsupport::demo_selection(), {});
  testsupport::MemoryStore raw_store;
  raw_store.put_plan(raw, rewrite_launch_sites(r.app, raw));
  VirtualDevice device;
  device.install_base(raw_store, "demo");
  CHECK_THROWS_AS(device.launch_app("demo"), MissingAtRuntime);
  CHECK_THROWS_AS(device.run_session(raw_store, "demo", testsupport::demo_launch_script()),
                  MissingAtRuntime);
}

TEST_CASE("session scripts are validated like replays") {
  ReadyPlan r = ready_demo();
  VirtualDevice device;
  device.install_base(r.store, "demo");
  CHECK_THROWS_AS(device.run_session(r.store, "ghost", testsupport::demo_launch_script()),
                  NotInstalled);

  ReplayScript no_launch;
  no_launch.name = "bad";
  no_launch.target_activity = "A3";
  no_launch.actions = {Action{Action::Kind::Navigate, "", 0}};
  CHECK_THROWS_AS(device.run_session(r.store, "demo", no_launch), InvalidScript);

  ReplayScript bad_tap = testsupport::demo_launch_script();
  bad_tap.actions.push_back(Action{Action::Kind::Tap, "A1.noSuch", 0});
  CHECK_THROWS_AS(device.run_session(r.store, "demo", bad_tap), InvalidScript);
}

TEST_CASE("store failures leave the device unchanged") {
  ReadyPlan r = ready_demo();
  testsupport::MemoryStore empty_store;
  VirtualDevice device;
  CHECK_THROWS_AS(device.install_base(empty_store, "demo"), StoreUnavailable);

  device.install_base(r.store, "demo");
  device.launch_app("demo");
  std::size_t events = device.metrics().lifecycle_events.size();
  CHECK_THROWS_AS(device.navigate(empty_store, "demo", IntentObj::explicit_to("A3")),
                  StoreUnavailable);
  CHECK(device.metrics().lifecycle_events.size() == events);
  CHECK(device.metrics().fetches.empty());
  CHECK_FALSE(device.install_state("demo")->feature_loaded("A3"));
  CHECK(device.activity_stack().size() == 1);
}

TEST_CASE("generated corpus sessions match direct execution end to end") {
  CorpusParams params;
  params.seed = 91;
  params.dynamic_edge_rate = 0.5;
  std::vector<AppPackage> corpus = gen_corpus(params, 8);

  for (const AppPackage& app : corpus) {
    DecompositionPlan plan = decompose(app, {app.manifest.launcher_activity}, {});
    std::vector<ReplayScript> scripts = gen_scripts(app);
    auto [fixed, report] = recover(app, plan, scripts);
    testsupport::MemoryStore store;
    store.put_plan(fixed, rewrite_launch_sites(app, fixed));

    VirtualDevice device(64);
    device.install_base(store, app.app_id);
    for (const ReplayScript& script : scripts) {
      RunMetrics session = device.run_session(store, app.app_id, script);
      RunMetrics direct = run_direct(app, script);
      CHECK(callback_sequence(session) == callback_sequence(direct));
    }
  }
}
