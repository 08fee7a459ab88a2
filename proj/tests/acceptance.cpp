// Release gate for the end-to-end guarantees. Each check prints exactly one
// PASS/FAIL line; the binary exits nonzero if any check fails.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "appsplit/app_model.hpp"
#include "appsplit/corpus.hpp"
#include "appsplit/decomposer.hpp"
#include "appsplit/graphs.hpp"
#include "appsplit/plan_io.hpp"
#include "appsplit/recovery.hpp"
#include "appsplit/usage_analytics.hpp"
#include "appsplit/vruntime.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/subprocess.hpp"

using namespace appsplit;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void require(bool cond, const std::string& why) {
  if (!cond) throw std::runtime_error(why);
}

std::string cli() { return std::string(APPSPLIT_CLI_PATH); }

std::uint64_t class_bytes(const AppPackage& app, const std::set<std::string>& names) {
  std::uint64_t sum = 0;
  for (const std::string& n : names) sum += app.find_class(n)->size_bytes;
  return sum;
}

std::uint64_t resource_bytes(const AppPackage& app, const std::set<std::string>& ids) {
  std::uint64_t sum = 0;
  for (const std::string& id : ids) sum += app.find_resource(id)->size_bytes;
  return sum;
}

UsageProfile profile_with_users(const std::vector<int>& user_counts) {
  UsageProfile p;
  p.app_id = "x";
  for (std::size_t i = 0; i < user_counts.size(); ++i) {
    ActivityUsage usage;
    usage.visits = static_cast<std::uint64_t>(user_counts[i]);
    for (int u = 0; u < user_counts[i]; ++u)
      usage.distinct_users.insert("u" + std::to_string(i) + "-" + std::to_string(u));
    p.by_activity["Act" + std::to_string(i)] = usage;
  }
  return p;
}

// Two-activity app whose second activity reaches a k-link helper chain only
// through a reflective call, so replay repair must find one link per pass.
AppPackage chain_app(int k) {
  AppPackage app;
  app.app_id = "chain" + std::to_string(k);
  app.manifest.launcher_activity = "Home";
  app.manifest.activities = {ActivityDecl{"Home", {}, false},
                             ActivityDecl{"Extra", {}, false}};
  app.classes.push_back(
      ClassUnit{"Home", ClassKind::Activity, 10,
                {MethodDef{"onCreate", {}, {},
                           {LaunchSite{LaunchSite::Kind::Explicit, "Extra", "", {}, false}}}}});
  MethodDef extra_entry{"onCreate", {CallSite{"Hidden1.run", true}}, {}, {}};
  app.classes.push_back(ClassUnit{"Extra", ClassKind::Activity, 10, {extra_entry}});
  for (int i = 1; i <= k; ++i) {
    MethodDef run{"run", {}, {}, {}};
    if (i < k) run.calls.push_back(CallSite{"Hidden" + std::to_string(i + 1) + ".run", false});
    app.classes.push_back(ClassUnit{"Hidden" + std::to_string(i), ClassKind::Pojo, 5, {run}});
  }
  canonicalize(app);
  validate_package(app);
  return app;
}

ReplayScript visit_extra() {
  ReplayScript s;
  s.name = "visit-Extra";
  s.target_activity = "Extra";
  s.actions = {Action{Action::Kind::Launch, "", 0}, Action{Action::Kind::Navigate, "", 0}};
  return s;
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Waits for a background `serve` process to print its address.
std::string poll_store_url(const fs::path& log, double timeout_s) {
  auto t0 = Clock::now();
  while (seconds_since(t0) < timeout_s) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    std::string text = read_text_file(log);
    auto at = text.find("http://");
    if (at == std::string::npos) continue;
    auto end = text.find('/', at + 7);
    if (end != std::string::npos) return text.substr(at, end - at);
  }
  return "";
}

// ---------------------------------------------------------------------------

void worked_example_exact() {
  auto t0 = Clock::now();
  AppPackage app = testsupport::demo_app();
  DecompositionPlan plan = decompose(app, testsupport::demo_selection(), {});

  require(plan.base.classes == std::set<std::string>{"A1", "A2", "C0", "S1"},
          "base bundle classes are wrong");
  require(plan.base.resources ==
              std::set<std::string>{"drawable/R2", "drawable/R3", "layout/R1"},
          "base bundle resources are wrong");
  require(plan.base.size_bytes == 2700, "base bundle must be 2700 bytes, got " +
                                            std::to_string(plan.base.size_bytes));
  require(plan.features.size() == 1 && plan.features.count("A3") == 1,
          "expected exactly one feature bundle, for A3");
  const FeatureBundle& fb = plan.features.at("A3");
  require(fb.classes == std::set<std::string>{"A3"} &&
              fb.resources == std::set<std::string>{"layout/R4"} && fb.size_bytes == 1000,
          "A3 feature bundle must be {A3}/{layout/R4}, 1000 bytes");
  require(plan.original_size_bytes == 3900, "package totals 3900 bytes");

  auto [fixed, report] =
      recover(app, plan,
              {testsupport::demo_launch_script(), testsupport::demo_visit_a3_script()});
  require(report.total_iterations == 1, "recovery must take exactly one iteration, took " +
                                            std::to_string(report.total_iterations));
  require(report.added.size() == 1, "recovery must add exactly one item");
  require(report.added[0].bundle == "base" &&
              report.added[0].item.kind == MissingItem::Kind::Class &&
              report.added[0].item.name == "C2",
          "the reflectively called helper C2 must land in the base bundle");
  require(fixed.base.classes.count("C2") == 1 && fixed.base.size_bytes == 2900,
          "repaired base must contain C2 and grow to 2900 bytes");
  require(fixed.features.at("A3") == plan.features.at("A3"),
          "the feature bundle must be untouched by the repair");

  double took = seconds_since(t0);
  require(took < 1.0, "took " + std::to_string(took) + "s, limit 1s");
}

void closures_match_oracles() {
  auto t0 = Clock::now();
  CorpusParams params;
  params.seed = 101;
  params.activity_count = {3, 6};
  params.pojo_count = {5, 24};
  params.resource_count = {8, 60};
  params.share_ratio = 0.5;
  params.dynamic_edge_rate = 0.3;

  for (int i = 0; i < 300; ++i) {
    AppPackage app = gen_app(params, i);
    require(app.classes.size() <= 50, app.app_id + " exceeds the 50-class cap");
    require(app.resources.size() <= 80, app.app_id + " exceeds the 80-resource cap");

    CallGraph cg = build_call_graph(app, false);
    ResourceGraph rg = build_resource_graph(app);
    ReferRelation refer = build_refer_relation(app);
    for (const std::string& act : app.activity_names()) {
      require(activity_related_classes(cg, app, act) ==
                  testsupport::related_classes_oracle(app, act),
              "class closure mismatch at " + app.app_id + "/" + act);
    }
    for (const ClassUnit& c : app.classes) {
      require(class_related_resources(rg, refer, c.name) ==
                  testsupport::related_resources_oracle(app, c.name),
              "resource closure mismatch at " + app.app_id + "/" + c.name);
    }
  }
  double took = seconds_since(t0);
  require(took < 60.0, "took " + std::to_string(took) + "s, limit 60s");
}

void partition_invariants_hold() {
  CorpusParams params;
  params.seed = 202;
  params.share_ratio = 0.5;
  params.dynamic_edge_rate = 0.25;

  for (int i = 0; i < 200; ++i) {
    AppPackage app = gen_app(params, i);
    DecompositionPlan plan = decompose(app, {app.manifest.launcher_activity}, {});
    const std::string& id = app.app_id;

    std::set<std::string> union_classes = plan.base.classes;
    std::set<std::string> union_resources = plan.base.resources;
    for (const auto& [act, fb] : plan.features) {
      require(fb.classes.count(act) == 1, id + ": feature must contain its own activity");
      for (const std::string& c : fb.classes)
        require(plan.base.classes.count(c) == 0, id + ": class '" + c + "' is in base and " + act);
      for (const std::string& r : fb.resources)
        require(plan.base.resources.count(r) == 0,
                id + ": resource '" + r + "' is in base and " + act);
      require(fb.size_bytes ==
                  class_bytes(app, fb.classes) + resource_bytes(app, fb.resources),
              id + ": feature size field diverges from its members");
      union_classes.insert(fb.classes.begin(), fb.classes.end());
      union_resources.insert(fb.resources.begin(), fb.resources.end());
    }

    require(plan.base.assets.size() == app.assets.size() &&
                plan.base.other.size() == app.other.size(),
            id + ": every asset and extra payload belongs to the base bundle");
    std::uint64_t extras = 0;
    for (const AssetItem& a : app.assets) extras += a.size_bytes;
    for (const OtherPayload& o : app.other) extras += o.size_bytes;
    require(plan.base.size_bytes == class_bytes(app, plan.base.classes) +
                                        resource_bytes(app, plan.base.resources) + extras,
            id + ": base size field diverges from its members");

    // Static closure coverage: everything an activity can statically reach is
    // in the base or in that activity's own feature bundle.
    CallGraph cg = build_call_graph(app, false);
    ResourceGraph rg = build_resource_graph(app);
    ReferRelation refer = build_refer_relation(app);
    for (const std::string& act : app.activity_names()) {
      std::set<std::string> classes = activity_related_classes(cg, app, act);
      const FeatureBundle* fb =
          plan.features.count(act) != 0 ? &plan.features.at(act) : nullptr;
      for (const std::string& c : classes) {
        bool covered = plan.base.classes.count(c) != 0 ||
                       (fb != nullptr && fb->classes.count(c) != 0);
        require(covered, id + ": " + act + " statically needs uncovered class '" + c + "'");
        for (const std::string& r : class_related_resources(rg, refer, c)) {
          bool rc = plan.base.resources.count(r) != 0 ||
                    (fb != nullptr && fb->resources.count(r) != 0);
          require(rc, id + ": " + act + " statically needs uncovered resource '" + r + "'");
        }
      }
    }

    require(plan.original_size_bytes == total_size(app),
            id + ": recorded original size diverges from the package");
    std::uint64_t unique = class_bytes(app, union_classes) +
                           resource_bytes(app, union_resources) + extras;
    require(unique <= plan.original_size_bytes,
            id + ": bundles cover more unique bytes than the package holds");
    require(plan.saving_ratio() >= 0.0 && plan.saving_ratio() < 1.0,
            id + ": saving ratio out of range");
  }
}

void recovery_converges() {
  for (int k = 1; k <= 8; ++k) {
    AppPackage app = chain_app(k);
    auto [fixed, report] = recover(app, decompose(app, {"Home"}, {}), {visit_extra()});
    require(report.total_iterations == k,
            "a " + std::to_string(k) + "-link hidden chain must take exactly " +
                std::to_string(k) + " iterations, took " +
                std::to_string(report.total_iterations));
    require(static_cast<int>(report.added.size()) == k,
            "one recovered item per iteration, got " + std::to_string(report.added.size()));
    for (const auto& a : report.added)
      require(a.bundle == "Extra", "hidden chain items belong to the Extra feature");
    RunTrace trace = execute_script(app, bundle_set(fixed), visit_extra());
    require(!trace.fault.has_value() && trace.reached_target,
            "the repaired plan must replay clean");
  }

  CorpusParams params;
  params.seed = 404;
  params.dynamic_edge_rate = 0.6;
  int bundles = 0;
  int fast = 0;
  for (int i = 0; i < 50; ++i) {
    AppPackage app = gen_app(params, i);
    std::vector<ReplayScript> scripts = gen_scripts(app);
    auto [fixed, report] =
        recover(app, decompose(app, {app.manifest.launcher_activity}, {}), scripts);

    BundleSet set = bundle_set(fixed);
    for (const ReplayScript& s : scripts) {
      RunTrace trace = execute_script(app, set, s);
      require(!trace.fault.has_value() && trace.reached_target,
              app.app_id + "/" + s.name + " still faults after recovery");
    }

    int total = 1 + static_cast<int>(fixed.features.size());
    bundles += total;
    int slow = 0;
    for (const auto& [bundle, n] : report.iterations)
      if (n > 10) ++slow;
    fast += total - slow;
  }
  require(fast * 5 >= bundles * 4, "only " + std::to_string(fast) + " of " +
                                       std::to_string(bundles) +
                                       " bundles converged within 10 iterations");
}

void virtualized_matches_direct() {
  CorpusParams params;
  params.seed = 505;
  params.share_ratio = 0.4;
  params.dynamic_edge_rate = 0.5;

  for (int i = 0; i < 50; ++i) {
    AppPackage app = gen_app(params, i);
    std::vector<ReplayScript> scripts = gen_scripts(app);
    auto [plan, report] =
        recover(app, decompose(app, {app.manifest.launcher_activity}, {}), scripts);
    AppPackage rewritten = rewrite_launch_sites(app, plan);

    testsupport::MemoryStore store;
    store.put_plan(plan, rewritten);
    VirtualDevice device(64);
    device.install_base(store, app.app_id);

    for (const ReplayScript& s : scripts) {
      RunMetrics session = device.run_session(store, app.app_id, s);  // fault = exception
      RunMetrics direct = run_direct(app, s);
      require(callback_sequence(session) == callback_sequence(direct),
              app.app_id + "/" + s.name + ": lifecycle trace diverges from direct execution");
    }
  }
}

void fetch_once_and_state_closure() {
  CorpusParams params;
  params.seed = 606;
  params.activity_count = {2, 4};
  params.pojo_count = {2, 6};
  params.resource_count = {4, 8};
  params.dynamic_edge_rate = 0.0;

  std::mt19937 rng(606);
  int sequences = 0;
  for (int i = 0; i < 100; ++i) {
    AppPackage app = gen_app(params, i);
    DecompositionPlan plan = decompose(app, {app.manifest.launcher_activity}, {});
    AppPackage rewritten = rewrite_launch_sites(app, plan);
    testsupport::MemoryStore store;
    store.put_plan(plan, rewritten);
    std::vector<std::string> acts = app.activity_names();

    for (int run = 0; run < 100; ++run) {
      VirtualDevice device(32);
      device.install_base(store, app.app_id);
      device.launch_app(app.app_id);

      int steps = 3 + static_cast<int>(rng() % 10);
      for (int step = 0; step < steps; ++step) {
        bool go_back = device.activity_stack().size() >= 16 ||
                       (device.activity_stack().size() > 1 && rng() % 3 == 0);
        if (go_back) {
          device.back(app.app_id);
          continue;
        }
        const std::string& target = acts[rng() % acts.size()];
        std::size_t before = device.metrics().fetches.size();
        NavResult res = device.navigate(store, app.app_id, IntentObj::explicit_to(target));
        std::size_t after = device.metrics().fetches.size();
        if (res.kind == NavResult::Kind::Warm) {
          require(after == before && res.bytes_fetched == 0,
                  app.app_id + ": a warm start moved bytes");
        } else {
          require(after == before + 1 && device.metrics().fetches.back().first == target,
                  app.app_id + ": a cold start must record exactly one fetch");
        }
      }

      std::map<std::string, int> per_feature;
      for (const auto& [act, bytes] : device.metrics().fetches) ++per_feature[act];
      for (const auto& [act, n] : per_feature)
        require(n <= 1, app.app_id + ": feature '" + act + "' fetched " +
                            std::to_string(n) + " times");

      const InstallState* state = device.install_state(app.app_id);
      std::set<std::string> expect_classes = plan.base.classes;
      std::set<std::string> expect_resources = plan.base.resources;
      for (const std::string& f : state->loaded_features) {
        require(plan.features.count(f) == 1,
                app.app_id + ": loaded unknown feature '" + f + "'");
        const FeatureBundle& fb = plan.features.at(f);
        expect_classes.insert(fb.classes.begin(), fb.classes.end());
        expect_resources.insert(fb.resources.begin(), fb.resources.end());
      }
      std::set<std::string> have_classes;
      for (const auto& [name, unit] : state->class_units) have_classes.insert(name);
      std::set<std::string> have_resources;
      for (const auto& [rid, item] : state->resource_items) have_resources.insert(rid);
      require(have_classes == expect_classes,
              app.app_id + ": installed classes diverge from base plus loaded features");
      require(have_resources == expect_resources,
              app.app_id + ": installed resources diverge from base plus loaded features");
      ++sequences;
    }
  }
  require(sequences == 10000, "expected 10000 randomized sequences");
}

void entropy_reference() {
  for (int n : {2, 3, 4, 7, 16, 100}) {
    UsageProfile p = profile_with_users(std::vector<int>(static_cast<std::size_t>(n), 5));
    require(std::fabs(usage_entropy(p) - std::log(static_cast<double>(n))) <= 1e-12,
            "uniform distribution over " + std::to_string(n) + " must give ln(n)");
  }
  require(usage_entropy(profile_with_users({9})) == 0.0,
          "single-activity usage carries no information");
  require(usage_entropy(UsageProfile{}) == 0.0, "empty usage carries no information");
  require(std::fabs(usage_entropy(profile_with_users({2, 1, 1})) - 1.039720770839918) <= 1e-12,
          "distinct-user counts (2,1,1) must give 1.5*ln(2)");

  std::mt19937 rng(707);
  for (int round = 0; round < 1000; ++round) {
    int n = 1 + static_cast<int>(rng() % 50);
    std::vector<int> users(static_cast<std::size_t>(n));
    std::vector<std::uint64_t> counts;
    int nonzero = 0;
    for (int i = 0; i < n; ++i) {
      users[static_cast<std::size_t>(i)] = static_cast<int>(rng() % 100);
      if (users[static_cast<std::size_t>(i)] > 0) {
        counts.push_back(static_cast<std::uint64_t>(users[static_cast<std::size_t>(i)]));
        ++nonzero;
      }
    }
    double h = usage_entropy(profile_with_users(users));
    double oracle = static_cast<double>(testsupport::entropy_oracle(counts));
    require(std::fabs(h - oracle) <= 1e-9,
            "entropy diverges from the long-double reference at round " +
                std::to_string(round));
    if (nonzero > 0)
      require(h <= std::log(static_cast<double>(nonzero)) + 1e-9,
              "entropy exceeds ln(activity count) at round " + std::to_string(round));
  }
}

void saving_ratio_from_archives() {
  testsupport::TempDir tmp;
  fs::path plans = tmp.path() / "plans";
  CorpusParams params;
  params.seed = 808;
  params.dynamic_edge_rate = 0.3;

  std::vector<double> ratios;
  for (int i = 0; i < 10; ++i) {
    AppPackage app = gen_app(params, i);
    DecompositionPlan plan = decompose(app, {app.manifest.launcher_activity}, {});
    AppPackage rewritten = rewrite_launch_sites(app, plan);
    write_plan_dir(plans / app.app_id, plan, rewritten);

    // Recompute the ratio from the artifacts alone.
    BundleArchive arch = unpack_bundle(read_file(plans / app.app_id / "base.abundle"));
    std::uint64_t base_sum = 0;
    for (const ClassUnit& c : arch.class_units) base_sum += c.size_bytes;
    for (const ResourceItem& r : arch.resource_items) base_sum += r.size_bytes;
    for (const AssetItem& a : arch.asset_items) base_sum += a.size_bytes;
    for (const OtherPayload& o : arch.other_payloads) base_sum += o.size_bytes;
    require(base_sum == arch.base.size_bytes,
            app.app_id + ": archive size field diverges from its records");

    AppPackage stored = parse_package(read_file(plans / app.app_id / "app.apkg"));
    std::uint64_t original = total_size(stored);
    require(original == plan.original_size_bytes,
            app.app_id + ": stored package size diverges from the plan");

    double expected = 1.0 - static_cast<double>(base_sum) / static_cast<double>(original);
    require(plan.saving_ratio() == expected,
            app.app_id + ": saving ratio must equal 1 - base/original exactly");
    ratios.push_back(expected);
  }

  testsupport::CmdResult stats = testsupport::run_cmd(cli() + " stats --plans " + plans.string());
  require(stats.exit_code == 0, "stats command failed: " + stats.output);
  json out = json::parse(stats.output);
  require(out.at("plans").get<int>() == 10, "stats must count 10 plans");
  require(out.at("median_saving_ratio").is_number(), "stats must report a median saving ratio");
  require(std::fabs(out.at("median_saving_ratio").get<double>() -
                    nearest_rank_quantile(ratios, 0.5)) <= 1e-12,
          "reported median diverges from the recomputed one");
  for (const char* field :
       {"saving_ratio", "base_bundle_bytes", "feature_bundle_bytes", "features_per_plan"}) {
    require(out.contains(field), std::string("stats output lacks '") + field + "'");
    const json& d = out.at(field);
    for (const char* key : {"count", "mean", "p10", "p50", "p90"})
      require(d.contains(key),
              std::string(field) + " distribution lacks its '" + key + "' field");
  }
}

void store_round_trip() {
  auto t0 = Clock::now();
  testsupport::TempDir tmp;

  AppPackage app = testsupport::demo_app();
  auto [plan, report] =
      recover(app, decompose(app, testsupport::demo_selection(), {}),
              {testsupport::demo_launch_script(), testsupport::demo_visit_a3_script()});
  AppPackage rewritten = rewrite_launch_sites(app, plan);
  fs::path dir = tmp.path() / "plan";
  write_plan_dir(dir, plan, rewritten);
  fs::path script = tmp.path() / "visit-A3.txt";
  write_file(script, serialize_script(testsupport::demo_visit_a3_script()));

  fs::path log = tmp.path() / "serve.log";
  testsupport::BackgroundProc server(cli() + " serve --plan " + dir.string() + " --port 0",
                                     log.string());
  std::string url = poll_store_url(log, 3.0);
  require(!url.empty(), "server never reported its address");

  fs::path metrics_path = tmp.path() / "metrics.json";
  testsupport::CmdResult sim = testsupport::run_cmd(
      cli() + " simulate --store-url " + url + " --app-id demo --script " + script.string() +
      " --report " + metrics_path.string());
  require(sim.exit_code == 0, "simulate against the live store failed: " + sim.output);

  json metrics = json::parse(read_text_file(metrics_path));
  require(metrics.at("fetches").size() == 1, "the session must fetch exactly one bundle");
  const json& fetch = metrics.at("fetches").at(0);
  require(fetch.at("activity").get<std::string>() == "A3", "the fetched bundle must be A3");
  BundleArchive on_disk = unpack_bundle(read_file(dir / "features" / "A3.abundle"));
  require(fetch.at("bytes").get<std::uint64_t>() == on_disk.size_bytes,
          "cold fetch bytes must equal the served archive's size");
  require(metrics.at("cold_starts").get<int>() == 1, "exactly one cold start expected");

  testsupport::CmdResult missing = testsupport::run_cmd(
      cli() + " simulate --store-url " + url + " --app-id ghost --script " + script.string());
  require(missing.exit_code == 4,
          "a missing app must exit 4, got " + std::to_string(missing.exit_code));
  server.terminate();

  testsupport::CmdResult dead = testsupport::run_cmd(
      cli() + " simulate --store-url http://127.0.0.1:1 --app-id demo --script " +
      script.string());
  require(dead.exit_code == 4,
          "an unreachable store must exit 4, got " + std::to_string(dead.exit_code));

  double took = seconds_since(t0);
  require(took < 5.0, "took " + std::to_string(took) + "s, limit 5s");
}

}  // namespace

int main() {
  struct Check {
    std::string name;
    std::function<void()> body;
  };
  std::vector<Check> checks = {
      {"worked example decomposes and recovers exactly", worked_example_exact},
      {"reachability closures match brute-force fixpoints", closures_match_oracles},
      {"decomposition partition invariants hold across a corpus", partition_invariants_hold},
      {"replay recovery converges one missing item per iteration", recovery_converges},
      {"virtualized sessions match direct execution", virtualized_matches_direct},
      {"features are fetched at most once and install state stays closed",
       fetch_once_and_state_closure},
      {"usage entropy matches a high-precision reference", entropy_reference},
      {"saving ratios recompute exactly from the written archives", saving_ratio_from_archives},
      {"bundle store round trip over HTTP", store_round_trip},
  };

  int failed = 0;
  for (const Check& check : checks) {
    try {
      check.body();
      std::cout << "PASS — " << check.name << "\n";
    } catch (const std::exception& e) {
      ++failed;
      std::cout << "FAIL — " << check.name << ": " << e.what() << "\n";
    }
  }
  std::cout << (checks.size() - static_cast<std::size_t>(failed)) << "/" << checks.size()
            << " checks passed\n";
  return failed == 0 ? 0 : 1;
}
