// appsplit: decompose app packages into on-demand bundles, repair them from
// replay scripts, and simulate installs on a virtual device.
//
// Exit codes: 0 success, 1 I/O or internal failure, 2 invalid selection or
// parameters, 3 recovery did not terminate, 4 bundle store unreachable.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "appsplit/app_model.hpp"
#include "appsplit/bundle_server.hpp"
#include "appsplit/bundle_store.hpp"
#include "appsplit/corpus.hpp"
#include "appsplit/decomposer.hpp"
#include "appsplit/errors.hpp"
#include "appsplit/graphs.hpp"
#include "appsplit/plan_io.hpp"
#include "appsplit/recovery.hpp"
#include "appsplit/usage_analytics.hpp"
#include "appsplit/vruntime.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_text(const fs::path& path) {
  appsplit::Bytes bytes = appsplit::read_file(path);
  return std::string(bytes.begin(), bytes.end());
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    appsplit::write_file(out_path, text);
  }
}

// ---------------------------------------------------------------------------
// decompose

struct DecomposeOpts {
  std::string app_path;
  std::string out_dir;
  std::vector<std::string> activities;
  std::string usage_path;
  double coverage = 0.8;
  std::string whitelist_path;
};

int cmd_decompose(const DecomposeOpts& opt) {
  appsplit::AppPackage app = appsplit::parse_package(appsplit::read_file(opt.app_path));

  appsplit::WhiteList wl;
  if (!opt.whitelist_path.empty())
    wl = appsplit::whitelist_from_json_text(read_text(opt.whitelist_path));

  std::set<std::string> sel;
  double entropy = -1.0;
  double feature_ratio = -1.0;
  if (!opt.activities.empty()) {
    sel.insert(opt.activities.begin(), opt.activities.end());
  } else if (!opt.usage_path.empty()) {
    appsplit::UsageDataset dataset = appsplit::parse_usage_csv(read_text(opt.usage_path));
    auto profiles = appsplit::profile_usage(dataset);
    auto it = profiles.find(app.app_id);
    if (it == profiles.end())
      throw appsplit::InvalidSelection("usage log has no records for app '" + app.app_id +
                                       "'");
    std::vector<std::string> picked =
        appsplit::select_base_activities(app, it->second, opt.coverage);
    sel.insert(picked.begin(), picked.end());
    entropy = appsplit::usage_entropy(it->second);
    feature_ratio = appsplit::feature_usage_ratio(it->second, picked);
  } else {
    // Minimal base: just what every app start touches.
    sel.insert(app.manifest.launcher_activity);
    for (const appsplit::ActivityDecl& a : app.manifest.activities) {
      if (a.welcome) sel.insert(a.class_name);
    }
  }

  appsplit::DecompositionPlan plan = appsplit::decompose(app, sel, wl);
  appsplit::AppPackage rewritten = appsplit::rewrite_launch_sites(app, plan);
  appsplit::write_plan_dir(opt.out_dir, plan, rewritten);

  std::cout << "app: " << plan.app_id << "\n"
            << "base activities: " << plan.base_activities.size() << " of "
            << app.manifest.activities.size() << "\n"
            << "base bundle: " << plan.base.size_bytes << " bytes\n"
            << "feature bundles: " << plan.features.size() << "\n";
  for (const auto& [activity, fb] : plan.features)
    std::cout << "  " << activity << ": " << fb.size_bytes << " bytes\n";
  std::cout << "original size: " << plan.original_size_bytes << " bytes\n"
            << "saving ratio: " << plan.saving_ratio() << "\n";
  if (entropy >= 0.0) {
    std::cout << "usage entropy: " << entropy << "\n"
              << "feature usage ratio: " << feature_ratio << "\n";
  }
  std::cout << "plan written to " << opt.out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// recover

struct RecoverOpts {
  std::string plan_dir;
  std::vector<std::string> script_paths;
  std::string report_path;
};

std::vector<appsplit::ReplayScript> load_scripts(const std::vector<std::string>& paths) {
  std::vector<fs::path> files;
  for (const std::string& p : paths) {
    if (fs::is_directory(p)) {
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.path().extension() == ".txt") files.push_back(entry.path());
      }
    } else {
      files.push_back(p);
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<appsplit::ReplayScript> scripts;
  scripts.reserve(files.size());
  for (const fs::path& f : files)
    scripts.push_back(appsplit::parse_script(read_text(f), f.stem().string()));
  return scripts;
}

int cmd_recover(const RecoverOpts& opt) {
  appsplit::LoadedPlan loaded = appsplit::load_plan_dir(opt.plan_dir);
  std::vector<appsplit::ReplayScript> scripts = load_scripts(opt.script_paths);
  if (scripts.empty()) throw appsplit::InvalidSelection("no replay scripts given");

  auto [plan, report] = appsplit::recover(loaded.app, loaded.plan, scripts);
  appsplit::write_plan_dir(opt.plan_dir, plan, loaded.app);

  std::string report_path = opt.report_path.empty()
                                ? appsplit::PlanPaths{opt.plan_dir}.recovery_report().string()
                                : opt.report_path;
  appsplit::write_file(report_path, appsplit::recovery_report_to_json(report));

  std::cout << "scripts replayed: " << scripts.size() << "\n"
            << "items recovered: " << report.added.size() << "\n"
            << "iterations: " << report.total_iterations << "\n";
  for (const auto& [bundle, count] : report.iterations)
    std::cout << "  " << bundle << ": " << count << "\n";
  std::cout << "report written to " << report_path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOpts {
  std::string plan_dir;
  std::string store_url;
  std::string app_id;
  std::string script_path;
  std::string report_path;
  std::string state_path;
  int stub_pool = 16;
};

int cmd_simulate(const SimulateOpts& opt) {
  std::unique_ptr<appsplit::BundleStore> store;
  std::string app_id = opt.app_id;
  if (!opt.plan_dir.empty()) {
    auto plan_store = std::make_unique<appsplit::PlanDirStore>(opt.plan_dir);
    if (app_id.empty()) app_id = plan_store->app_id();
    store = std::move(plan_store);
  } else {
    if (app_id.empty())
      throw appsplit::InvalidSelection("--store-url requires --app-id");
    store = std::make_unique<appsplit::HttpStore>(opt.store_url);
  }

  appsplit::ReplayScript script =
      appsplit::parse_script(read_text(opt.script_path), fs::path(opt.script_path).stem().string());

  appsplit::VirtualDevice device(opt.stub_pool);
  device.install_base(*store, app_id);

  if (!opt.state_path.empty() && fs::exists(opt.state_path)) {
    appsplit::DeviceState state = appsplit::device_state_from_json(read_text(opt.state_path));
    if (state.app_id != app_id)
      throw appsplit::SchemaViolation("device_state", "state is for app '" + state.app_id +
                                                          "', simulating '" + app_id + "'");
    device.restore_features(*store, app_id, state.loaded_features);
  }

  appsplit::RunMetrics session = device.run_session(*store, app_id, script);

  if (!opt.state_path.empty()) {
    const appsplit::InstallState* state = device.install_state(app_id);
    appsplit::DeviceState out{app_id, {state->loaded_features.begin(),
                                       state->loaded_features.end()}};
    appsplit::write_file(opt.state_path, appsplit::device_state_to_json(out));
  }
  if (!opt.report_path.empty())
    appsplit::write_file(opt.report_path, appsplit::metrics_to_json(session));

  std::cout << "script: " << script.name << " (target " << script.target_activity << ")\n"
            << "cold starts: " << session.cold_starts << "\n"
            << "warm starts: " << session.warm_starts << "\n"
            << "fetches: " << session.fetches.size() << " (" << session.bytes_fetched()
            << " bytes)\n"
            << "lifecycle events: " << session.lifecycle_events.size() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// serve

struct ServeOpts {
  std::string plan_dir;
  std::string host = "127.0.0.1";
  int port = 0;
};

int cmd_serve(const ServeOpts& opt) {
  // Fail before binding if the directory is not a plan.
  appsplit::LoadedPlan loaded = appsplit::load_plan_dir(opt.plan_dir);
  appsplit::BundleServer server(opt.plan_dir);
  int port = server.start(opt.host, opt.port);
  std::cout << "serving " << loaded.plan.app_id << " at http://" << opt.host << ":" << port
            << "/" << std::endl;
  server.wait();
  return 0;
}

// ---------------------------------------------------------------------------
// stats

struct StatsOpts {
  std::string plans_dir;
  std::string out_path;
};

json distribution_json(std::vector<double> values) {
  json j;
  j["count"] = values.size();
  if (values.empty()) return j;
  double sum = 0.0;
  for (double v : values) sum += v;
  j["mean"] = sum / static_cast<double>(values.size());
  j["p10"] = appsplit::nearest_rank_quantile(values, 0.10);
  j["p50"] = appsplit::nearest_rank_quantile(values, 0.50);
  j["p90"] = appsplit::nearest_rank_quantile(values, 0.90);
  return j;
}

int cmd_stats(const StatsOpts& opt) {
  std::vector<double> saving_ratios;
  std::vector<double> base_bytes;
  std::vector<double> feature_bytes;
  std::vector<double> features_per_plan;
  std::vector<double> recovery_iterations;

  std::vector<fs::path> dirs;
  if (fs::exists(opt.plans_dir)) {
    for (const auto& entry : fs::directory_iterator(opt.plans_dir)) {
      if (entry.is_directory() && fs::exists(entry.path() / "plan.json"))
        dirs.push_back(entry.path());
    }
  }
  std::sort(dirs.begin(), dirs.end());

  for (const fs::path& dir : dirs) {
    json plan = json::parse(read_text(dir / "plan.json"));
    saving_ratios.push_back(plan.at("saving_ratio").get<double>());
    base_bytes.push_back(plan.at("base").at("size_bytes").get<double>());
    const json& features = plan.at("features");
    features_per_plan.push_back(static_cast<double>(features.size()));
    for (const auto& [activity, fb] : features.items())
      feature_bytes.push_back(fb.at("size_bytes").get<double>());

    fs::path report = dir / "recovery-report.json";
    if (fs::exists(report)) {
      json r = json::parse(read_text(report));
      recovery_iterations.push_back(r.at("total_iterations").get<double>());
    }
  }

  json out;
  out["plans"] = dirs.size();
  out["median_saving_ratio"] =
      saving_ratios.empty() ? json() : json(appsplit::nearest_rank_quantile(saving_ratios, 0.5));
  out["saving_ratio"] = distribution_json(saving_ratios);
  out["base_bundle_bytes"] = distribution_json(base_bytes);
  out["feature_bundle_bytes"] = distribution_json(feature_bytes);
  out["features_per_plan"] = distribution_json(features_per_plan);
  out["recovery_iterations"] = distribution_json(recovery_iterations);

  std::string text = out.dump(2);
  text.push_back('\n');
  emit(text, opt.out_path);
  return 0;
}

// ---------------------------------------------------------------------------
// gen

struct GenOpts {
  std::string out_dir;
  int count = 1;
  std::uint64_t seed = 1;
  std::vector<int> activities;
  std::vector<int> pojos;
  std::vector<int> resources;
  double share = 0.35;
  double dynamic = 0.0;
  double zipf = 1.1;
};

int cmd_gen(const GenOpts& opt) {
  appsplit::CorpusParams params;
  params.seed = opt.seed;
  if (!opt.activities.empty()) params.activity_count = {opt.activities[0], opt.activities[1]};
  if (!opt.pojos.empty()) params.pojo_count = {opt.pojos[0], opt.pojos[1]};
  if (!opt.resources.empty()) params.resource_count = {opt.resources[0], opt.resources[1]};
  params.share_ratio = opt.share;
  params.dynamic_edge_rate = opt.dynamic;
  params.zipf_exponent = opt.zipf;

  for (int i = 0; i < opt.count; ++i) {
    appsplit::AppPackage app = appsplit::gen_app(params, i);
    fs::path dir = fs::path(opt.out_dir) / app.app_id;
    fs::create_directories(dir / "scripts");
    appsplit::write_file(dir / "app.apkg", appsplit::serialize_package(app));
    appsplit::write_file(dir / "usage.csv",
                         appsplit::serialize_usage_csv(appsplit::gen_usage(app, params)));
    for (const appsplit::ReplayScript& script : appsplit::gen_scripts(app)) {
      appsplit::write_file(dir / "scripts" / (script.name + ".txt"),
                           appsplit::serialize_script(script));
    }
    std::cout << app.app_id << ": " << app.manifest.activities.size() << " activities, "
              << appsplit::total_size(app) << " bytes\n";
  }
  std::cout << "generated " << opt.count << " package(s) under " << opt.out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// graph

struct GraphOpts {
  std::string app_path;
  std::string out_path;
};

int cmd_graph(const GraphOpts& opt) {
  appsplit::AppPackage app = appsplit::parse_package(appsplit::read_file(opt.app_path));
  emit(appsplit::to_dot(app), opt.out_path);
  return 0;
}

int exit_code_for(const appsplit::Error& e) {
  if (dynamic_cast<const appsplit::NonTermination*>(&e)) return 3;
  if (dynamic_cast<const appsplit::StoreUnavailable*>(&e)) return 4;
  if (dynamic_cast<const appsplit::InvalidSelection*>(&e) ||
      dynamic_cast<const appsplit::UnknownActivity*>(&e) ||
      dynamic_cast<const appsplit::UnknownClass*>(&e) ||
      dynamic_cast<const appsplit::ActivityInBase*>(&e) ||
      dynamic_cast<const appsplit::MalformedScript*>(&e) ||
      dynamic_cast<const appsplit::InvalidScript*>(&e)) {
    return 2;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Package decomposer and on-demand install simulator"};
  cli.require_subcommand(1);
  int rc = 0;

  DecomposeOpts dec;
  CLI::App* decompose = cli.add_subcommand(
      "decompose", "Split a package into a base bundle and per-activity feature bundles");
  decompose->add_option("--app", dec.app_path, "Input package (.apkg)")
      ->required()
      ->check(CLI::ExistingFile);
  decompose->add_option("--out", dec.out_dir, "Plan directory to write")->required();
  decompose->add_option("--activities", dec.activities,
                        "Base activities (comma separated); launcher and welcome "
                        "activities must be included")
      ->delimiter(',');
  decompose->add_option("--usage", dec.usage_path, "Usage log (CSV) to pick base activities")
      ->check(CLI::ExistingFile);
  decompose->add_option("--coverage", dec.coverage,
                        "Visit share the base must cover when using --usage")
      ->check(CLI::Range(0.0, 1.0));
  decompose->add_option("--whitelist", dec.whitelist_path,
                        "JSON whitelist of classes/resources to force into bundles")
      ->check(CLI::ExistingFile);
  decompose->callback([&] { rc = cmd_decompose(dec); });

  RecoverOpts rec;
  CLI::App* recover = cli.add_subcommand(
      "recover", "Replay scripts against a plan and patch bundles until they run clean");
  recover->add_option("--plan", rec.plan_dir, "Plan directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  recover->add_option("--scripts", rec.script_paths,
                      "Script files or directories of *.txt scripts")
      ->required();
  recover->add_option("--report", rec.report_path,
                      "Where to write the recovery report (default: <plan>/recovery-report.json)");
  recover->callback([&] { rc = cmd_recover(rec); });

  SimulateOpts sim;
  CLI::App* simulate = cli.add_subcommand(
      "simulate", "Run a replay script on a virtual device with on-demand bundle fetches");
  CLI::Option* sim_plan = simulate->add_option("--plan", sim.plan_dir, "Plan directory to fetch from")
                              ->check(CLI::ExistingDirectory);
  CLI::Option* sim_url =
      simulate->add_option("--store-url", sim.store_url, "Bundle store base URL");
  sim_plan->excludes(sim_url);
  sim_url->excludes(sim_plan);
  simulate->add_option("--app-id", sim.app_id, "App to install (required with --store-url)");
  simulate->add_option("--script", sim.script_path, "Replay script file")
      ->required()
      ->check(CLI::ExistingFile);
  simulate->add_option("--report", sim.report_path, "Write session metrics JSON here");
  simulate->add_option("--state", sim.state_path,
                       "Device state file: restored before the run, updated after");
  simulate->add_option("--stub-pool", sim.stub_pool, "Stub activity slots")
      ->check(CLI::PositiveNumber);
  simulate->callback([&] {
    if (sim.plan_dir.empty() && sim.store_url.empty())
      throw CLI::ValidationError("simulate", "one of --plan or --store-url is required");
    rc = cmd_simulate(sim);
  });

  ServeOpts srv;
  CLI::App* serve =
      cli.add_subcommand("serve", "Serve a plan directory over the bundle store protocol");
  serve->add_option("--plan", srv.plan_dir, "Plan directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  serve->add_option("--host", srv.host, "Bind address");
  serve->add_option("--port", srv.port, "Port (0 picks a free one)")
      ->check(CLI::Range(0, 65535));
  serve->callback([&] { rc = cmd_serve(srv); });

  StatsOpts st;
  CLI::App* stats =
      cli.add_subcommand("stats", "Aggregate quantiles over a directory of plan directories");
  stats->add_option("--plans", st.plans_dir, "Directory containing plan directories")
      ->required();
  stats->add_option("--out", st.out_path, "Write JSON here instead of stdout");
  stats->callback([&] { rc = cmd_stats(st); });

  GenOpts gen;
  CLI::App* generate =
      cli.add_subcommand("gen", "Generate synthetic packages with scripts and usage logs");
  generate->add_option("--out", gen.out_dir, "Output directory")->required();
  generate->add_option("--count", gen.count, "Number of packages")->check(CLI::PositiveNumber);
  generate->add_option("--seed", gen.seed, "Corpus seed");
  generate->add_option("--activities", gen.activities, "Activity count range (lo hi)")
      ->expected(2);
  generate->add_option("--pojos", gen.pojos, "Helper class count range (lo hi)")->expected(2);
  generate->add_option("--resources", gen.resources, "Resource count range (lo hi)")
      ->expected(2);
  generate->add_option("--share", gen.share, "Cross-activity sharing ratio")
      ->check(CLI::Range(0.0, 1.0));
  generate->add_option("--dynamic", gen.dynamic,
                       "Fraction of activities with a reflective call chain")
      ->check(CLI::Range(0.0, 1.0));
  generate->add_option("--zipf", gen.zipf, "Usage distribution skew");
  generate->callback([&] { rc = cmd_gen(gen); });

  GraphOpts gr;
  CLI::App* graph =
      cli.add_subcommand("graph", "Dump a package's call/resource graph as DOT");
  graph->add_option("--app", gr.app_path, "Input package (.apkg)")
      ->required()
      ->check(CLI::ExistingFile);
  graph->add_option("--out", gr.out_path, "Write DOT here instead of stdout");
  graph->callback([&] { rc = cmd_graph(gr); });

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = cli.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const appsplit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
