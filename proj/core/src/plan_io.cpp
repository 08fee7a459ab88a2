#include "appsplit/plan_io.hpp"

#include <fstream>

#include "appsplit/errors.hpp"
#include "json_codec.hpp"

namespace appsplit {

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, const Bytes& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  if (!out) throw Error("short write to '" + path.string() + "'");
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  write_file(path, Bytes(data.begin(), data.end()));
}

namespace {

json scope_json(const WhiteList& wl) {
  json j = json::object();
  for (const auto& [entry, scope] : wl.scope) {
    j[entry] = json{{"kind", scope.kind == BundleScope::Kind::Base ? "base" : "feature"},
                    {"activity", scope.activity}};
  }
  return j;
}

WhiteList whitelist_from_json(const json& j) {
  WhiteList wl;
  for (const auto& c : j.at("classes")) wl.classes.insert(c.get<std::string>());
  for (const auto& r : j.at("resources")) wl.resources.insert(r.get<std::string>());
  for (const auto& [entry, s] : j.at("scope").items()) {
    BundleScope scope;
    std::string kind = s.at("kind").get<std::string>();
    if (kind == "base") {
      scope.kind = BundleScope::Kind::Base;
    } else if (kind == "feature") {
      scope.kind = BundleScope::Kind::Feature;
    } else {
      throw SchemaViolation("whitelist", "unknown scope kind '" + kind + "'");
    }
    s.at("activity").get_to(scope.activity);
    wl.scope.emplace(entry, scope);
  }
  return wl;
}

json base_json(const BaseBundle& b) {
  return json{{"classes", b.classes},
              {"resources", b.resources},
              {"assets", b.assets},
              {"other", b.other},
              {"size_bytes", b.size_bytes}};
}

json feature_json(const FeatureBundle& f) {
  return json{{"activity", f.activity},
              {"classes", f.classes},
              {"resources", f.resources},
              {"size_bytes", f.size_bytes}};
}

}  // namespace

std::string plan_to_json(const DecompositionPlan& plan) {
  json features = json::object();
  for (const auto& [activity, fb] : plan.features) features[activity] = feature_json(fb);
  json j{{"schema", 1},
         {"app_id", plan.app_id},
         {"version", plan.version},
         {"base_activities", plan.base_activities},
         {"whitelist",
          json{{"classes", plan.whitelist.classes},
               {"resources", plan.whitelist.resources},
               {"scope", scope_json(plan.whitelist)}}},
         {"base", base_json(plan.base)},
         {"features", features},
         {"original_size_bytes", plan.original_size_bytes},
         {"saving_ratio", plan.saving_ratio()}};
  std::string text = j.dump(2);
  text.push_back('\n');
  return text;
}

DecompositionPlan plan_from_json(const std::string& text, const AppPackage& app) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw MalformedArchive("plan summary is not valid JSON");

  DecompositionPlan plan;
  try {
    if (j.at("schema").get<int>() != 1)
      throw SchemaViolation("plan", "unsupported schema version");
    j.at("app_id").get_to(plan.app_id);
    j.at("version").get_to(plan.version);
    j.at("base_activities").get_to(plan.base_activities);
    plan.whitelist = whitelist_from_json(j.at("whitelist"));

    const json& b = j.at("base");
    for (const auto& c : b.at("classes")) plan.base.classes.insert(c.get<std::string>());
    for (const auto& r : b.at("resources")) plan.base.resources.insert(r.get<std::string>());
    for (const auto& a : b.at("assets")) plan.base.assets.insert(a.get<std::string>());
    for (const auto& o : b.at("other")) plan.base.other.insert(o.get<std::string>());
    b.at("size_bytes").get_to(plan.base.size_bytes);

    for (const auto& [activity, f] : j.at("features").items()) {
      FeatureBundle fb;
      f.at("activity").get_to(fb.activity);
      for (const auto& c : f.at("classes")) fb.classes.insert(c.get<std::string>());
      for (const auto& r : f.at("resources")) fb.resources.insert(r.get<std::string>());
      f.at("size_bytes").get_to(fb.size_bytes);
      plan.features.emplace(activity, std::move(fb));
    }
    j.at("original_size_bytes").get_to(plan.original_size_bytes);
  } catch (const json::exception& e) {
    throw SchemaViolation("plan", e.what());
  }

  if (plan.app_id != app.app_id)
    throw SchemaViolation("plan", "plan is for '" + plan.app_id + "', package is '" +
                                      app.app_id + "'");
  return plan;
}

std::string whitelist_to_json(const WhiteList& wl) {
  json j{{"classes", wl.classes}, {"resources", wl.resources}, {"scope", scope_json(wl)}};
  std::string text = j.dump(2);
  text.push_back('\n');
  return text;
}

WhiteList whitelist_from_json_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw MalformedArchive("whitelist is not valid JSON");
  try {
    return whitelist_from_json(j);
  } catch (const json::exception& e) {
    throw SchemaViolation("whitelist", e.what());
  }
}

void write_plan_dir(const std::filesystem::path& dir, const DecompositionPlan& plan,
                    const AppPackage& rewritten_app) {
  PlanPaths paths{dir};
  std::error_code ec;
  std::filesystem::create_directories(paths.features_dir(), ec);
  if (ec) throw Error("cannot create plan directory '" + dir.string() + "'");

  write_file(paths.plan_json(), plan_to_json(plan));
  write_file(paths.app_package(), serialize_package(rewritten_app));
  write_file(paths.base_bundle(), pack_bundle(plan.base, rewritten_app));
  for (const auto& [activity, fb] : plan.features)
    write_file(paths.feature_bundle(activity), pack_bundle(fb, rewritten_app));

  // Drop bundles from a previous, wider decomposition of the same directory.
  for (const auto& entry : std::filesystem::directory_iterator(paths.features_dir())) {
    if (entry.path().extension() != ".abundle") continue;
    std::string activity = entry.path().stem().string();
    if (plan.features.count(activity) == 0) std::filesystem::remove(entry.path());
  }
}

LoadedPlan load_plan_dir(const std::filesystem::path& dir) {
  PlanPaths paths{dir};
  LoadedPlan loaded;
  loaded.app = parse_package(read_file(paths.app_package()));
  Bytes plan_bytes = read_file(paths.plan_json());
  loaded.plan = plan_from_json(std::string(plan_bytes.begin(), plan_bytes.end()), loaded.app);
  return loaded;
}

std::string recovery_report_to_json(const RecoveryReport& report) {
  json added = json::array();
  for (const RecoveryReport::Addition& a : report.added) {
    added.push_back(json{
        {"bundle", a.bundle},
        {"kind", a.item.kind == MissingItem::Kind::Class ? "class" : "resource"},
        {"name", a.item.name},
        {"raising_context", a.item.raising_context},
        {"script", a.script},
        {"iteration", a.iteration}});
  }
  json j{{"total_iterations", report.total_iterations},
         {"iterations", report.iterations},
         {"added", added}};
  std::string text = j.dump(2);
  text.push_back('\n');
  return text;
}

std::string metrics_to_json(const RunMetrics& metrics) {
  json fetches = json::array();
  for (const auto& [activity, bytes] : metrics.fetches)
    fetches.push_back(json{{"activity", activity}, {"bytes", bytes}});
  json lifecycle = json::array();
  for (const LifecycleEvent& ev : metrics.lifecycle_events) {
    lifecycle.push_back(json{{"callback", to_string(ev.callback)},
                             {"activity", ev.activity},
                             {"stub_slot", ev.stub_slot}});
  }
  json j{{"fetches", fetches},
         {"cold_starts", metrics.cold_starts},
         {"warm_starts", metrics.warm_starts},
         {"bytes_fetched", metrics.bytes_fetched()},
         {"lifecycle", lifecycle}};
  std::string text = j.dump(2);
  text.push_back('\n');
  return text;
}

std::string device_state_to_json(const DeviceState& state) {
  json j{{"app_id", state.app_id}, {"loaded_features", state.loaded_features}};
  std::string text = j.dump(2);
  text.push_back('\n');
  return text;
}

DeviceState device_state_from_json(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw MalformedArchive("device state is not valid JSON");
  DeviceState state;
  try {
    j.at("app_id").get_to(state.app_id);
    j.at("loaded_features").get_to(state.loaded_features);
  } catch (const json::exception& e) {
    throw SchemaViolation("device_state", e.what());
  }
  return state;
}

}  // namespace appsplit
