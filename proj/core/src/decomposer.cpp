#include "appsplit/decomposer.hpp"

#include <algorithm>

#include "appsplit/errors.hpp"
#include "appsplit/graphs.hpp"
#include "json_codec.hpp"

namespace appsplit {

namespace {

constexpr const char* kBundleMagic = "ABDL";
constexpr const char* kBundleEntry = "bundle.json";
constexpr const char* kManifestEntry = "manifest.json";

/// Graphs shared across the per-bundle computations of one decomposition.
struct GraphSet {
  CallGraph cg;          // static view: dynamic call edges excluded
  ResourceGraph rg;
  ReferRelation refer;

  explicit GraphSet(const AppPackage& app)
      : cg(build_call_graph(app, false)),
        rg(build_resource_graph(app)),
        refer(build_refer_relation(app)) {}
};

/// The class plus every Pojo owning a method statically reachable from it.
std::set<std::string> class_closure(const GraphSet& graphs, const AppPackage& app,
                                    const std::string& class_name) {
  const ClassUnit* cls = app.find_class(class_name);
  if (cls == nullptr) throw UnknownClass("unknown class '" + class_name + "'");
  std::vector<std::string> seeds;
  for (const MethodDef& m : cls->methods) seeds.push_back(class_name + "." + m.name);
  std::set<std::string> out{class_name};
  for (const std::string& id : graphs.cg.graph.reachable_closure(seeds)) {
    std::string owner = split_method_id(id).first;
    const ClassUnit* owner_cls = app.find_class(owner);
    if (owner_cls != nullptr && owner_cls->kind == ClassKind::Pojo) out.insert(owner);
  }
  return out;
}

std::set<std::string> resource_closure(const GraphSet& graphs,
                                       const std::set<std::string>& classes) {
  std::set<std::string> out;
  for (const std::string& cls : classes) {
    auto it = graphs.refer.by_class.find(cls);
    if (it == graphs.refer.by_class.end()) continue;
    std::set<std::string> res = graphs.rg.graph.reachable_closure(it->second);
    out.insert(res.begin(), res.end());
  }
  return out;
}

std::uint64_t classes_size(const AppPackage& app, const std::set<std::string>& names) {
  std::uint64_t sum = 0;
  for (const std::string& n : names) sum += app.find_class(n)->size_bytes;
  return sum;
}

std::uint64_t resources_size(const AppPackage& app, const std::set<std::string>& ids) {
  std::uint64_t sum = 0;
  for (const std::string& id : ids) sum += app.find_resource(id)->size_bytes;
  return sum;
}

void check_selection(const AppPackage& app, const std::set<std::string>& sel) {
  if (sel.empty()) throw InvalidSelection("empty base-activity selection");
  for (const std::string& a : sel) {
    if (!app.is_activity(a))
      throw InvalidSelection("selected '" + a + "' is not a declared activity");
  }
  if (sel.count(app.manifest.launcher_activity) == 0)
    throw InvalidSelection("selection must include the launcher activity '" +
                           app.manifest.launcher_activity + "'");
  for (const ActivityDecl& a : app.manifest.activities) {
    if (a.welcome && sel.count(a.class_name) == 0)
      throw InvalidSelection("selection must include welcome activity '" + a.class_name + "'");
  }
}

void check_whitelist(const AppPackage& app, const std::set<std::string>& sel,
                     const WhiteList& whitelist) {
  for (const std::string& cls : whitelist.classes) {
    const ClassUnit* c = app.find_class(cls);
    if (c == nullptr) throw InvalidSelection("whitelist names unknown class '" + cls + "'");
    BundleScope scope = whitelist.scope_of(cls);
    if (c->kind == ClassKind::Activity) {
      bool ok = scope.kind == BundleScope::Kind::Base ? sel.count(cls) != 0
                                                      : scope.activity == cls;
      if (!ok)
        throw InvalidSelection("whitelist would move activity '" + cls +
                               "' out of its own bundle");
    }
    if (scope.kind == BundleScope::Kind::Feature) {
      if (!app.is_activity(scope.activity))
        throw InvalidSelection("whitelist scope '" + scope.activity +
                               "' is not a declared activity");
      if (sel.count(scope.activity) != 0)
        throw InvalidSelection("whitelist scope '" + scope.activity +
                               "' is a base activity; use base scope");
    }
  }
  for (const std::string& res : whitelist.resources) {
    if (app.find_resource(res) == nullptr)
      throw InvalidSelection("whitelist names unknown resource '" + res + "'");
    if (whitelist.scope_of(res).kind == BundleScope::Kind::Feature) {
      const std::string& scope = whitelist.scope_of(res).activity;
      if (!app.is_activity(scope))
        throw InvalidSelection("whitelist scope '" + scope + "' is not a declared activity");
    }
  }
}

BaseBundle base_bundle_impl(const GraphSet& graphs, const AppPackage& app,
                            const std::set<std::string>& sel, const WhiteList& whitelist) {
  BaseBundle base;
  for (const std::string& activity : sel) {
    std::set<std::string> cls = activity_related_classes(graphs.cg, app, activity);
    base.classes.insert(cls.begin(), cls.end());
  }
  // Services, receivers and providers always stay in the base (they can run
  // without any visible activity), along with their helper closure.
  for (const ComponentDecl& d : app.manifest.other_components) {
    std::set<std::string> cls = class_closure(graphs, app, d.class_name);
    base.classes.insert(cls.begin(), cls.end());
  }
  for (const std::string& cls : whitelist.classes) {
    if (whitelist.scope_of(cls).kind != BundleScope::Kind::Base) continue;
    std::set<std::string> closure = class_closure(graphs, app, cls);
    base.classes.insert(closure.begin(), closure.end());
  }

  base.resources = resource_closure(graphs, base.classes);
  for (const std::string& res : whitelist.resources) {
    if (whitelist.scope_of(res).kind != BundleScope::Kind::Base) continue;
    std::set<std::string> closure = graphs.rg.graph.reachable_closure({res});
    base.resources.insert(closure.begin(), closure.end());
  }

  for (const AssetItem& a : app.assets) base.assets.insert(a.path);
  for (const OtherPayload& o : app.other) base.other.insert(o.name);

  base.size_bytes = classes_size(app, base.classes) + resources_size(app, base.resources);
  for (const AssetItem& a : app.assets) base.size_bytes += a.size_bytes;
  for (const OtherPayload& o : app.other) base.size_bytes += o.size_bytes;
  return base;
}

FeatureBundle feature_bundle_impl(const GraphSet& graphs, const AppPackage& app,
                                  const BaseBundle& base, const std::string& activity) {
  if (!app.is_activity(activity))
    throw UnknownActivity("'" + activity + "' is not a declared activity");
  if (base.classes.count(activity) != 0)
    throw ActivityInBase("'" + activity + "' already lives in the base bundle");

  FeatureBundle fb;
  fb.activity = activity;
  for (const std::string& cls : activity_related_classes(graphs.cg, app, activity)) {
    if (base.classes.count(cls) == 0) fb.classes.insert(cls);
  }
  for (const std::string& res : resource_closure(graphs, fb.classes)) {
    if (base.resources.count(res) == 0) fb.resources.insert(res);
  }
  fb.size_bytes = classes_size(app, fb.classes) + resources_size(app, fb.resources);
  return fb;
}

}  // namespace

BundleScope WhiteList::scope_of(const std::string& entry) const {
  auto it = scope.find(entry);
  return it == scope.end() ? BundleScope{} : it->second;
}

double DecompositionPlan::saving_ratio() const {
  if (original_size_bytes == 0) return 0.0;
  return 1.0 - static_cast<double>(base.size_bytes) /
                   static_cast<double>(original_size_bytes);
}

BaseBundle compute_base_bundle(const AppPackage& app, const std::set<std::string>& sel,
                               const WhiteList& whitelist) {
  check_selection(app, sel);
  check_whitelist(app, sel, whitelist);
  GraphSet graphs(app);
  return base_bundle_impl(graphs, app, sel, whitelist);
}

FeatureBundle compute_feature_bundle(const AppPackage& app, const BaseBundle& base,
                                     const std::string& activity) {
  GraphSet graphs(app);
  return feature_bundle_impl(graphs, app, base, activity);
}

DecompositionPlan decompose(const AppPackage& app, const std::set<std::string>& sel,
                            const WhiteList& whitelist) {
  check_selection(app, sel);
  check_whitelist(app, sel, whitelist);
  GraphSet graphs(app);

  DecompositionPlan plan;
  plan.app_id = app.app_id;
  plan.version = app.version;
  plan.base_activities.assign(sel.begin(), sel.end());
  plan.whitelist = whitelist;
  plan.base = base_bundle_impl(graphs, app, sel, whitelist);
  plan.original_size_bytes = total_size(app);

  for (const ActivityDecl& a : app.manifest.activities) {
    if (sel.count(a.class_name) != 0) continue;
    FeatureBundle fb = feature_bundle_impl(graphs, app, plan.base, a.class_name);

    // Whitelist entries pinned to this feature, closure-expanded like
    // everything else, minus whatever the base already holds.
    for (const std::string& cls : whitelist.classes) {
      BundleScope scope = whitelist.scope_of(cls);
      if (scope.kind != BundleScope::Kind::Feature || scope.activity != a.class_name) continue;
      for (const std::string& member : class_closure(graphs, app, cls)) {
        if (plan.base.classes.count(member) == 0) fb.classes.insert(member);
      }
    }
    std::set<std::string> extra_res;
    for (const std::string& res : whitelist.resources) {
      BundleScope scope = whitelist.scope_of(res);
      if (scope.kind != BundleScope::Kind::Feature || scope.activity != a.class_name) continue;
      std::set<std::string> closure = graphs.rg.graph.reachable_closure({res});
      extra_res.insert(closure.begin(), closure.end());
    }
    for (const std::string& res : resource_closure(graphs, fb.classes)) extra_res.insert(res);
    for (const std::string& res : extra_res) {
      if (plan.base.resources.count(res) == 0) fb.resources.insert(res);
    }
    fb.size_bytes = classes_size(app, fb.classes) + resources_size(app, fb.resources);

    plan.features.emplace(a.class_name, std::move(fb));
  }
  return plan;
}

AppPackage rewrite_launch_sites(const AppPackage& app, const DecompositionPlan& plan) {
  std::set<std::string> base_activities(plan.base_activities.begin(),
                                        plan.base_activities.end());
  AppPackage out = app;
  for (ClassUnit& c : out.classes) {
    for (MethodDef& m : c.methods) {
      for (LaunchSite& site : m.launches) {
        site.hooked = site.kind == LaunchSite::Kind::Explicit &&
                      base_activities.count(site.target_activity) == 0;
      }
    }
  }
  return out;
}

namespace {

json records_json(const AppPackage& app, const std::set<std::string>& classes,
                  const std::set<std::string>& resources) {
  json j;
  j["classes"] = json::array();
  for (const std::string& name : classes) j["classes"].push_back(*app.find_class(name));
  j["resources"] = json::array();
  for (const std::string& id : resources) j["resources"].push_back(*app.find_resource(id));
  return j;
}

Bytes bundle_archive_bytes(json bundle, std::optional<json> manifest) {
  std::string text = bundle.dump(2);
  text.push_back('\n');
  std::vector<ArchiveEntry> entries;
  entries.push_back({kBundleEntry, Bytes(text.begin(), text.end())});
  if (manifest.has_value()) {
    std::string m = manifest->dump(2);
    m.push_back('\n');
    entries.push_back({kManifestEntry, Bytes(m.begin(), m.end())});
  }
  return write_archive(kBundleMagic, std::move(entries));
}

}  // namespace

Bytes pack_bundle(const BaseBundle& bundle, const AppPackage& app) {
  json j = records_json(app, bundle.classes, bundle.resources);
  j["kind"] = "base";
  j["app_id"] = app.app_id;
  j["version"] = app.version;
  j["size_bytes"] = bundle.size_bytes;
  j["assets"] = json::array();
  for (const std::string& path : bundle.assets) {
    for (const AssetItem& a : app.assets) {
      if (a.path == path) j["assets"].push_back(a);
    }
  }
  j["other"] = json::array();
  for (const std::string& name : bundle.other) {
    for (const OtherPayload& o : app.other) {
      if (o.name == name) j["other"].push_back(o);
    }
  }

  json manifest{{"launcher_activity", app.manifest.launcher_activity},
                {"activities", app.manifest.activities},
                {"other_components", app.manifest.other_components}};
  return bundle_archive_bytes(std::move(j), std::move(manifest));
}

Bytes pack_bundle(const FeatureBundle& bundle, const AppPackage& app) {
  json j = records_json(app, bundle.classes, bundle.resources);
  j["kind"] = "feature";
  j["app_id"] = app.app_id;
  j["version"] = app.version;
  j["size_bytes"] = bundle.size_bytes;
  j["activity"] = bundle.activity;
  return bundle_archive_bytes(std::move(j), std::nullopt);
}

BundleArchive unpack_bundle(const Bytes& bytes) {
  std::vector<ArchiveEntry> entries = read_archive(kBundleMagic, bytes);
  const ArchiveEntry& entry = find_entry(entries, kBundleEntry);
  json j = json::parse(entry.data.begin(), entry.data.end(), nullptr, false);
  if (j.is_discarded()) throw MalformedArchive("bundle.json is not valid JSON");

  BundleArchive out;
  try {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "base") {
      out.kind = BundleArchive::Kind::Base;
    } else if (kind == "feature") {
      out.kind = BundleArchive::Kind::Feature;
    } else {
      throw SchemaViolation(kBundleEntry, "unknown bundle kind '" + kind + "'");
    }
    j.at("app_id").get_to(out.app_id);
    j.at("version").get_to(out.version);
    j.at("size_bytes").get_to(out.size_bytes);
    j.at("classes").get_to(out.class_units);
    j.at("resources").get_to(out.resource_items);

    if (out.kind == BundleArchive::Kind::Base) {
      j.at("assets").get_to(out.asset_items);
      j.at("other").get_to(out.other_payloads);
      json m = json::parse(find_entry(entries, kManifestEntry).data);
      Manifest manifest;
      m.at("launcher_activity").get_to(manifest.launcher_activity);
      m.at("activities").get_to(manifest.activities);
      m.at("other_components").get_to(manifest.other_components);
      out.manifest = std::move(manifest);
    } else {
      j.at("activity").get_to(out.feature.activity);
    }
  } catch (const json::exception& e) {
    throw SchemaViolation(kBundleEntry, e.what());
  }

  std::uint64_t sum = 0;
  for (const ClassUnit& c : out.class_units) {
    sum += c.size_bytes;
    if (out.kind == BundleArchive::Kind::Base) {
      out.base.classes.insert(c.name);
    } else {
      out.feature.classes.insert(c.name);
    }
  }
  for (const ResourceItem& r : out.resource_items) {
    sum += r.size_bytes;
    if (out.kind == BundleArchive::Kind::Base) {
      out.base.resources.insert(r.id);
    } else {
      out.feature.resources.insert(r.id);
    }
  }
  for (const AssetItem& a : out.asset_items) {
    sum += a.size_bytes;
    out.base.assets.insert(a.path);
  }
  for (const OtherPayload& o : out.other_payloads) {
    sum += o.size_bytes;
    out.base.other.insert(o.name);
  }
  if (sum != out.size_bytes)
    throw SchemaViolation(kBundleEntry, "size_bytes disagrees with member records");
  if (out.kind == BundleArchive::Kind::Base) {
    out.base.size_bytes = out.size_bytes;
  } else {
    out.feature.size_bytes = out.size_bytes;
  }
  return out;
}

}  // namespace appsplit
