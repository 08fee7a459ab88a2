#include "appsplit/app_model.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "appsplit/errors.hpp"
#include "json_codec.hpp"

namespace appsplit {

namespace {

constexpr const char* kPackageMagic = "APKG";

// Archive entries of a `.apkg`, each a JSON document.
constexpr const char* kManifestEntry = "manifest.json";
constexpr const char* kCodeEntry = "code.json";
constexpr const char* kResEntry = "res.json";
constexpr const char* kAssetsEntry = "assets.json";
constexpr const char* kOtherEntry = "other.json";

json parse_entry_json(const ArchiveEntry& entry) {
  json j = json::parse(entry.data.begin(), entry.data.end(), nullptr, false);
  if (j.is_discarded())
    throw MalformedArchive("entry '" + entry.name + "' is not valid JSON");
  return j;
}

Bytes to_bytes(const json& j) {
  std::string text = j.dump(2);
  text.push_back('\n');
  return Bytes(text.begin(), text.end());
}

}  // namespace

std::string to_string(ClassKind kind) {
  switch (kind) {
    case ClassKind::Activity: return "activity";
    case ClassKind::Service: return "service";
    case ClassKind::BroadcastReceiver: return "broadcast_receiver";
    case ClassKind::ContentProvider: return "content_provider";
    case ClassKind::Pojo: return "pojo";
  }
  throw SchemaViolation("class_kind", "unrepresentable value");
}

ClassKind class_kind_from_string(const std::string& s) {
  if (s == "activity") return ClassKind::Activity;
  if (s == "service") return ClassKind::Service;
  if (s == "broadcast_receiver") return ClassKind::BroadcastReceiver;
  if (s == "content_provider") return ClassKind::ContentProvider;
  if (s == "pojo") return ClassKind::Pojo;
  throw SchemaViolation("class_kind", "unknown value '" + s + "'");
}

std::string to_string(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::Service: return "service";
    case ComponentKind::BroadcastReceiver: return "broadcast_receiver";
    case ComponentKind::ContentProvider: return "content_provider";
  }
  throw SchemaViolation("component_kind", "unrepresentable value");
}

ComponentKind component_kind_from_string(const std::string& s) {
  if (s == "service") return ComponentKind::Service;
  if (s == "broadcast_receiver") return ComponentKind::BroadcastReceiver;
  if (s == "content_provider") return ComponentKind::ContentProvider;
  throw SchemaViolation("component_kind", "unknown value '" + s + "'");
}

const ClassUnit* AppPackage::find_class(const std::string& name) const {
  for (const ClassUnit& c : classes) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const ResourceItem* AppPackage::find_resource(const std::string& id) const {
  for (const ResourceItem& r : resources) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

const MethodDef* AppPackage::find_method(const std::string& qualified) const {
  auto [class_name, method_name] = split_method_id(qualified);
  const ClassUnit* cls = find_class(class_name);
  if (cls == nullptr) return nullptr;
  for (const MethodDef& m : cls->methods) {
    if (m.name == method_name) return &m;
  }
  return nullptr;
}

bool AppPackage::is_activity(const std::string& class_name) const {
  for (const ActivityDecl& a : manifest.activities) {
    if (a.class_name == class_name) return true;
  }
  return false;
}

std::vector<std::string> AppPackage::activity_names() const {
  std::vector<std::string> names;
  names.reserve(manifest.activities.size());
  for (const ActivityDecl& a : manifest.activities) names.push_back(a.class_name);
  return names;
}

std::pair<std::string, std::string> split_method_id(const std::string& qualified) {
  std::size_t dot = qualified.rfind('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == qualified.size())
    throw SchemaViolation(qualified, "not a qualified 'Class.method' id");
  return {qualified.substr(0, dot), qualified.substr(dot + 1)};
}

void canonicalize(AppPackage& app) {
  std::sort(app.classes.begin(), app.classes.end(),
            [](const ClassUnit& a, const ClassUnit& b) { return a.name < b.name; });
  for (ClassUnit& c : app.classes) {
    std::sort(c.methods.begin(), c.methods.end(),
              [](const MethodDef& a, const MethodDef& b) { return a.name < b.name; });
    for (MethodDef& m : c.methods) {
      for (LaunchSite& l : m.launches) std::sort(l.categories.begin(), l.categories.end());
    }
  }
  std::sort(app.resources.begin(), app.resources.end(),
            [](const ResourceItem& a, const ResourceItem& b) { return a.id < b.id; });
  std::sort(app.assets.begin(), app.assets.end(),
            [](const AssetItem& a, const AssetItem& b) { return a.path < b.path; });
  std::sort(app.other.begin(), app.other.end(),
            [](const OtherPayload& a, const OtherPayload& b) { return a.name < b.name; });
  std::sort(app.manifest.activities.begin(), app.manifest.activities.end(),
            [](const ActivityDecl& a, const ActivityDecl& b) {
              return a.class_name < b.class_name;
            });
  for (ActivityDecl& a : app.manifest.activities) {
    for (IntentFilter& f : a.intent_filters) std::sort(f.categories.begin(), f.categories.end());
    std::sort(a.intent_filters.begin(), a.intent_filters.end(),
              [](const IntentFilter& x, const IntentFilter& y) {
                return std::tie(x.action, x.categories) < std::tie(y.action, y.categories);
              });
  }
  std::sort(app.manifest.other_components.begin(), app.manifest.other_components.end(),
            [](const ComponentDecl& a, const ComponentDecl& b) {
              return a.class_name < b.class_name;
            });
}

namespace {

void validate_launch_site(const AppPackage& app, const std::string& owner,
                          const LaunchSite& site) {
  if (site.kind == LaunchSite::Kind::Explicit) {
    if (!app.is_activity(site.target_activity))
      throw SchemaViolation(owner, "explicit launch of undeclared activity '" +
                                       site.target_activity + "'");
  } else {
    if (site.action.empty()) throw SchemaViolation(owner, "implicit launch with empty action");
  }
}

}  // namespace

void validate_package(const AppPackage& app) {
  if (app.app_id.empty()) throw SchemaViolation("package", "empty app_id");

  std::set<std::string> class_names;
  for (const ClassUnit& c : app.classes) {
    if (c.name.empty()) throw SchemaViolation("class", "empty class name");
    if (!class_names.insert(c.name).second)
      throw SchemaViolation(c.name, "duplicate class name");
  }

  std::set<std::string> resource_ids;
  for (const ResourceItem& r : app.resources) {
    std::size_t slash = r.id.find('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 == r.id.size())
      throw SchemaViolation(r.id, "resource id is not 'type/name'");
    if (!resource_ids.insert(r.id).second)
      throw SchemaViolation(r.id, "duplicate resource id");
  }
  for (const ResourceItem& r : app.resources) {
    for (const std::string& ref : r.refs) {
      if (ref == r.id) throw SchemaViolation(r.id, "resource refers to itself");
      if (resource_ids.count(ref) == 0)
        throw SchemaViolation(r.id, "reference to unknown resource '" + ref + "'");
    }
  }

  std::set<std::string> asset_paths;
  for (const AssetItem& a : app.assets) {
    if (a.path.empty()) throw SchemaViolation("asset", "empty asset path");
    if (!asset_paths.insert(a.path).second)
      throw SchemaViolation(a.path, "duplicate asset path");
  }
  std::set<std::string> other_names;
  for (const OtherPayload& o : app.other) {
    if (o.name.empty()) throw SchemaViolation("other", "empty payload name");
    if (!other_names.insert(o.name).second)
      throw SchemaViolation(o.name, "duplicate payload name");
  }

  // Manifest <-> class kind agreement.
  if (app.manifest.activities.empty())
    throw SchemaViolation("manifest", "no declared activities");
  std::set<std::string> declared_activities;
  for (const ActivityDecl& a : app.manifest.activities) {
    if (!declared_activities.insert(a.class_name).second)
      throw SchemaViolation(a.class_name, "activity declared twice");
    const ClassUnit* cls = app.find_class(a.class_name);
    if (cls == nullptr)
      throw SchemaViolation(a.class_name, "declared activity has no class");
    if (cls->kind != ClassKind::Activity)
      throw SchemaViolation(a.class_name, "declared activity is not an activity class");
    for (const IntentFilter& f : a.intent_filters) {
      if (f.action.empty()) throw SchemaViolation(a.class_name, "intent filter with empty action");
    }
  }
  if (declared_activities.count(app.manifest.launcher_activity) == 0)
    throw SchemaViolation("manifest", "launcher activity '" + app.manifest.launcher_activity +
                                          "' is not declared");

  std::set<std::string> declared_components;
  for (const ComponentDecl& d : app.manifest.other_components) {
    if (!declared_components.insert(d.class_name).second)
      throw SchemaViolation(d.class_name, "component declared twice");
    const ClassUnit* cls = app.find_class(d.class_name);
    if (cls == nullptr)
      throw SchemaViolation(d.class_name, "declared component has no class");
    ClassKind expected = ClassKind::Pojo;
    switch (d.kind) {
      case ComponentKind::Service: expected = ClassKind::Service; break;
      case ComponentKind::BroadcastReceiver: expected = ClassKind::BroadcastReceiver; break;
      case ComponentKind::ContentProvider: expected = ClassKind::ContentProvider; break;
    }
    if (cls->kind != expected)
      throw SchemaViolation(d.class_name, "component kind disagrees with class kind");
  }
  for (const ClassUnit& c : app.classes) {
    if (c.kind == ClassKind::Activity && declared_activities.count(c.name) == 0)
      throw SchemaViolation(c.name, "activity class missing from manifest");
    if ((c.kind == ClassKind::Service || c.kind == ClassKind::BroadcastReceiver ||
         c.kind == ClassKind::ContentProvider) &&
        declared_components.count(c.name) == 0)
      throw SchemaViolation(c.name, "component class missing from manifest");
  }

  // Method bodies: unique names, resolvable calls/refs/launches.
  for (const ClassUnit& c : app.classes) {
    std::set<std::string> method_names;
    for (const MethodDef& m : c.methods) {
      if (m.name.empty() || m.name.find('.') != std::string::npos)
        throw SchemaViolation(c.name, "invalid method name '" + m.name + "'");
      if (!method_names.insert(m.name).second)
        throw SchemaViolation(c.name, "duplicate method '" + m.name + "'");
      std::string owner = c.name + "." + m.name;
      for (const CallSite& call : m.calls) {
        if (app.find_method(call.target_method) == nullptr)
          throw SchemaViolation(owner, "call to unknown method '" + call.target_method + "'");
      }
      for (const std::string& ref : m.resource_refs) {
        if (resource_ids.count(ref) == 0)
          throw SchemaViolation(owner, "reference to unknown resource '" + ref + "'");
      }
      for (const LaunchSite& site : m.launches) validate_launch_site(app, owner, site);
    }
  }
}

AppPackage parse_package(const Bytes& archive_bytes) {
  std::vector<ArchiveEntry> entries = read_archive(kPackageMagic, archive_bytes);

  AppPackage app;
  const char* current = kManifestEntry;
  try {
    json manifest = parse_entry_json(find_entry(entries, kManifestEntry));
    manifest.at("app_id").get_to(app.app_id);
    manifest.at("version").get_to(app.version);
    manifest.at("launcher_activity").get_to(app.manifest.launcher_activity);
    manifest.at("activities").get_to(app.manifest.activities);
    manifest.at("other_components").get_to(app.manifest.other_components);

    current = kCodeEntry;
    parse_entry_json(find_entry(entries, kCodeEntry)).at("classes").get_to(app.classes);
    current = kResEntry;
    parse_entry_json(find_entry(entries, kResEntry)).at("resources").get_to(app.resources);
    current = kAssetsEntry;
    parse_entry_json(find_entry(entries, kAssetsEntry)).at("assets").get_to(app.assets);
    current = kOtherEntry;
    parse_entry_json(find_entry(entries, kOtherEntry)).at("other").get_to(app.other);
  } catch (const json::exception& e) {
    throw SchemaViolation(current, e.what());
  }

  canonicalize(app);
  validate_package(app);
  return app;
}

Bytes serialize_package(const AppPackage& app) {
  AppPackage canon = app;
  canonicalize(canon);

  json manifest{{"app_id", canon.app_id},
                {"version", canon.version},
                {"launcher_activity", canon.manifest.launcher_activity},
                {"activities", canon.manifest.activities},
                {"other_components", canon.manifest.other_components}};

  std::vector<ArchiveEntry> entries;
  entries.push_back({kManifestEntry, to_bytes(manifest)});
  entries.push_back({kCodeEntry, to_bytes(json{{"classes", canon.classes}})});
  entries.push_back({kResEntry, to_bytes(json{{"resources", canon.resources}})});
  entries.push_back({kAssetsEntry, to_bytes(json{{"assets", canon.assets}})});
  entries.push_back({kOtherEntry, to_bytes(json{{"other", canon.other}})});
  return write_archive(kPackageMagic, std::move(entries));
}

std::uint64_t total_size(const AppPackage& app) {
  std::uint64_t sum = 0;
  for (const ClassUnit& c : app.classes) sum += c.size_bytes;
  for (const ResourceItem& r : app.resources) sum += r.size_bytes;
  for (const AssetItem& a : app.assets) sum += a.size_bytes;
  for (const OtherPayload& o : app.other) sum += o.size_bytes;
  return sum;
}

}  // namespace appsplit
