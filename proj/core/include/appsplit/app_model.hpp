#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "appsplit/archive.hpp"

namespace appsplit {

enum class ClassKind { Activity, Service, BroadcastReceiver, ContentProvider, Pojo };
enum class ComponentKind { Service, BroadcastReceiver, ContentProvider };

std::string to_string(ClassKind kind);
ClassKind class_kind_from_string(const std::string& s);
std::string to_string(ComponentKind kind);
ComponentKind component_kind_from_string(const std::string& s);

struct IntentFilter {
  std::string action;
  std::vector<std::string> categories;  // kept sorted

  bool operator==(const IntentFilter&) const = default;
};

struct ActivityDecl {
  std::string class_name;
  std::vector<IntentFilter> intent_filters;
  bool welcome = false;

  bool operator==(const ActivityDecl&) const = default;
};

struct ComponentDecl {
  std::string class_name;
  ComponentKind kind = ComponentKind::Service;

  bool operator==(const ComponentDecl&) const = default;
};

struct CallSite {
  std::string target_method;  // qualified "Class.method"
  bool dynamic = false;       // invisible to static analysis when true

  bool operator==(const CallSite&) const = default;
};

struct LaunchSite {
  enum class Kind { Explicit, Implicit };

  Kind kind = Kind::Explicit;
  std::string target_activity;          // Explicit only
  std::string action;                   // Implicit only
  std::vector<std::string> categories;  // Implicit only, kept sorted
  bool hooked = false;                  // set by rewrite_launch_sites

  bool operator==(const LaunchSite&) const = default;
};

struct MethodDef {
  std::string name;
  std::vector<CallSite> calls;            // execution order
  std::vector<std::string> resource_refs; // execution order
  std::vector<LaunchSite> launches;       // navigation-site order

  bool operator==(const MethodDef&) const = default;
};

struct ClassUnit {
  std::string name;
  ClassKind kind = ClassKind::Pojo;
  std::uint64_t size_bytes = 0;
  std::vector<MethodDef> methods;

  bool operator==(const ClassUnit&) const = default;
};

struct ResourceItem {
  std::string id;  // "type/name"
  std::uint64_t size_bytes = 0;
  std::vector<std::string> refs;

  bool operator==(const ResourceItem&) const = default;
};

struct AssetItem {
  std::string path;
  std::uint64_t size_bytes = 0;

  bool operator==(const AssetItem&) const = default;
};

struct OtherPayload {
  std::string name;
  std::uint64_t size_bytes = 0;

  bool operator==(const OtherPayload&) const = default;
};

struct Manifest {
  std::string launcher_activity;
  std::vector<ActivityDecl> activities;
  std::vector<ComponentDecl> other_components;

  bool operator==(const Manifest&) const = default;
};

/// The whole abstract app. Immutable in spirit: build, canonicalize, validate,
/// then treat as read-only. All operations on it are pure.
struct AppPackage {
  std::string app_id;
  std::uint64_t version = 1;
  Manifest manifest;
  std::vector<ClassUnit> classes;      // canonical: sorted by name
  std::vector<ResourceItem> resources; // canonical: sorted by id
  std::vector<AssetItem> assets;       // canonical: sorted by path
  std::vector<OtherPayload> other;     // canonical: sorted by name

  bool operator==(const AppPackage&) const = default;

  const ClassUnit* find_class(const std::string& name) const;
  const ResourceItem* find_resource(const std::string& id) const;
  const MethodDef* find_method(const std::string& qualified) const;
  bool is_activity(const std::string& class_name) const;

  /// Activity class names in manifest order.
  std::vector<std::string> activity_names() const;
};

/// Splits "Class.method" at the last dot. Throws SchemaViolation when there is
/// no dot or either half is empty.
std::pair<std::string, std::string> split_method_id(const std::string& qualified);

/// Sorts every entity array (classes, methods, resources, assets, other,
/// manifest declarations) lexicographically. Call/ref/launch lists keep their
/// order: they model execution order. Declaration order of activities is
/// therefore lexicographic after canonicalization.
void canonicalize(AppPackage& app);

/// Checks every type invariant; throws SchemaViolation naming the offending
/// entity. Duplicate names, dangling call/ref/launch targets, manifest
/// mismatches, and resource self-references are all rejected here.
void validate_package(const AppPackage& app);

/// Parses a `.apkg` archive. The result is canonical and validated.
AppPackage parse_package(const Bytes& archive_bytes);

/// Serializes to the `.apkg` archive format. Deterministic: the package is
/// canonicalized first and JSON keys are emitted sorted.
Bytes serialize_package(const AppPackage& app);

/// Sum of size_bytes over classes, resources, assets, and other payloads.
std::uint64_t total_size(const AppPackage& app);

}  // namespace appsplit
